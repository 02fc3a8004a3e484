/*
 * Copyright 2026 The trendprep Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "trendprep/ingest.hpp"

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trendprep {

/// Exogenous columns sharing one row index.
using ExogColumns = std::vector<std::span<const double>>;

struct ArimaOptions {
    std::size_t max_iterations = 100;
    double tolerance = 1e-10;
    double bound = 0.99;  // |phi|, |theta| kept inside the unit circle
};

struct ArimaxFit {
    double forecast = 0.0;
    double phi = 0.0;
    double theta = 0.0;
    double intercept = 0.0;
    Vector beta;
    double css = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    bool fallback = false;  // (phi, theta) = (0, 0) regression after non-convergence
};

/// ARIMAX(1,1,1) by conditional sum of squares. `y_window` holds the target
/// for weeks t-W..t-1; every exog column holds weeks t-W..t (one more row,
/// the current week). Returns the forecast of week t+horizon; exog beyond
/// week t is held at its week-t value.
ArimaxFit fit_arimax(std::span<const double> y_window, const ExogColumns& x_window, int horizon,
                     const ArimaOptions& options = {});

/// Same model with the differencing taken at lag `season` instead of 1.
ArimaxFit fit_sarimax(std::span<const double> y_window, const ExogColumns& x_window, int horizon,
                      std::size_t season = 52, const ArimaOptions& options = {});

struct ArgoOptions {
    std::size_t lags = 52;
    std::size_t train_rows = 104;
    std::size_t folds = 5;
    std::size_t path_length = 30;
    double path_ratio = 1e-3;
    std::optional<double> penalty;  // skips cross-validation when set
};

struct ArgoFit {
    double forecast = 0.0;
    double penalty = 0.0;
    double intercept = 0.0;
    Vector coefficients;  // original scale: lags 1..L, then exog columns
};

/// L1-penalized regression of y_{s+h} on [y_{s-1}, ..., y_{s-L}, X_s] over
/// the last `train_rows` usable origins s, penalty chosen by blocked
/// cross-validation. `y_history` covers weeks 0..t-1, exog weeks 0..t.
ArgoFit fit_argo(std::span<const double> y_history, const ExogColumns& x_history, int horizon,
                 const ArgoOptions& options = {});

/// Lasso on already-built data; exposed for testing. Minimizes
/// (1/2n)||y - b0 - X b||^2 + penalty ||b||_1 with standardized columns.
struct LassoFit {
    double intercept = 0.0;
    Vector coefficients;
};
LassoFit fit_lasso(const Matrix& X, std::span<const double> y, double penalty);

/// Information available when forecasting from week t.
struct ForecastOrigin {
    std::span<const double> target;  // weeks 0..t-1
    ExogColumns exog;                // weeks 0..t
    std::span<const Date> dates;     // weeks 0..t
    std::vector<std::string> exog_names;
    int horizon = 0;
    std::size_t train_window = 104;
};

struct ForecastOutcome {
    double value = 0.0;
    std::string flags;
};

/// Plug-in point for forecasting models.
class ForecastModel {
public:
    virtual ~ForecastModel() = default;
    virtual std::string id() const = 0;
    /// Target weeks required before the first origin.
    virtual std::size_t min_history(int horizon, std::size_t train_window) const = 0;
    virtual ForecastOutcome forecast(const ForecastOrigin& origin) const = 0;
};

class ArimaxModel final : public ForecastModel {
public:
    explicit ArimaxModel(ArimaOptions options = {}) : options_(options) {}
    std::string id() const override { return "arimax"; }
    std::size_t min_history(int horizon, std::size_t train_window) const override;
    ForecastOutcome forecast(const ForecastOrigin& origin) const override;

private:
    ArimaOptions options_;
};

class SarimaxModel final : public ForecastModel {
public:
    explicit SarimaxModel(std::size_t season = 52, ArimaOptions options = {})
        : season_(season), options_(options) {}
    std::string id() const override { return "sarimax"; }
    std::size_t min_history(int horizon, std::size_t train_window) const override;
    ForecastOutcome forecast(const ForecastOrigin& origin) const override;

private:
    std::size_t season_;
    ArimaOptions options_;
};

class ArgoModel final : public ForecastModel {
public:
    explicit ArgoModel(ArgoOptions options = {}) : options_(options) {}
    std::string id() const override { return "argo"; }
    std::size_t min_history(int horizon, std::size_t train_window) const override;
    ForecastOutcome forecast(const ForecastOrigin& origin) const override;

private:
    ArgoOptions options_;
};

/// Last observed target value.
class PersistenceModel final : public ForecastModel {
public:
    std::string id() const override { return "persistence"; }
    std::size_t min_history(int, std::size_t) const override { return 1; }
    ForecastOutcome forecast(const ForecastOrigin& origin) const override;
};

/// External model run as a subprocess once per origin. Standard input gets
///
///     horizon,<h>
///     date,target,<exog names...>
///     <rows; the final row is the origin week with an empty target>
///
/// and the first line of standard output is parsed as the forecast.
class SubprocessModel final : public ForecastModel {
public:
    SubprocessModel(std::string id, std::string command, bool expanding_window = false)
        : id_(std::move(id)), command_(std::move(command)), expanding_(expanding_window) {}
    std::string id() const override { return id_; }
    std::size_t min_history(int, std::size_t train_window) const override { return train_window; }
    ForecastOutcome forecast(const ForecastOrigin& origin) const override;

    /// The text written to the subprocess.
    std::string design_csv(const ForecastOrigin& origin) const;

private:
    std::string id_;
    std::string command_;
    bool expanding_;
};

/// "arimax", "sarimax", "argo" or "persistence".
std::unique_ptr<ForecastModel> make_builtin_model(std::string_view id);

/// One set of exogenous columns aligned to the target's weeks.
struct ExogVariant {
    std::string name;
    std::vector<std::string> names;
    std::vector<Vector> columns;
};

struct BacktestData {
    std::string location;
    std::vector<Date> dates;
    Vector target;
    std::vector<ExogVariant> variants;
};

inline constexpr const char* kNoExog = "none";

inline constexpr std::size_t kMinTrainWindow = 60;

struct ForecastTask {
    std::string location;
    int horizon = 0;
    std::size_t train_window = 104;
    std::string exog_variant = kNoExog;
    std::string model_id;
};

/// Forecasts of target weeks [test_begin, test_end) for one task. A row whose
/// fit failed carries NaN and the error text in `flags`.
struct ForecastTrace {
    std::string location;
    std::string model_id;
    std::string exog_variant;
    int horizon = 0;
    std::vector<Date> dates;
    Vector y_true;
    Vector y_hat;
    std::vector<std::string> flags;
};

using ModelRegistry = std::map<std::string, std::shared_ptr<const ForecastModel>>;

/// Rolling-origin evaluation. For target week d and horizon h the origin is
/// t = d - h: the model sees the target through t-1 and exog through t.
/// Work is spread over `threads` workers; output order follows `tasks`.
std::vector<ForecastTrace> run_backtest(const BacktestData& data,
                                        std::span<const ForecastTask> tasks,
                                        const ModelRegistry& models, std::size_t test_begin,
                                        std::size_t test_end, std::size_t threads = 1);

/// `date,y_true,y_hat,flags`
void write_trace_csv(std::ostream& out, const ForecastTrace& trace);
ForecastTrace parse_trace_csv(std::string_view text);

}  // namespace trendprep
