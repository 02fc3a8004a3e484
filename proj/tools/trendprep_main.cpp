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

#include "trendprep/pipeline.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

constexpr int kInputError = 2;
constexpr int kNumericalError = 3;

}  // namespace

int main(int argc, char** argv) {
    using namespace trendprep;

    CLI::App app{"Preprocessing and forecasting toolkit for search-volume panels"};
    app.require_subcommand(0, 1);
    app.footer("Exit codes: 0 success, 2 config or input error, 3 numerical failure.\n\n"
               "Defaults:\n" +
               describe_defaults());

    std::string config_path;
    std::optional<std::uint64_t> seed;
    app.add_option("-c,--config", config_path, "Pipeline config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Root seed; overrides the config");
    bool print_config = false;
    app.add_flag("--print-config", print_config, "Print the effective config as JSON and exit");

    std::string out;

    auto* synth = app.add_subcommand("synth", "Simulate a world, replicate downloads and a target");
    synth->add_option("-o,--out", out, "Output directory")->required();

    std::vector<std::string> files;
    std::string location;
    auto* ingest = app.add_subcommand("ingest", "Convert Trends exports to a panel file");
    ingest->add_option("files", files, "Trends CSV exports")->required()->check(CLI::ExistingFile);
    ingest->add_option("-l,--location", location, "Region code")->required();
    ingest->add_option("-o,--out", out, "Output panel CSV")->required();

    std::string panels, target;
    StageFlags flags;
    auto* pre = app.add_subcommand("preprocess", "Run triage, clustering, denoising, detrending "
                                                 "and selection");
    pre->add_option("-p,--panels", panels, "Panel CSV")->required();
    pre->add_option("-t,--target", target, "Target CSV (enables predictor selection)");
    pre->add_option("-o,--out", out, "Output directory")->required();
    pre->add_flag("--skip-cluster", flags.skip_cluster, "Skip triage, clustering and combining");
    pre->add_flag("--skip-denoise", flags.skip_denoise, "Skip denoising");
    pre->add_flag("--skip-detrend", flags.skip_detrend, "Skip detrending");

    std::optional<std::size_t> threads;
    auto* bt = app.add_subcommand("backtest", "Rolling-origin evaluation of every model, horizon "
                                              "and exog variant");
    bt->add_option("-p,--panels", panels, "Panel CSV")->required();
    bt->add_option("-t,--target", target, "Target CSV")->required();
    bt->add_option("-o,--out", out, "Output directory")->required();
    bt->add_option("--threads", threads, "Worker threads; overrides the config");

    std::string traces, season = "all";
    std::size_t window = 24;
    auto* rep = app.add_subcommand("report", "Summaries and fluctuation paths from traces");
    rep->add_option("--traces", traces, "traces.csv from backtest")->required();
    rep->add_option("-o,--out", out, "Output directory")->required();
    rep->add_option("--season", season, "all, peak (Dec-Jan) or off")
        ->check(CLI::IsMember({"all", "peak", "off"}));
    rep->add_option("--window", window, "Fluctuation window in weeks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    try {
        PipelineConfig config;
        if (!config_path.empty()) {
            config = pipeline_config_from_json(read_file(config_path));
        }
        if (seed) {
            config.seed = *seed;
        }
        if (threads) {
            config.threads = *threads;
        }
        config.validate();
        if (print_config) {
            std::cout << pipeline_config_to_json(config);
            return 0;
        }
        if (app.get_subcommands().empty()) {
            std::cerr << "error: a subcommand is required (synth, ingest, preprocess, backtest, "
                         "report)\n";
            return kInputError;
        }
        if (*synth) {
            return cmd_synth(config, out);
        }
        if (*ingest) {
            return cmd_ingest(files, location, out);
        }
        if (*pre) {
            std::optional<std::filesystem::path> t;
            if (!target.empty()) {
                t = target;
            }
            return cmd_preprocess(config, panels, flags, t, out);
        }
        if (*bt) {
            return cmd_backtest(config, panels, target, out);
        }
        if (*rep) {
            return cmd_report(traces, parse_season_filter(season), out, window);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    }
    return 0;
}
