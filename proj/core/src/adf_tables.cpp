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

#include "trendprep/detrend.hpp"

namespace trendprep {

namespace {

// Generated by tools/adf_critical_values (seed kAdfTableSeed,
// kAdfTableReplications replications); mirrored in
// core/data/adf_quadratic_critical_values.csv.
constexpr AdfTableRow kQuadraticTable[] = {
    {100, 99, -4.510884109133628, -3.886353414960376, -3.588132931455043},
    {250, 249, -4.443103625588572, -3.8622004139954638, -3.5637357140269317},
    {500, 499, -4.428056086757219, -3.855197199757019, -3.5643968818516893},
};

}  // namespace

std::span<const AdfTableRow> adf_quadratic_table() {
    return kQuadraticTable;
}

}  // namespace trendprep
