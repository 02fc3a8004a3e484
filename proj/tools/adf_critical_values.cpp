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

// Regenerates the quadratic-trend Dickey-Fuller critical values embedded in
// core/src/adf_tables.cpp.
//
//     adf_critical_values [--replications N] [--seed S] [out.csv]

#include "trendprep/detrend.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    using namespace trendprep;
    std::size_t reps = kAdfTableReplications;
    std::uint64_t seed = kAdfTableSeed;
    std::string out_path;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--replications" && i + 1 < argc) {
            reps = std::stoul(argv[++i]);
        } else if (a == "--seed" && i + 1 < argc) {
            seed = std::stoull(argv[++i]);
        } else if (a == "-h" || a == "--help") {
            std::cout << "usage: adf_critical_values [--replications N] [--seed S] [out.csv]\n";
            return 0;
        } else {
            out_path = a;
        }
    }
    std::vector<AdfTableRow> rows;
    for (std::size_t n : {100, 250, 500}) {
        rows.push_back(simulate_quadratic_critical_values(n, reps, seed));
        std::cerr << "n=" << n << " done\n";
    }
    if (out_path.empty()) {
        write_adf_table_csv(std::cout, rows, seed, reps);
    } else {
        std::ofstream f(out_path);
        write_adf_table_csv(f, rows, seed, reps);
    }
    return 0;
}
