// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef L2S_REPORT_HPP
#define L2S_REPORT_HPP

#include "l2s/scenario.hpp"

#include <filesystem>

namespace l2s
{
    // Output files. Column names and order are fixed; floats use 12
    // significant digits.
    //
    //   selection.json     indices, degraded, seed, wall time, scenario echo
    //   beampattern.csv    angle_deg,desired,achieved,achieved_db_normalized
    //   convergence.csv    epoch,alpha,fit,penalty,total
    //   hpbw.json          one entry per detected mainlobe
    //   oracle_ranked.csv  rank,indices,fit_loss
    //   oracle_best.json   best indices and fit loss

    std::string format_real(double v);

    // Expected pattern of a hard selection on the scenario's fine evaluation grid.
    struct EvalPattern
    {
        std::vector<double> angles_deg;
        std::vector<double> desired;
        std::vector<double> achieved;
    };

    EvalPattern evaluate_pattern(const ScenarioFile &scenario, const HardSelection &selection, const Precoder &q);

    void write_beampattern_csv(const EvalPattern &pattern, const std::filesystem::path &path);
    void write_convergence_csv(std::span<const EpochRecord> records, const std::filesystem::path &path);
    void write_hpbw_json(const EvalPattern &pattern, const std::filesystem::path &path);
    void write_selection_json(const ScenarioFile &scenario, const TrainResult &result,
                              const std::filesystem::path &path);
    void write_oracle_csv(const OracleResult &result, const std::filesystem::path &path);
    void write_oracle_json(const ScenarioFile &scenario, const OracleResult &result, const std::filesystem::path &path);
    void write_eval_json(const ScenarioFile &scenario, const SelectionFit &fit, const std::filesystem::path &path);

    // Reads the "indices" array of a selection.json / oracle_best.json style file.
    HardSelection read_selection_json(const std::filesystem::path &path, std::size_t n_elements);

    // All design outputs for one finished run into out_dir (created if needed).
    void write_design_outputs(const ScenarioFile &scenario, const TrainResult &result,
                              std::span<const EpochRecord> records, const std::filesystem::path &out_dir);
} // namespace l2s

#endif
