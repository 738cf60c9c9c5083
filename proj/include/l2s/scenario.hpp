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

#ifndef L2S_SCENARIO_HPP
#define L2S_SCENARIO_HPP

#include "l2s/oracle.hpp"
#include "l2s/trainer.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace l2s
{
    inline constexpr int scenario_schema_version = 1;

    struct BeamSpec
    {
        double center_deg = 0.0;
        double width_deg = 0.0;
        double power = 1.0;
        double weight = 1.0;

        double lower() const { return center_deg - 0.5 * width_deg; }
        double upper() const { return center_deg + 0.5 * width_deg; }
        bool contains(double angle_deg) const;

        bool operator==(const BeamSpec &) const = default;
    };

    // Everything a run needs, as read from a scenario file (JSON).
    struct ScenarioFile
    {
        std::string name;
        ArrayGeometry geometry{2, 0.5};
        double grid_start_deg = -90.0;
        double grid_stop_deg = 90.0;
        double grid_step_deg = 1.0;
        double eval_step_deg = 0.05;
        double floor_power = 0.0;
        double floor_weight = 1.0;
        std::vector<BeamSpec> beams;
        std::size_t select_m = 1;
        TrainConfig train;
        OracleConfig oracle;

        // Desired power and weight at an arbitrary angle.
        double desired_at(double angle_deg) const;
        double weight_at(double angle_deg) const;

        BeamScenario training_scenario() const;
        std::vector<double> eval_grid() const;

        bool operator==(const ScenarioFile &) const = default;
    };

    // Parses and validates; errors name the offending field.
    ScenarioFile parse_scenario(const std::string &text);
    ScenarioFile load_scenario(const std::filesystem::path &path);

    std::string scenario_to_string(const ScenarioFile &scenario);
    void save_scenario(const ScenarioFile &scenario, const std::filesystem::path &path);
} // namespace l2s

#endif
