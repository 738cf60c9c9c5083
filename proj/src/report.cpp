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

#include "l2s/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace l2s
{
    using json = nlohmann::json;

    std::string format_real(double v)
    {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return buf;
    }

    namespace
    {
        // Round to 12 significant digits so the JSON writer emits at most that many.
        double r12(double v)
        {
            return std::stod(format_real(v));
        }

        std::ofstream open_out(const std::filesystem::path &path)
        {
            std::ofstream out(path, std::ios::binary);
            if (!out)
                fail(ErrorCode::io, "cannot write '" + path.string() + "'");
            return out;
        }

        void write_json(const json &doc, const std::filesystem::path &path)
        {
            auto out = open_out(path);
            out << doc.dump(2) << '\n';
        }

        json indices_json(const HardSelection &s)
        {
            return json(s.indices());
        }
    } // namespace

    EvalPattern evaluate_pattern(const ScenarioFile &scenario, const HardSelection &selection, const Precoder &q)
    {
        EvalPattern p;
        p.angles_deg = scenario.eval_grid();
        p.desired.reserve(p.angles_deg.size());
        for (double a : p.angles_deg)
            p.desired.push_back(scenario.desired_at(a));
        p.achieved = exact_beampattern(selection.matrix(), q.q(), steering_matrix(p.angles_deg, scenario.geometry));
        return p;
    }

    void write_beampattern_csv(const EvalPattern &pattern, const std::filesystem::path &path)
    {
        auto out = open_out(path);
        const auto db = normalized_db(pattern.achieved);
        out << "angle_deg,desired,achieved,achieved_db_normalized\n";
        for (std::size_t i = 0; i < pattern.angles_deg.size(); ++i)
            out << format_real(pattern.angles_deg[i]) << ',' << format_real(pattern.desired[i]) << ','
                << format_real(pattern.achieved[i]) << ',' << format_real(db[i]) << '\n';
    }

    void write_convergence_csv(std::span<const EpochRecord> records, const std::filesystem::path &path)
    {
        auto out = open_out(path);
        out << "epoch,alpha,fit,penalty,total\n";
        for (const auto &r : records)
            out << r.epoch << ',' << format_real(r.loss.alpha) << ',' << format_real(r.loss.fit) << ','
                << format_real(r.loss.penalty) << ',' << format_real(r.loss.total) << '\n';
    }

    void write_hpbw_json(const EvalPattern &pattern, const std::filesystem::path &path)
    {
        json lobes = json::array();
        const double peak = pattern.achieved.empty() ? 0.0 : *std::max_element(pattern.achieved.begin(), pattern.achieved.end());
        if (peak > 0.0)
            for (const auto &l : find_mainlobes(pattern.angles_deg, pattern.achieved))
                lobes.push_back({{"center_deg", r12(l.center_deg)},
                                 {"peak_power", r12(l.peak_power)},
                                 {"left_deg", r12(l.left_deg)},
                                 {"right_deg", r12(l.right_deg)},
                                 {"hpbw_deg", r12(l.hpbw_deg)}});
        write_json({{"eval_step_deg", r12(pattern.angles_deg.size() > 1 ? pattern.angles_deg[1] - pattern.angles_deg[0] : 0.0)},
                    {"peak_power", r12(peak)},
                    {"lobes", lobes}},
                   path);
    }

    void write_selection_json(const ScenarioFile &scenario, const TrainResult &result,
                              const std::filesystem::path &path)
    {
        const auto &last = result.loss_history.back();
        write_json({{"indices", indices_json(result.selection)},
                    {"n_elements", scenario.geometry.n_elements()},
                    {"select_m", scenario.select_m},
                    {"degraded", result.degraded},
                    {"seed", scenario.train.seed},
                    {"reoptimize_q_after_harden", scenario.train.reoptimize_q_after_harden},
                    {"achieved_fit", r12(result.achieved_fit)},
                    {"final_penalty", r12(result.final_penalty)},
                    {"final_loss", {{"alpha", r12(last.alpha)}, {"fit", r12(last.fit)}, {"penalty", r12(last.penalty)}, {"total", r12(last.total)}}},
                    {"max_row_entropy", r12(result.max_row_entropy)},
                    {"wall_time_seconds", r12(result.wall_time_seconds)},
                    {"scenario", json::parse(scenario_to_string(scenario))}},
                   path);
    }

    void write_oracle_csv(const OracleResult &result, const std::filesystem::path &path)
    {
        auto out = open_out(path);
        out << "rank,indices,fit_loss\n";
        for (std::size_t r = 0; r < result.ranked.size(); ++r)
        {
            out << r + 1 << ',';
            const auto &idx = result.ranked[r].selection.indices();
            for (std::size_t i = 0; i < idx.size(); ++i)
                out << (i ? " " : "") << idx[i];
            out << ',' << format_real(result.ranked[r].fit_loss) << '\n';
        }
    }

    void write_oracle_json(const ScenarioFile &scenario, const OracleResult &result, const std::filesystem::path &path)
    {
        write_json({{"indices", indices_json(result.best_selection)},
                    {"n_elements", scenario.geometry.n_elements()},
                    {"select_m", scenario.select_m},
                    {"fit_loss", r12(result.best_fit_loss)},
                    {"evaluated_count", result.evaluated_count},
                    {"scenario", json::parse(scenario_to_string(scenario))}},
                   path);
    }

    void write_eval_json(const ScenarioFile &scenario, const SelectionFit &fit, const std::filesystem::path &path)
    {
        write_json({{"indices", indices_json(fit.selection)},
                    {"n_elements", scenario.geometry.n_elements()},
                    {"fit_loss", r12(fit.fit_loss)},
                    {"scenario", json::parse(scenario_to_string(scenario))}},
                   path);
    }

    HardSelection read_selection_json(const std::filesystem::path &path, std::size_t n_elements)
    {
        std::ifstream in(path);
        if (!in)
            fail(ErrorCode::io, "cannot open '" + path.string() + "'");
        json doc;
        try
        {
            in >> doc;
        }
        catch (const json::parse_error &e)
        {
            fail(ErrorCode::schema, path.string() + ": malformed JSON: " + e.what());
        }
        if (!doc.is_object() || !doc.contains("indices") || !doc.at("indices").is_array())
            fail(ErrorCode::schema, path.string() + ": field 'indices' must be an array");
        std::vector<std::size_t> idx;
        for (const auto &v : doc.at("indices"))
        {
            if (!v.is_number_unsigned())
                fail(ErrorCode::schema, path.string() + ": field 'indices' must hold non-negative integers");
            idx.push_back(v.get<std::size_t>());
        }
        return HardSelection(std::move(idx), n_elements);
    }

    void write_design_outputs(const ScenarioFile &scenario, const TrainResult &result,
                              std::span<const EpochRecord> records, const std::filesystem::path &out_dir)
    {
        std::filesystem::create_directories(out_dir);
        const auto pattern = evaluate_pattern(scenario, result.selection, result.q_final);
        write_selection_json(scenario, result, out_dir / "selection.json");
        write_beampattern_csv(pattern, out_dir / "beampattern.csv");
        write_convergence_csv(records, out_dir / "convergence.csv");
        write_hpbw_json(pattern, out_dir / "hpbw.json");
    }
} // namespace l2s
