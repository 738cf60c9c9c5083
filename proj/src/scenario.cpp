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

#include "l2s/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace l2s
{
    using json = nlohmann::json;

    namespace
    {
        constexpr double angle_tol = 1e-9;

        [[noreturn]] void schema_error(const std::string &field, const std::string &what)
        {
            fail(ErrorCode::schema, "scenario: field '" + field + "' " + what);
        }

        void reject_unknown(const json &obj, const std::string &prefix, const std::set<std::string> &known)
        {
            for (auto it = obj.begin(); it != obj.end(); ++it)
                if (!known.contains(it.key()))
                    schema_error(prefix + it.key(), "is not a recognized field");
        }

        const json &object_at(const json &obj, const std::string &key, const std::string &path)
        {
            if (!obj.contains(key))
                schema_error(path, "is required");
            const json &v = obj.at(key);
            if (!v.is_object())
                schema_error(path, "must be an object");
            return v;
        }

        double read_real(const json &obj, const std::string &key, const std::string &path, std::optional<double> fallback)
        {
            if (!obj.contains(key))
            {
                if (!fallback)
                    schema_error(path, "is required");
                return *fallback;
            }
            const json &v = obj.at(key);
            if (!v.is_number())
                schema_error(path, "must be a number");
            const double d = v.get<double>();
            if (!std::isfinite(d))
                schema_error(path, "must be finite");
            return d;
        }

        std::uint64_t read_uint(const json &obj, const std::string &key, const std::string &path,
                                std::optional<std::uint64_t> fallback)
        {
            if (!obj.contains(key))
            {
                if (!fallback)
                    schema_error(path, "is required");
                return *fallback;
            }
            const json &v = obj.at(key);
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
                schema_error(path, "must be a non-negative integer");
            return v.get<std::uint64_t>();
        }

        bool read_bool(const json &obj, const std::string &key, const std::string &path, bool fallback)
        {
            if (!obj.contains(key))
                return fallback;
            if (!obj.at(key).is_boolean())
                schema_error(path, "must be a boolean");
            return obj.at(key).get<bool>();
        }

        TrainConfig read_train(const json &t)
        {
            reject_unknown(t, "train.",
                           {"n_epochs", "n_steps", "learning_rate", "alpha_init", "alpha_final", "t_samples", "seed",
                            "adam_beta1", "adam_beta2", "adam_epsilon", "reoptimize_q_after_harden"});
            TrainConfig d;
            TrainConfig c;
            c.n_epochs = read_uint(t, "n_epochs", "train.n_epochs", d.n_epochs);
            c.n_steps = read_uint(t, "n_steps", "train.n_steps", d.n_steps);
            c.learning_rate = read_real(t, "learning_rate", "train.learning_rate", d.learning_rate);
            c.alpha_init = read_real(t, "alpha_init", "train.alpha_init", d.alpha_init);
            c.alpha_final = read_real(t, "alpha_final", "train.alpha_final", d.alpha_final);
            c.t_samples = read_uint(t, "t_samples", "train.t_samples", d.t_samples);
            c.seed = read_uint(t, "seed", "train.seed", d.seed);
            c.adam_beta1 = read_real(t, "adam_beta1", "train.adam_beta1", d.adam_beta1);
            c.adam_beta2 = read_real(t, "adam_beta2", "train.adam_beta2", d.adam_beta2);
            c.adam_epsilon = read_real(t, "adam_epsilon", "train.adam_epsilon", d.adam_epsilon);
            c.reoptimize_q_after_harden =
                read_bool(t, "reoptimize_q_after_harden", "train.reoptimize_q_after_harden", d.reoptimize_q_after_harden);

            if (c.n_epochs < 1)
                schema_error("train.n_epochs", "must be >= 1");
            if (c.n_steps < 1)
                schema_error("train.n_steps", "must be >= 1");
            if (!(c.learning_rate > 0.0))
                schema_error("train.learning_rate", "must be > 0");
            if (!(c.alpha_init >= 0.0))
                schema_error("train.alpha_init", "must be >= 0");
            if (!(c.alpha_final >= c.alpha_init))
                schema_error("train.alpha_final", "must be >= train.alpha_init");
            if (!(c.adam_beta1 >= 0.0 && c.adam_beta1 < 1.0))
                schema_error("train.adam_beta1", "must lie in [0, 1)");
            if (!(c.adam_beta2 >= 0.0 && c.adam_beta2 < 1.0))
                schema_error("train.adam_beta2", "must lie in [0, 1)");
            if (!(c.adam_epsilon > 0.0))
                schema_error("train.adam_epsilon", "must be > 0");
            return c;
        }

        OracleConfig read_oracle(const json &o)
        {
            reject_unknown(o, "oracle.", {"inner_steps", "learning_rate", "seed", "cap", "threads"});
            OracleConfig d;
            OracleConfig c;
            c.inner_steps = read_uint(o, "inner_steps", "oracle.inner_steps", d.inner_steps);
            c.learning_rate = read_real(o, "learning_rate", "oracle.learning_rate", d.learning_rate);
            c.seed = read_uint(o, "seed", "oracle.seed", d.seed);
            c.cap = read_uint(o, "cap", "oracle.cap", d.cap);
            c.threads = read_uint(o, "threads", "oracle.threads", d.threads);
            if (c.inner_steps < 1)
                schema_error("oracle.inner_steps", "must be >= 1");
            if (!(c.learning_rate > 0.0))
                schema_error("oracle.learning_rate", "must be > 0");
            return c;
        }

        ScenarioFile from_json(const json &root)
        {
            if (!root.is_object())
                fail(ErrorCode::schema, "scenario: top level must be an object");
            reject_unknown(root, "", {"schema_version", "name", "geometry", "grid", "eval_grid", "floor_power",
                                      "floor_weight", "beams", "select_m", "train", "oracle"});

            const auto version = read_uint(root, "schema_version", "schema_version", std::nullopt);
            if (version != std::uint64_t(scenario_schema_version))
                schema_error("schema_version", "must be " + std::to_string(scenario_schema_version));

            ScenarioFile s;
            if (root.contains("name"))
            {
                if (!root.at("name").is_string())
                    schema_error("name", "must be a string");
                s.name = root.at("name").get<std::string>();
            }

            const json &g = object_at(root, "geometry", "geometry");
            reject_unknown(g, "geometry.", {"n_elements", "spacing_wavelengths"});
            const auto n = read_uint(g, "n_elements", "geometry.n_elements", std::nullopt);
            const double d = read_real(g, "spacing_wavelengths", "geometry.spacing_wavelengths", 0.5);
            if (n < 2)
                schema_error("geometry.n_elements", "must be >= 2");
            if (!(d > 0.0))
                schema_error("geometry.spacing_wavelengths", "must be > 0");
            s.geometry = ArrayGeometry(n, d);

            if (root.contains("grid"))
            {
                const json &grid = object_at(root, "grid", "grid");
                reject_unknown(grid, "grid.", {"start_deg", "stop_deg", "step_deg"});
                s.grid_start_deg = read_real(grid, "start_deg", "grid.start_deg", s.grid_start_deg);
                s.grid_stop_deg = read_real(grid, "stop_deg", "grid.stop_deg", s.grid_stop_deg);
                s.grid_step_deg = read_real(grid, "step_deg", "grid.step_deg", s.grid_step_deg);
            }
            if (!(s.grid_step_deg > 0.0))
                schema_error("grid.step_deg", "must be > 0");
            if (s.grid_start_deg < -90.0 || s.grid_start_deg > 90.0)
                schema_error("grid.start_deg", "must lie in [-90, 90]");
            if (s.grid_stop_deg < s.grid_start_deg || s.grid_stop_deg > 90.0)
                schema_error("grid.stop_deg", "must lie in [grid.start_deg, 90]");

            if (root.contains("eval_grid"))
            {
                const json &eg = object_at(root, "eval_grid", "eval_grid");
                reject_unknown(eg, "eval_grid.", {"step_deg"});
                s.eval_step_deg = read_real(eg, "step_deg", "eval_grid.step_deg", s.eval_step_deg);
            }
            if (!(s.eval_step_deg > 0.0) || s.eval_step_deg > 0.05 + 1e-12)
                schema_error("eval_grid.step_deg", "must lie in (0, 0.05]");

            s.floor_power = read_real(root, "floor_power", "floor_power", 0.0);
            s.floor_weight = read_real(root, "floor_weight", "floor_weight", 1.0);
            if (!(s.floor_power >= 0.0))
                schema_error("floor_power", "must be >= 0");
            if (!(s.floor_weight > 0.0))
                schema_error("floor_weight", "must be > 0");

            if (root.contains("beams"))
            {
                const json &beams = root.at("beams");
                if (!beams.is_array())
                    schema_error("beams", "must be an array");
                for (std::size_t i = 0; i < beams.size(); ++i)
                {
                    const std::string p = "beams[" + std::to_string(i) + "]";
                    const json &b = beams.at(i);
                    if (!b.is_object())
                        schema_error(p, "must be an object");
                    reject_unknown(b, p + ".", {"center_deg", "width_deg", "power", "weight"});
                    BeamSpec beam;
                    beam.center_deg = read_real(b, "center_deg", p + ".center_deg", std::nullopt);
                    beam.width_deg = read_real(b, "width_deg", p + ".width_deg", std::nullopt);
                    beam.power = read_real(b, "power", p + ".power", 1.0);
                    beam.weight = read_real(b, "weight", p + ".weight", 1.0);
                    if (!(beam.width_deg >= 0.0))
                        schema_error(p + ".width_deg", "must be >= 0");
                    if (!(beam.power >= 0.0))
                        schema_error(p + ".power", "must be >= 0");
                    if (!(beam.weight > 0.0))
                        schema_error(p + ".weight", "must be > 0");
                    if (beam.lower() < s.grid_start_deg - angle_tol || beam.upper() > s.grid_stop_deg + angle_tol)
                        schema_error(p, "lies outside the training grid range");
                    for (std::size_t j = 0; j < s.beams.size(); ++j)
                    {
                        const auto &o = s.beams[j];
                        const bool overlap = beam.lower() <= o.upper() + angle_tol && o.lower() <= beam.upper() + angle_tol;
                        if (overlap && (o.power != beam.power || o.weight != beam.weight))
                            schema_error(p, "overlaps beams[" + std::to_string(j) + "] with a conflicting power or weight");
                    }
                    s.beams.push_back(beam);
                }
            }

            s.select_m = read_uint(root, "select_m", "select_m", std::nullopt);
            if (s.select_m < 1 || s.select_m > n)
                schema_error("select_m", "must lie in [1, geometry.n_elements]");

            if (root.contains("train"))
                s.train = read_train(object_at(root, "train", "train"));
            if (s.train.t_samples <= n)
                schema_error("train.t_samples", "must exceed geometry.n_elements");
            if (root.contains("oracle"))
                s.oracle = read_oracle(object_at(root, "oracle", "oracle"));
            return s;
        }

        json to_json(const ScenarioFile &s)
        {
            json beams = json::array();
            for (const auto &b : s.beams)
                beams.push_back({{"center_deg", b.center_deg}, {"width_deg", b.width_deg}, {"power", b.power}, {"weight", b.weight}});
            const auto &t = s.train;
            const auto &o = s.oracle;
            return json{
                {"schema_version", scenario_schema_version},
                {"name", s.name},
                {"geometry", {{"n_elements", s.geometry.n_elements()}, {"spacing_wavelengths", s.geometry.spacing_wavelengths()}}},
                {"grid", {{"start_deg", s.grid_start_deg}, {"stop_deg", s.grid_stop_deg}, {"step_deg", s.grid_step_deg}}},
                {"eval_grid", {{"step_deg", s.eval_step_deg}}},
                {"floor_power", s.floor_power},
                {"floor_weight", s.floor_weight},
                {"beams", beams},
                {"select_m", s.select_m},
                {"train",
                 {{"n_epochs", t.n_epochs},
                  {"n_steps", t.n_steps},
                  {"learning_rate", t.learning_rate},
                  {"alpha_init", t.alpha_init},
                  {"alpha_final", t.alpha_final},
                  {"t_samples", t.t_samples},
                  {"seed", t.seed},
                  {"adam_beta1", t.adam_beta1},
                  {"adam_beta2", t.adam_beta2},
                  {"adam_epsilon", t.adam_epsilon},
                  {"reoptimize_q_after_harden", t.reoptimize_q_after_harden}}},
                {"oracle",
                 {{"inner_steps", o.inner_steps},
                  {"learning_rate", o.learning_rate},
                  {"seed", o.seed},
                  {"cap", o.cap},
                  {"threads", o.threads}}},
            };
        }
    } // namespace

    bool BeamSpec::contains(double angle_deg) const
    {
        return angle_deg >= lower() - angle_tol && angle_deg <= upper() + angle_tol;
    }

    double ScenarioFile::desired_at(double angle_deg) const
    {
        for (const auto &b : beams)
            if (b.contains(angle_deg))
                return b.power;
        return floor_power;
    }

    double ScenarioFile::weight_at(double angle_deg) const
    {
        for (const auto &b : beams)
            if (b.contains(angle_deg))
                return b.weight;
        return floor_weight;
    }

    BeamScenario ScenarioFile::training_scenario() const
    {
        auto angles = make_grid(grid_start_deg, grid_stop_deg, grid_step_deg);
        std::vector<double> power(angles.size()), weight(angles.size());
        for (std::size_t k = 0; k < angles.size(); ++k)
        {
            // Snap accumulated rounding at the grid ends.
            angles[k] = std::clamp(angles[k], -90.0, 90.0);
            power[k] = desired_at(angles[k]);
            weight[k] = weight_at(angles[k]);
        }
        return BeamScenario(std::move(angles), std::move(power), std::move(weight));
    }

    std::vector<double> ScenarioFile::eval_grid() const
    {
        auto g = make_grid(-90.0, 90.0, eval_step_deg);
        for (auto &a : g)
            a = std::clamp(a, -90.0, 90.0);
        return g;
    }

    ScenarioFile parse_scenario(const std::string &text)
    {
        json root;
        try
        {
            root = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            fail(ErrorCode::schema, std::string("scenario: malformed JSON: ") + e.what());
        }
        return from_json(root);
    }

    ScenarioFile load_scenario(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            fail(ErrorCode::io, "scenario: cannot open '" + path.string() + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        try
        {
            return parse_scenario(buf.str());
        }
        catch (const Error &e)
        {
            throw Error(e.code(), path.string() + ": " + e.what());
        }
    }

    std::string scenario_to_string(const ScenarioFile &scenario)
    {
        return to_json(scenario).dump(2);
    }

    void save_scenario(const ScenarioFile &scenario, const std::filesystem::path &path)
    {
        std::ofstream out(path);
        if (!out)
            fail(ErrorCode::io, "cannot write '" + path.string() + "'");
        out << scenario_to_string(scenario) << '\n';
    }
} // namespace l2s
