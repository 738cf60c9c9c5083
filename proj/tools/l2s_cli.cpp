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

// Batch front end over the l2s C API: design, oracle, eval, gradcheck.

#include "l2s/l2s.h"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace
{
    struct ScenarioDeleter
    {
        void operator()(l2s_scenario *s) const { l2s_scenario_free(s); }
    };
    struct ResultDeleter
    {
        void operator()(l2s_result *r) const { l2s_result_free(r); }
    };
    struct OracleDeleter
    {
        void operator()(l2s_oracle *o) const { l2s_oracle_free(o); }
    };
    using ScenarioPtr = std::unique_ptr<l2s_scenario, ScenarioDeleter>;
    using ResultPtr = std::unique_ptr<l2s_result, ResultDeleter>;
    using OraclePtr = std::unique_ptr<l2s_oracle, OracleDeleter>;

    std::mutex io_mutex;

    int report(l2s_status st, const std::string &context)
    {
        std::lock_guard lock(io_mutex);
        std::cerr << "error: " << context << ": " << l2s_status_string(st) << ": " << l2s_last_error() << '\n';
        return int(st);
    }

    std::optional<ScenarioPtr> open_scenario(const std::string &path, int &rc)
    {
        l2s_scenario *raw = nullptr;
        if (auto st = l2s_scenario_load(path.c_str(), &raw); st != L2S_OK)
        {
            rc = report(st, "loading scenario");
            return std::nullopt;
        }
        return ScenarioPtr(raw);
    }

    struct DesignOptions
    {
        std::string scenario;
        std::string out = "out";
        std::optional<std::uint64_t> seed;
        std::size_t seeds = 1;
        bool no_reopt_q = false;
        std::size_t log_every = 50;
        std::size_t jobs = 0;
    };

    struct ProgressState
    {
        std::vector<l2s_epoch_record> records;
        std::size_t log_every = 0;
        std::string tag;
    };

    void on_progress(const l2s_epoch_record *r, void *user)
    {
        auto *state = static_cast<ProgressState *>(user);
        state->records.push_back(*r);
        if (state->log_every && (r->epoch % state->log_every == 0 || r->epoch == 1))
        {
            std::lock_guard lock(io_mutex);
            std::printf("%sepoch %zu  alpha %.4g  fit %.6g  penalty %.6g  total %.6g  (%.1fs)\n", state->tag.c_str(),
                        r->epoch, r->alpha, r->fit, r->penalty, r->total, r->elapsed_seconds);
            std::fflush(stdout);
        }
    }

    struct RunSummary
    {
        std::uint64_t seed = 0;
        std::vector<std::size_t> indices;
        int degraded = 0;
        double achieved_fit = 0.0;
        double penalty = 0.0;
        int rc = 0;
    };

    RunSummary design_one(const DesignOptions &o, std::uint64_t seed, const std::filesystem::path &out_dir,
                          const std::string &tag)
    {
        RunSummary s;
        s.seed = seed;
        auto scn = open_scenario(o.scenario, s.rc);
        if (!scn)
            return s;
        l2s_scenario_set_seed(scn->get(), seed);
        if (o.no_reopt_q)
            l2s_scenario_set_reoptimize_q(scn->get(), 0);

        ProgressState progress{{}, o.log_every, tag};
        l2s_result *raw = nullptr;
        const auto st = l2s_train(scn->get(), on_progress, &progress, &raw);
        if (st != L2S_OK)
        {
            s.rc = report(st, "training (seed " + std::to_string(seed) + ")");
            // Keep whatever convergence history exists.
            if (l2s_convergence_write(progress.records.data(), progress.records.size(),
                                      (out_dir / "convergence.csv").string().c_str()) != L2S_OK)
                report(L2S_ERR_IO, "writing partial convergence log");
            return s;
        }
        ResultPtr result(raw);
        if (auto w = l2s_result_write(result.get(), scn->get(), out_dir.string().c_str()); w != L2S_OK)
        {
            s.rc = report(w, "writing outputs");
            return s;
        }
        std::size_t count = 0;
        l2s_result_selection(result.get(), nullptr, 0, &count);
        s.indices.resize(count);
        l2s_result_selection(result.get(), s.indices.data(), count, &count);
        l2s_result_degraded(result.get(), &s.degraded);
        l2s_result_achieved_fit(result.get(), &s.achieved_fit);
        l2s_epoch_record last{};
        l2s_result_final_loss(result.get(), &last);
        s.penalty = last.penalty;
        return s;
    }

    std::string join(const std::vector<std::size_t> &v, const char *sep)
    {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out += (i ? sep : "") + std::to_string(v[i]);
        return out;
    }

    int cmd_design(const DesignOptions &o)
    {
        int rc = 0;
        auto scn = open_scenario(o.scenario, rc);
        if (!scn)
            return rc;
        l2s_scenario_info info{};
        l2s_scenario_info_get(scn->get(), &info);
        const std::uint64_t base = o.seed.value_or(info.seed);

        if (o.seeds <= 1)
        {
            const auto s = design_one(o, base, o.out, "");
            if (s.rc)
                return s.rc;
            std::printf("selection: [%s]%s  fit %.6g  penalty %.3g\n", join(s.indices, ", ").c_str(),
                        s.degraded ? "  (degraded: greedy fallback)" : "", s.achieved_fit, s.penalty);
            return 0;
        }

        std::vector<RunSummary> runs(o.seeds);
        std::atomic<std::size_t> next{0};
        auto worker = [&]
        {
            for (std::size_t i = next++; i < runs.size(); i = next++)
            {
                const auto seed = base + i;
                runs[i] = design_one(o, seed, std::filesystem::path(o.out) / ("seed_" + std::to_string(seed)),
                                     "[seed " + std::to_string(seed) + "] ");
            }
        };
        const std::size_t jobs =
            std::min<std::size_t>(runs.size(), o.jobs ? o.jobs : std::max(1u, std::thread::hardware_concurrency()));
        {
            std::vector<std::jthread> pool;
            for (std::size_t j = 0; j < jobs; ++j)
                pool.emplace_back(worker);
        }

        std::filesystem::create_directories(o.out);
        std::ofstream sweep(std::filesystem::path(o.out) / "sweep.csv");
        sweep << "seed,indices,degraded,achieved_fit,final_penalty,status\n";
        int worst = 0;
        for (const auto &r : runs)
        {
            char fit[32], pen[32];
            std::snprintf(fit, sizeof fit, "%.12g", r.achieved_fit);
            std::snprintf(pen, sizeof pen, "%.12g", r.penalty);
            sweep << r.seed << ',' << join(r.indices, " ") << ',' << r.degraded << ',' << fit << ',' << pen << ','
                  << r.rc << '\n';
            std::printf("seed %llu: [%s]%s fit %.6g\n", static_cast<unsigned long long>(r.seed),
                        join(r.indices, ", ").c_str(), r.degraded ? " (degraded)" : "", r.achieved_fit);
            worst = std::max(worst, r.rc);
        }
        return worst;
    }

    int cmd_oracle(const std::string &scenario, const std::string &out, std::optional<std::uint64_t> cap)
    {
        int rc = 0;
        auto scn = open_scenario(scenario, rc);
        if (!scn)
            return rc;
        if (cap)
            l2s_scenario_set_oracle_cap(scn->get(), *cap);
        l2s_oracle *raw = nullptr;
        if (auto st = l2s_oracle_run(scn->get(), &raw); st != L2S_OK)
            return report(st, "oracle");
        OraclePtr oracle(raw);
        if (auto st = l2s_oracle_write(oracle.get(), scn->get(), out.c_str()); st != L2S_OK)
            return report(st, "writing oracle outputs");
        std::uint64_t count = 0;
        l2s_oracle_count(oracle.get(), &count);
        std::size_t m = 0;
        double best = 0.0;
        l2s_oracle_best(oracle.get(), nullptr, 0, &m, &best);
        std::vector<std::size_t> idx(m);
        l2s_oracle_best(oracle.get(), idx.data(), m, &m, &best);
        std::printf("evaluated %llu subsets; best [%s] fit %.6g\n", static_cast<unsigned long long>(count),
                    join(idx, ", ").c_str(), best);
        return 0;
    }

    int cmd_eval(const std::string &selection, const std::string &scenario, const std::string &out)
    {
        int rc = 0;
        auto scn = open_scenario(scenario, rc);
        if (!scn)
            return rc;
        std::size_t count = 0;
        if (auto st = l2s_selection_read(selection.c_str(), scn->get(), nullptr, 0, &count); st != L2S_OK)
            return report(st, "reading selection");
        std::vector<std::size_t> idx(count);
        l2s_selection_read(selection.c_str(), scn->get(), idx.data(), count, &count);
        double fit = 0.0;
        if (auto st = l2s_eval(scn->get(), idx.data(), idx.size(), out.c_str(), &fit); st != L2S_OK)
            return report(st, "evaluating selection");
        std::printf("selection [%s] fit %.6g\n", join(idx, ", ").c_str(), fit);
        return 0;
    }

    int cmd_gradcheck(const l2s_gradcheck_options &o)
    {
        l2s_gradcheck_report r{};
        const auto st = l2s_gradcheck(&o, &r);
        if (st != L2S_OK && st != L2S_ERR_GRADCHECK_FAILED)
            return report(st, "gradcheck");
        std::printf("gradcheck: %zu instances, %zu coordinates, worst relative error %.3e (tolerance %.1e): %s\n",
                    r.instances, r.coords, r.worst_error, r.tolerance, r.passed ? "PASS" : "FAIL");
        return r.passed ? 0 : int(L2S_ERR_GRADCHECK_FAILED);
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Sparse array antenna selection with coupled softmax heads"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(l2s_version()));

    DesignOptions design;
    auto *design_cmd = app.add_subcommand("design", "Train a selection and precoder for a scenario");
    design_cmd->add_option("--scenario", design.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    design_cmd->add_option("--out", design.out, "Output directory")->capture_default_str();
    design_cmd->add_option("--seed", design.seed, "Override the scenario seed");
    design_cmd->add_option("--seeds", design.seeds, "Run this many consecutive seeds (one subdirectory each)")
        ->check(CLI::PositiveNumber);
    design_cmd->add_option("--jobs", design.jobs, "Parallel workers for --seeds (0 = hardware concurrency)");
    design_cmd->add_flag("--no-reopt-q", design.no_reopt_q, "Skip precoder refinement after hardening");
    design_cmd->add_option("--log-every", design.log_every, "Progress line every N epochs (0 = silent)")
        ->capture_default_str();

    std::string oracle_scenario, oracle_out = "out";
    std::optional<std::uint64_t> oracle_cap;
    auto *oracle_cmd = app.add_subcommand("oracle", "Exhaustively score every selection (small arrays only)");
    oracle_cmd->add_option("--scenario", oracle_scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    oracle_cmd->add_option("--out", oracle_out, "Output directory")->capture_default_str();
    oracle_cmd->add_option("--cap", oracle_cap, "Maximum number of subsets to enumerate");

    std::string eval_selection, eval_scenario, eval_out = "out";
    auto *eval_cmd = app.add_subcommand("eval", "Re-optimize the precoder for a fixed selection and score it");
    eval_cmd->add_option("--selection", eval_selection, "JSON file with an 'indices' array")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--scenario", eval_scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--out", eval_out, "Output directory")->capture_default_str();

    l2s_gradcheck_options gc{};
    l2s_gradcheck_defaults(&gc);
    bool no_zero_q = false;
    auto *gc_cmd = app.add_subcommand("gradcheck", "Finite-difference check of the analytic gradients");
    gc_cmd->add_option("--seed", gc.seed, "Random seed")->capture_default_str();
    gc_cmd->add_option("--instances", gc.instances, "Random instances")->capture_default_str();
    gc_cmd->add_option("--coords", gc.coords_per_instance, "Coordinates sampled per instance")->capture_default_str();
    gc_cmd->add_option("--max-n", gc.max_n, "Largest array size")->capture_default_str();
    gc_cmd->add_option("--max-m", gc.max_m, "Largest selection size")->capture_default_str();
    gc_cmd->add_option("--max-k", gc.max_k, "Largest angle grid")->capture_default_str();
    gc_cmd->add_option("--max-t", gc.max_t, "Largest excitation length")->capture_default_str();
    gc_cmd->add_flag("--no-zero-q", no_zero_q, "Skip the extra Q = 0 instance");
    gc_cmd->add_option("--corrupt", gc.corrupt, "Scale analytic gradients by (1 + x); negative control")
        ->group("");

    CLI11_PARSE(app, argc, argv);

    if (*design_cmd)
        return cmd_design(design);
    if (*oracle_cmd)
        return cmd_oracle(oracle_scenario, oracle_out, oracle_cap);
    if (*eval_cmd)
        return cmd_eval(eval_selection, eval_scenario, eval_out);
    if (*gc_cmd)
    {
        gc.include_zero_q = no_zero_q ? 0 : 1;
        return cmd_gradcheck(gc);
    }
    return 1;
}
