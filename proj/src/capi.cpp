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

#include "l2s/l2s.h"

#include "l2s/gradcheck.hpp"
#include "l2s/report.hpp"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <new>
#include <string>

struct l2s_scenario
{
    l2s::ScenarioFile file;
};

struct l2s_result
{
    l2s::TrainResult result;
    std::vector<l2s::EpochRecord> records;
};

struct l2s_oracle
{
    l2s::OracleResult result;
};

namespace
{
    thread_local std::string last_error;

    l2s_status to_status(l2s::ErrorCode code)
    {
        using l2s::ErrorCode;
        switch (code)
        {
        case ErrorCode::invalid_argument: return L2S_ERR_INVALID_ARGUMENT;
        case ErrorCode::domain: return L2S_ERR_DOMAIN;
        case ErrorCode::dimension: return L2S_ERR_DIMENSION;
        case ErrorCode::config: return L2S_ERR_CONFIG;
        case ErrorCode::schema: return L2S_ERR_SCHEMA;
        case ErrorCode::io: return L2S_ERR_IO;
        case ErrorCode::duplicate_selection: return L2S_ERR_DUPLICATE_SELECTION;
        case ErrorCode::diverged: return L2S_ERR_DIVERGED;
        case ErrorCode::cap_exceeded: return L2S_ERR_CAP_EXCEEDED;
        case ErrorCode::evaluation: return L2S_ERR_EVALUATION;
        case ErrorCode::gradcheck_failed: return L2S_ERR_GRADCHECK_FAILED;
        }
        return L2S_ERR_INTERNAL;
    }

    template <class F>
    l2s_status guarded(F &&f)
    {
        try
        {
            last_error.clear();
            return f();
        }
        catch (const l2s::Error &e)
        {
            last_error = e.what();
            return to_status(e.code());
        }
        catch (const std::filesystem::filesystem_error &e)
        {
            last_error = e.what();
            return L2S_ERR_IO;
        }
        catch (const std::bad_alloc &)
        {
            last_error = "out of memory";
            return L2S_ERR_INTERNAL;
        }
        catch (const std::exception &e)
        {
            last_error = e.what();
            return L2S_ERR_INTERNAL;
        }
        catch (...)
        {
            last_error = "unknown error";
            return L2S_ERR_INTERNAL;
        }
    }

    l2s_status null_arg(const char *name)
    {
        last_error = std::string("null argument: ") + name;
        return L2S_ERR_INVALID_ARGUMENT;
    }

    l2s_status copy_indices(const l2s::HardSelection &s, size_t *indices, size_t capacity, size_t *count)
    {
        if (!count)
            return null_arg("count");
        *count = s.size();
        if (indices)
            std::copy_n(s.indices().begin(), std::min(capacity, s.size()), indices);
        return L2S_OK;
    }

    l2s_epoch_record to_record(const l2s::EpochRecord &r)
    {
        return {r.epoch, r.loss.alpha, r.loss.fit, r.loss.penalty, r.loss.total, r.elapsed_seconds};
    }
} // namespace

extern "C" {

const char *l2s_version(void)
{
    return "1.0.0";
}

const char *l2s_last_error(void)
{
    return last_error.c_str();
}

const char *l2s_status_string(l2s_status status)
{
    switch (status)
    {
    case L2S_OK: return "ok";
    case L2S_ERR_INVALID_ARGUMENT: return "invalid argument";
    case L2S_ERR_DOMAIN: return "domain error";
    case L2S_ERR_DIMENSION: return "dimension mismatch";
    case L2S_ERR_CONFIG: return "configuration error";
    case L2S_ERR_SCHEMA: return "schema error";
    case L2S_ERR_IO: return "i/o error";
    case L2S_ERR_DUPLICATE_SELECTION: return "duplicate selection";
    case L2S_ERR_DIVERGED: return "training diverged";
    case L2S_ERR_CAP_EXCEEDED: return "enumeration cap exceeded";
    case L2S_ERR_EVALUATION: return "evaluation error";
    case L2S_ERR_GRADCHECK_FAILED: return "gradient check failed";
    case L2S_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

l2s_status l2s_scenario_load(const char *path, l2s_scenario **out)
{
    if (!path)
        return null_arg("path");
    if (!out)
        return null_arg("out");
    return guarded([&]
                   {
                       *out = new l2s_scenario{l2s::load_scenario(path)};
                       return L2S_OK;
                   });
}

l2s_status l2s_scenario_parse(const char *json_text, l2s_scenario **out)
{
    if (!json_text)
        return null_arg("json_text");
    if (!out)
        return null_arg("out");
    return guarded([&]
                   {
                       *out = new l2s_scenario{l2s::parse_scenario(json_text)};
                       return L2S_OK;
                   });
}

void l2s_scenario_free(l2s_scenario *scenario)
{
    delete scenario;
}

l2s_status l2s_scenario_info_get(const l2s_scenario *scenario, l2s_scenario_info *out)
{
    if (!scenario)
        return null_arg("scenario");
    if (!out)
        return null_arg("out");
    return guarded([&]
                   {
                       const auto &f = scenario->file;
                       *out = {f.geometry.n_elements(),
                               f.geometry.spacing_wavelengths(),
                               f.select_m,
                               f.training_scenario().size(),
                               f.train.n_epochs,
                               f.train.n_steps,
                               f.train.t_samples,
                               f.train.seed,
                               f.train.reoptimize_q_after_harden ? 1 : 0,
                               f.oracle.cap};
                       return L2S_OK;
                   });
}

l2s_status l2s_scenario_set_seed(l2s_scenario *scenario, uint64_t seed)
{
    if (!scenario)
        return null_arg("scenario");
    scenario->file.train.seed = seed;
    return L2S_OK;
}

l2s_status l2s_scenario_set_reoptimize_q(l2s_scenario *scenario, int enabled)
{
    if (!scenario)
        return null_arg("scenario");
    scenario->file.train.reoptimize_q_after_harden = enabled != 0;
    return L2S_OK;
}

l2s_status l2s_scenario_set_oracle_cap(l2s_scenario *scenario, uint64_t cap)
{
    if (!scenario)
        return null_arg("scenario");
    scenario->file.oracle.cap = cap;
    return L2S_OK;
}

l2s_status l2s_scenario_save(const l2s_scenario *scenario, const char *path)
{
    if (!scenario)
        return null_arg("scenario");
    if (!path)
        return null_arg("path");
    return guarded([&]
                   {
                       l2s::save_scenario(scenario->file, path);
                       return L2S_OK;
                   });
}

l2s_status l2s_train(const l2s_scenario *scenario, l2s_progress_fn progress, void *user, l2s_result **out)
{
    if (!scenario)
        return null_arg("scenario");
    if (!out)
        return null_arg("out");
    return guarded([&]
                   {
                       const auto &f = scenario->file;
                       std::vector<l2s::EpochRecord> records;
                       auto result = l2s::train(f.geometry, f.training_scenario(), f.select_m, f.train,
                                                [&](const l2s::EpochRecord &r)
                                                {
                                                    records.push_back(r);
                                                    if (progress)
                                                    {
                                                        const auto rec = to_record(r);
                                                        progress(&rec, user);
                                                    }
                                                });
                       *out = new l2s_result{std::move(result), std::move(records)};
                       return L2S_OK;
                   });
}

void l2s_result_free(l2s_result *result)
{
    delete result;
}

l2s_status l2s_result_selection(const l2s_result *result, size_t *indices, size_t capacity, size_t *count)
{
    if (!result)
        return null_arg("result");
    return copy_indices(result->result.selection, indices, capacity, count);
}

l2s_status l2s_result_degraded(const l2s_result *result, int *degraded)
{
    if (!result)
        return null_arg("result");
    if (!degraded)
        return null_arg("degraded");
    *degraded = result->result.degraded ? 1 : 0;
    return L2S_OK;
}

l2s_status l2s_result_final_loss(const l2s_result *result, l2s_epoch_record *out)
{
    if (!result)
        return null_arg("result");
    if (!out)
        return null_arg("out");
    if (result->records.empty())
    {
        last_error = "result has no epochs";
        return L2S_ERR_INVALID_ARGUMENT;
    }
    *out = to_record(result->records.back());
    return L2S_OK;
}

l2s_status l2s_result_achieved_fit(const l2s_result *result, double *fit)
{
    if (!result)
        return null_arg("result");
    if (!fit)
        return null_arg("fit");
    *fit = result->result.achieved_fit;
    return L2S_OK;
}

l2s_status l2s_result_write(const l2s_result *result, const l2s_scenario *scenario, const char *out_dir)
{
    if (!result)
        return null_arg("result");
    if (!scenario)
        return null_arg("scenario");
    if (!out_dir)
        return null_arg("out_dir");
    return guarded([&]
                   {
                       l2s::write_design_outputs(scenario->file, result->result, result->records, out_dir);
                       return L2S_OK;
                   });
}

l2s_status l2s_convergence_write(const l2s_epoch_record *records, size_t count, const char *path)
{
    if (!records && count)
        return null_arg("records");
    if (!path)
        return null_arg("path");
    return guarded([&]
                   {
                       std::vector<l2s::EpochRecord> recs;
                       recs.reserve(count);
                       for (size_t i = 0; i < count; ++i)
                       {
                           const auto &r = records[i];
                           recs.push_back({r.epoch, {r.total, r.fit, r.penalty, r.alpha}, r.elapsed_seconds});
                       }
                       const std::filesystem::path p(path);
                       if (p.has_parent_path())
                           std::filesystem::create_directories(p.parent_path());
                       l2s::write_convergence_csv(recs, p);
                       return L2S_OK;
                   });
}

l2s_status l2s_oracle_run(const l2s_scenario *scenario, l2s_oracle **out)
{
    if (!scenario)
        return null_arg("scenario");
    if (!out)
        return null_arg("out");
    return guarded([&]
                   {
                       const auto &f = scenario->file;
                       *out = new l2s_oracle{
                           l2s::brute_force_best(f.geometry, f.training_scenario(), f.select_m, f.oracle)};
                       return L2S_OK;
                   });
}

void l2s_oracle_free(l2s_oracle *oracle)
{
    delete oracle;
}

l2s_status l2s_oracle_count(const l2s_oracle *oracle, uint64_t *count)
{
    if (!oracle)
        return null_arg("oracle");
    if (!count)
        return null_arg("count");
    *count = oracle->result.evaluated_count;
    return L2S_OK;
}

l2s_status l2s_oracle_best(const l2s_oracle *oracle, size_t *indices, size_t capacity, size_t *count,
                           double *fit_loss)
{
    if (!oracle)
        return null_arg("oracle");
    if (fit_loss)
        *fit_loss = oracle->result.best_fit_loss;
    return copy_indices(oracle->result.best_selection, indices, capacity, count);
}

l2s_status l2s_oracle_write(const l2s_oracle *oracle, const l2s_scenario *scenario, const char *out_dir)
{
    if (!oracle)
        return null_arg("oracle");
    if (!scenario)
        return null_arg("scenario");
    if (!out_dir)
        return null_arg("out_dir");
    return guarded([&]
                   {
                       const std::filesystem::path dir(out_dir);
                       std::filesystem::create_directories(dir);
                       l2s::write_oracle_csv(oracle->result, dir / "oracle_ranked.csv");
                       l2s::write_oracle_json(scenario->file, oracle->result, dir / "oracle_best.json");
                       return L2S_OK;
                   });
}

l2s_status l2s_selection_read(const char *path, const l2s_scenario *scenario, size_t *indices, size_t capacity,
                              size_t *count)
{
    if (!path)
        return null_arg("path");
    if (!scenario)
        return null_arg("scenario");
    return guarded([&]
                   {
                       const auto s = l2s::read_selection_json(path, scenario->file.geometry.n_elements());
                       return copy_indices(s, indices, capacity, count);
                   });
}

l2s_status l2s_eval(const l2s_scenario *scenario, const size_t *indices, size_t count, const char *out_dir,
                    double *fit_loss)
{
    if (!scenario)
        return null_arg("scenario");
    if (!indices && count)
        return null_arg("indices");
    return guarded([&]
                   {
                       const auto &f = scenario->file;
                       const l2s::HardSelection sel(std::vector<std::size_t>(indices, indices + count),
                                                    f.geometry.n_elements());
                       const auto fit = l2s::score_selection(sel, f.geometry, f.training_scenario(), f.oracle);
                       if (fit_loss)
                           *fit_loss = fit.fit_loss;
                       if (out_dir)
                       {
                           const std::filesystem::path dir(out_dir);
                           std::filesystem::create_directories(dir);
                           const auto pattern = l2s::evaluate_pattern(f, sel, fit.q);
                           l2s::write_eval_json(f, fit, dir / "eval.json");
                           l2s::write_beampattern_csv(pattern, dir / "beampattern.csv");
                           l2s::write_hpbw_json(pattern, dir / "hpbw.json");
                       }
                       return L2S_OK;
                   });
}

void l2s_gradcheck_defaults(l2s_gradcheck_options *options)
{
    if (!options)
        return;
    const l2s::GradcheckOptions d;
    *options = {d.seed, d.instances, d.coords_per_instance, d.max_n, d.max_m, d.max_k, d.max_t,
                d.include_zero_q ? 1 : 0, d.corrupt};
}

l2s_status l2s_gradcheck(const l2s_gradcheck_options *options, l2s_gradcheck_report *report)
{
    if (!options)
        return null_arg("options");
    if (!report)
        return null_arg("report");
    return guarded([&]
                   {
                       l2s::GradcheckOptions o;
                       o.seed = options->seed;
                       o.instances = options->instances;
                       o.coords_per_instance = options->coords_per_instance;
                       o.max_n = options->max_n;
                       o.max_m = options->max_m;
                       o.max_k = options->max_k;
                       o.max_t = options->max_t;
                       o.include_zero_q = options->include_zero_q != 0;
                       o.corrupt = options->corrupt;
                       if (o.max_n < 2 || o.max_m < 1 || o.max_k < 1)
                           l2s::fail(l2s::ErrorCode::invalid_argument, "gradcheck: need max_n >= 2, max_m >= 1, max_k >= 1");
                       const auto r = l2s::run_gradcheck(o);
                       *report = {r.instances, r.coords, r.worst_error, o.tolerance, r.passed ? 1 : 0};
                       if (!r.passed)
                       {
                           last_error = "gradient check failed: worst error " + l2s::format_real(r.worst_error) +
                                        " exceeds " + l2s::format_real(o.tolerance);
                           return L2S_ERR_GRADCHECK_FAILED;
                       }
                       return L2S_OK;
                   });
}

} // extern "C"
