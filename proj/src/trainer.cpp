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

#include "l2s/trainer.hpp"
#include "l2s/rng.hpp"

#include <chrono>
#include <cmath>

namespace l2s
{
    void TrainConfig::validate(const ArrayGeometry &geom) const
    {
        if (n_epochs < 1)
            fail(ErrorCode::config, "train config: n_epochs must be >= 1");
        if (n_steps < 1)
            fail(ErrorCode::config, "train config: n_steps must be >= 1");
        if (!(learning_rate > 0.0))
            fail(ErrorCode::config, "train config: learning_rate must be > 0");
        if (!(alpha_init >= 0.0))
            fail(ErrorCode::config, "train config: alpha_init must be >= 0");
        if (!(alpha_final >= alpha_init))
            fail(ErrorCode::config, "train config: alpha_final must be >= alpha_init");
        if (t_samples <= geom.n_elements())
            fail(ErrorCode::config, "train config: t_samples must exceed n_elements");
        if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
            fail(ErrorCode::config, "train config: adam betas must lie in [0, 1)");
        if (!(adam_epsilon > 0.0))
            fail(ErrorCode::config, "train config: adam_epsilon must be > 0");
    }

    double alpha_schedule(std::size_t epoch, const TrainConfig &config)
    {
        if (epoch < 1 || epoch > config.n_epochs)
            fail(ErrorCode::invalid_argument, "alpha schedule: epoch " + std::to_string(epoch) + " outside [1, " +
                                                  std::to_string(config.n_epochs) + "]");
        if (config.n_epochs == 1)
            return config.alpha_init;
        return config.alpha_init +
               (config.alpha_final - config.alpha_init) * double(epoch - 1) / double(config.n_epochs - 1);
    }

    TrainDiverged::TrainDiverged(std::size_t epoch, std::vector<LossBreakdown> history)
        : Error(ErrorCode::diverged, "training diverged: non-finite loss at epoch " + std::to_string(epoch)),
          epoch_(epoch), history_(std::move(history))
    {
    }

    namespace
    {
        RealMatrix split(const ComplexMatrix &q)
        {
            RealMatrix p(q.rows(), 2 * q.cols());
            p.leftCols(q.cols()) = q.real();
            p.rightCols(q.cols()) = q.imag();
            return p;
        }

        ComplexMatrix join(const RealMatrix &p)
        {
            const auto n = p.cols() / 2;
            ComplexMatrix q(p.rows(), n);
            q.real() = p.leftCols(n);
            q.imag() = p.rightCols(n);
            return q;
        }

        SelectionModel initial_model(std::size_t m, std::size_t n, std::uint64_t seed)
        {
            std::mt19937_64 rng(derive_seed(seed, seed_stream::biases));
            return SelectionModel::random(m, n, rng, 0.1);
        }

        Precoder initial_precoder(std::size_t n, std::uint64_t seed)
        {
            std::mt19937_64 rng(derive_seed(seed, seed_stream::precoder));
            return Precoder::random(n, rng);
        }

        const ArrayGeometry &validated(const ArrayGeometry &geom, std::size_t m_select, const TrainConfig &config)
        {
            config.validate(geom);
            if (m_select < 1 || m_select > geom.n_elements())
                fail(ErrorCode::config, "train: select_m must lie in [1, n_elements]");
            return geom;
        }
    } // namespace

    Trainer::Trainer(const ArrayGeometry &geom, const BeamScenario &scenario, std::size_t m_select,
                     const TrainConfig &config)
        : config_(config), target_(make_target(scenario, validated(geom, m_select, config))),
          excitation_(generate_excitation(geom.n_elements(), config.t_samples,
                                          derive_seed(config.seed, seed_stream::excitation))),
          model_(initial_model(m_select, geom.n_elements(), config.seed)),
          q_(initial_precoder(geom.n_elements(), config.seed)),
          bias_opt_(m_select * geom.n_elements(), config.adam()),
          q_opt_(2 * geom.n_elements() * geom.n_elements(), config.adam())
    {
    }

    void Trainer::bias_stage(double alpha)
    {
        RealMatrix b = model_.biases();
        for (std::size_t s = 0; s < config_.n_steps; ++s)
        {
            const auto g = gradients(SelectionModel(b), q_, excitation_, target_, alpha, GradientParts::biases_only);
            if (!std::isfinite(g.loss.total) || !g.biases.allFinite())
                fail(ErrorCode::diverged, "non-finite loss in bias stage");
            bias_opt_.step(as_span(b), as_span(g.biases));
        }
        model_ = SelectionModel(std::move(b));
    }

    void Trainer::q_stage(double alpha)
    {
        RealMatrix params = split(q_.q());
        RealMatrix grads(params.rows(), params.cols());
        const auto n = q_.q().cols();
        for (std::size_t s = 0; s < config_.n_steps; ++s)
        {
            const auto g = gradients(model_, Precoder(join(params)), excitation_, target_, alpha, GradientParts::q_only);
            if (!std::isfinite(g.loss.total) || !g.q_re.allFinite() || !g.q_im.allFinite())
                fail(ErrorCode::diverged, "non-finite loss in precoder stage");
            grads.leftCols(n) = g.q_re;
            grads.rightCols(n) = g.q_im;
            q_opt_.step(as_span(params), as_span(grads));
        }
        q_ = Precoder(join(params));
    }

    LossBreakdown Trainer::run_epoch(std::size_t epoch)
    {
        const double alpha = alpha_schedule(epoch, config_);
        bias_stage(alpha);
        q_stage(alpha);
        return loss(alpha);
    }

    LossBreakdown Trainer::loss(double alpha) const
    {
        return total_loss(model_, q_, excitation_, target_, alpha);
    }

    QFit refine_q(const HardSelection &selection, const BeamTarget &target, Precoder start, std::size_t steps,
                  const AdamConfig &adam)
    {
        const RealMatrix s = selection.matrix();
        RealMatrix params = split(start.q());
        RealMatrix grads(params.rows(), params.cols());
        const auto n = start.q().cols();
        Adam opt(std::size_t(params.size()), adam);

        QFit best{start, exact_fit(s, start.q(), target, false).fit};
        if (!std::isfinite(best.fit))
            fail(ErrorCode::diverged, "precoder refinement: non-finite initial loss");
        for (std::size_t step = 0; step < steps; ++step)
        {
            const auto f = exact_fit(s, join(params), target, true);
            if (!std::isfinite(f.fit) || !f.grad_q.allFinite())
                fail(ErrorCode::diverged, "precoder refinement: non-finite loss at step " + std::to_string(step));
            if (f.fit < best.fit)
                best = {Precoder(join(params)), f.fit};
            grads.leftCols(n) = f.grad_q.real();
            grads.rightCols(n) = f.grad_q.imag();
            opt.step(as_span(params), as_span(grads));
        }
        const double last = exact_fit(s, join(params), target, false).fit;
        if (std::isfinite(last) && last < best.fit)
            best = {Precoder(join(params)), last};
        return best;
    }

    TrainResult train(const ArrayGeometry &geom, const BeamScenario &scenario, std::size_t m_select,
                      const TrainConfig &config, const ProgressFn &progress)
    {
        using clock = std::chrono::steady_clock;
        const auto start = clock::now();
        auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

        Trainer trainer(geom, scenario, m_select, config);
        std::vector<LossBreakdown> history;
        history.reserve(config.n_epochs);

        for (std::size_t epoch = 1; epoch <= config.n_epochs; ++epoch)
        {
            LossBreakdown l;
            try
            {
                l = trainer.run_epoch(epoch);
            }
            catch (const Error &e)
            {
                if (e.code() == ErrorCode::diverged)
                    throw TrainDiverged(epoch, std::move(history));
                throw;
            }
            if (!std::isfinite(l.total))
                throw TrainDiverged(epoch, std::move(history));
            history.push_back(l);
            if (progress)
                progress({epoch, l, elapsed()});
        }

        const RealMatrix soft = soft_selection(trainer.model());
        bool degraded = false;
        std::optional<HardSelection> selection;
        double entropy = 0.0;
        try
        {
            auto report = harden(soft);
            selection = report.selection;
            entropy = report.max_row_entropy;
        }
        catch (const DuplicateSelection &)
        {
            selection = harden_greedy(soft);
            degraded = true;
            for (Eigen::Index m = 0; m < soft.rows(); ++m)
            {
                double h = 0.0;
                for (Eigen::Index i = 0; i < soft.cols(); ++i)
                    if (soft(m, i) > 0.0)
                        h -= soft(m, i) * std::log(soft(m, i));
                entropy = std::max(entropy, h);
            }
        }

        Precoder q = trainer.precoder();
        if (config.reoptimize_q_after_harden)
            q = refine_q(*selection, trainer.target(), q, config.n_steps * 10, config.adam()).q;

        const auto fit = exact_fit(selection->matrix(), q.q(), trainer.target(), false);
        return TrainResult{*selection,    std::move(q), std::move(history),      fit.pattern, fit.fit,
                           orthogonality_penalty(soft), entropy, degraded, elapsed()};
    }
} // namespace l2s
