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

#ifndef L2S_TRAINER_HPP
#define L2S_TRAINER_HPP

#include "l2s/adam.hpp"
#include "l2s/loss.hpp"

#include <functional>
#include <optional>

namespace l2s
{
    struct TrainConfig
    {
        std::size_t n_epochs = 400;
        std::size_t n_steps = 10;
        double learning_rate = 0.01;
        double alpha_init = 5.0;
        double alpha_final = 25.0;
        std::size_t t_samples = 100;
        std::uint64_t seed = 0;
        double adam_beta1 = 0.9;
        double adam_beta2 = 0.999;
        double adam_epsilon = 1e-8;
        bool reoptimize_q_after_harden = true;

        AdamConfig adam() const { return {learning_rate, adam_beta1, adam_beta2, adam_epsilon}; }
        void validate(const ArrayGeometry &geom) const;

        bool operator==(const TrainConfig &) const = default;
    };

    // Linear ramp from alpha_init at epoch 1 to alpha_final at epoch n_epochs.
    double alpha_schedule(std::size_t epoch, const TrainConfig &config);

    struct EpochRecord
    {
        std::size_t epoch = 0;
        LossBreakdown loss;
        double elapsed_seconds = 0.0;
    };

    using ProgressFn = std::function<void(const EpochRecord &)>;

    struct TrainResult
    {
        HardSelection selection;
        Precoder q_final;
        std::vector<LossBreakdown> loss_history;
        std::vector<double> achieved_pattern; // expected pattern on the training grid, hard S
        double achieved_fit = 0.0;            // fit of achieved_pattern against the target
        double final_penalty = 0.0;           // of the soft selection at the end of training
        double max_row_entropy = 0.0;
        bool degraded = false;                // greedy fallback was used
        double wall_time_seconds = 0.0;
    };

    // Raised when the loss becomes non-finite. Carries the epochs completed so far.
    class TrainDiverged : public Error
    {
    public:
        TrainDiverged(std::size_t epoch, std::vector<LossBreakdown> history);
        std::size_t epoch() const noexcept { return epoch_; }
        const std::vector<LossBreakdown> &history() const noexcept { return history_; }

    private:
        std::size_t epoch_;
        std::vector<LossBreakdown> history_;
    };

    // Alternating optimizer state. train() drives it; exposed so stages can be
    // inspected individually.
    class Trainer
    {
    public:
        Trainer(const ArrayGeometry &geom, const BeamScenario &scenario, std::size_t m_select, const TrainConfig &config);

        // n_steps Adam updates of the biases with Q frozen.
        void bias_stage(double alpha);
        // n_steps Adam updates of Q with the biases frozen.
        void q_stage(double alpha);
        // Both stages for epoch (1-based); returns the loss after them.
        LossBreakdown run_epoch(std::size_t epoch);

        LossBreakdown loss(double alpha) const;

        const SelectionModel &model() const noexcept { return model_; }
        const Precoder &precoder() const noexcept { return q_; }
        const Excitation &excitation() const noexcept { return excitation_; }
        const BeamTarget &target() const noexcept { return target_; }
        const TrainConfig &config() const noexcept { return config_; }

    private:
        TrainConfig config_;
        BeamTarget target_;
        Excitation excitation_;
        SelectionModel model_;
        Precoder q_;
        Adam bias_opt_;
        Adam q_opt_;
    };

    TrainResult train(const ArrayGeometry &geom, const BeamScenario &scenario, std::size_t m_select,
                      const TrainConfig &config, const ProgressFn &progress = {});

    // Adam on Q alone against the exact-pattern fit with a fixed hard selection.
    // Returns the best Q seen and its fit.
    struct QFit
    {
        Precoder q;
        double fit;
    };

    QFit refine_q(const HardSelection &selection, const BeamTarget &target, Precoder start, std::size_t steps,
                  const AdamConfig &adam);
} // namespace l2s

#endif
