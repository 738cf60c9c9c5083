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

#ifndef L2S_LOSS_HPP
#define L2S_LOSS_HPP

#include "l2s/array.hpp"
#include "l2s/selection.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace l2s
{
    // White excitation, one snapshot e(t) per column (N x T). Entries are
    // circularly-symmetric complex Gaussian with unit variance.
    struct Excitation
    {
        ComplexMatrix samples;
        std::uint64_t seed = 0;

        std::size_t n() const noexcept { return std::size_t(samples.rows()); }
        std::size_t t() const noexcept { return std::size_t(samples.cols()); }
    };

    Excitation generate_excitation(std::size_t n, std::size_t t, std::uint64_t seed);

    // N x N precoding matrix; the transmit covariance is Q Q^H.
    class Precoder
    {
    public:
        explicit Precoder(ComplexMatrix q);

        // i.i.d. CN(0, 1/N) entries, so E[Q Q^H] = I.
        static Precoder random(std::size_t n, std::mt19937_64 &rng);

        const ComplexMatrix &q() const noexcept { return q_; }
        std::size_t n() const noexcept { return std::size_t(q_.rows()); }

    private:
        ComplexMatrix q_;
    };

    // Steering matrix plus the desired pattern and weights it is scored against.
    struct BeamTarget
    {
        ComplexMatrix steering; // N x K
        std::vector<double> desired;
        std::vector<double> weights;

        std::size_t size() const noexcept { return desired.size(); }
    };

    BeamTarget make_target(const BeamScenario &scenario, const ArrayGeometry &geom);

    struct LossBreakdown
    {
        double total = 0.0;
        double fit = 0.0;
        double penalty = 0.0;
        double alpha = 0.0;
    };

    // p~_k = (1/T) sum_t |a_k^H S^T S Q e(t)|^2
    std::vector<double> empirical_power(const RealMatrix &soft, const Precoder &q, const Excitation &e,
                                        const ComplexMatrix &steering);

    // sum_k gamma_k (p_k - p~_k)^2
    double fit_loss(std::span<const double> desired, std::span<const double> achieved, std::span<const double> weights);

    LossBreakdown total_loss(const SelectionModel &model, const Precoder &q, const Excitation &e,
                             const BeamTarget &target, double alpha);

    enum class GradientParts
    {
        both,
        biases_only,
        q_only,
    };

    // Gradients of the penalized loss. The complex precoder gradient is split
    // into d/dRe(Q) and d/dIm(Q). Parts that were not requested are left empty.
    struct Gradients
    {
        RealMatrix biases;
        RealMatrix q_re;
        RealMatrix q_im;
        LossBreakdown loss;
    };

    Gradients gradients(const SelectionModel &model, const Precoder &q, const Excitation &e, const BeamTarget &target,
                        double alpha, GradientParts parts = GradientParts::both);

    // Loss and Q-gradient of the deterministic fit sum_k gamma_k (p_k - p^_k)^2
    // where p^ is the expected pattern with a fixed selection matrix.
    struct ExactFit
    {
        double fit = 0.0;
        ComplexMatrix grad_q; // d/dRe + j d/dIm
        std::vector<double> pattern;
    };

    ExactFit exact_fit(const RealMatrix &selection, const ComplexMatrix &q, const BeamTarget &target, bool with_gradient);
} // namespace l2s

#endif
