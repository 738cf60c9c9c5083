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

#include "l2s/loss.hpp"

#include <cmath>

namespace l2s
{
    Excitation generate_excitation(std::size_t n, std::size_t t, std::uint64_t seed)
    {
        if (t <= n)
            fail(ErrorCode::config, "excitation: T (" + std::to_string(t) + ") must exceed N (" + std::to_string(n) + ")");
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> dist(0.0, std::sqrt(0.5));
        Excitation e{ComplexMatrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t)), seed};
        for (Eigen::Index c = 0; c < e.samples.cols(); ++c)
            for (Eigen::Index r = 0; r < e.samples.rows(); ++r)
            {
                const double re = dist(rng);
                const double im = dist(rng);
                e.samples(r, c) = Complex(re, im);
            }
        return e;
    }

    Precoder::Precoder(ComplexMatrix q) : q_(std::move(q))
    {
        require_dims(q_.rows() == q_.cols() && q_.rows() > 0, "precoder: Q must be square and non-empty");
        if (!q_.allFinite())
            fail(ErrorCode::invalid_argument, "precoder: non-finite entry");
    }

    Precoder Precoder::random(std::size_t n, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> dist(0.0, std::sqrt(0.5 / double(n)));
        ComplexMatrix q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (Eigen::Index c = 0; c < q.cols(); ++c)
            for (Eigen::Index r = 0; r < q.rows(); ++r)
            {
                const double re = dist(rng);
                const double im = dist(rng);
                q(r, c) = Complex(re, im);
            }
        return Precoder(std::move(q));
    }

    BeamTarget make_target(const BeamScenario &scenario, const ArrayGeometry &geom)
    {
        return {steering_matrix(scenario, geom), scenario.desired_power(), scenario.weights()};
    }

    double fit_loss(std::span<const double> desired, std::span<const double> achieved, std::span<const double> weights)
    {
        require_dims(desired.size() == achieved.size() && desired.size() == weights.size(),
                     "fit_loss: vector lengths differ");
        double sum = 0.0;
        for (std::size_t k = 0; k < desired.size(); ++k)
        {
            const double r = desired[k] - achieved[k];
            sum += weights[k] * r * r;
        }
        return sum;
    }

    namespace
    {
        void check_shapes(const RealMatrix &soft, const Precoder &q, const Excitation &e, const ComplexMatrix &steering)
        {
            const auto n = Eigen::Index(q.n());
            require_dims(soft.cols() == n, "loss: selection columns must equal N");
            require_dims(e.samples.rows() == n, "loss: excitation rows must equal N");
            require_dims(steering.rows() == n, "loss: steering matrix rows must equal N");
        }

        // Forward pass shared by total_loss and gradients so both return the
        // same loss value bit for bit.
        struct Forward
        {
            ComplexMatrix g;  // S A        (M x K)
            ComplexMatrix v;  // Q E        (N x T)
            ComplexMatrix h;  // S Q E      (M x T)
            ComplexMatrix y;  // A^H S^T S Q E (K x T)
            std::vector<double> power;
        };

        Forward forward(const RealMatrix &soft, const Precoder &q, const Excitation &e, const ComplexMatrix &steering)
        {
            check_shapes(soft, q, e, steering);
            Forward f;
            const ComplexMatrix s = soft.cast<Complex>();
            f.g.noalias() = s * steering;
            f.v.noalias() = q.q() * e.samples;
            f.h.noalias() = s * f.v;
            f.y.noalias() = f.g.adjoint() * f.h;
            const double inv_t = 1.0 / double(e.t());
            f.power.resize(std::size_t(f.y.rows()));
            for (Eigen::Index k = 0; k < f.y.rows(); ++k)
                f.power[std::size_t(k)] = f.y.row(k).squaredNorm() * inv_t;
            return f;
        }

        LossBreakdown combine(double fit, double penalty, double alpha)
        {
            return {fit + alpha * penalty, fit, penalty, alpha};
        }

        void check_alpha(double alpha)
        {
            if (!(alpha >= 0.0) || !std::isfinite(alpha))
                fail(ErrorCode::invalid_argument, "loss: alpha must be finite and >= 0");
        }
    } // namespace

    std::vector<double> empirical_power(const RealMatrix &soft, const Precoder &q, const Excitation &e,
                                        const ComplexMatrix &steering)
    {
        return forward(soft, q, e, steering).power;
    }

    LossBreakdown total_loss(const SelectionModel &model, const Precoder &q, const Excitation &e,
                             const BeamTarget &target, double alpha)
    {
        check_alpha(alpha);
        const RealMatrix soft = soft_selection(model);
        const Forward f = forward(soft, q, e, target.steering);
        return combine(fit_loss(target.desired, f.power, target.weights), orthogonality_penalty(soft), alpha);
    }

    Gradients gradients(const SelectionModel &model, const Precoder &q, const Excitation &e, const BeamTarget &target,
                        double alpha, GradientParts parts)
    {
        check_alpha(alpha);
        const RealMatrix soft = soft_selection(model);
        const Forward f = forward(soft, q, e, target.steering);

        Gradients out;
        out.loss = combine(fit_loss(target.desired, f.power, target.weights), orthogonality_penalty(soft), alpha);

        // dL/dY (conjugate-gradient convention d/dRe + j d/dIm):
        //   dL/dp~_k = -2 gamma_k (p_k - p~_k),  dp~_k/dY_kt -> (2/T) Y_kt
        const double two_over_t = 2.0 / double(e.t());
        RealVector scale(f.y.rows());
        for (Eigen::Index k = 0; k < f.y.rows(); ++k)
        {
            const auto ku = std::size_t(k);
            scale(k) = -2.0 * target.weights[ku] * (target.desired[ku] - f.power[ku]) * two_over_t;
        }
        const ComplexMatrix gy = scale.cast<Complex>().asDiagonal() * f.y;

        // Y = G^H H: dL/dH = G gy, dL/dG = H gy^H
        const ComplexMatrix gh = f.g * gy;

        if (parts != GradientParts::q_only)
        {
            const ComplexMatrix gg = f.h * gy.adjoint();
            RealMatrix gs = (gg * target.steering.adjoint()).real();
            gs.noalias() += (gh * f.v.adjoint()).real();

            RealMatrix d = soft * soft.transpose();
            d.diagonal().array() -= 1.0;
            gs.noalias() += (4.0 * alpha) * (d * soft);

            // softmax backward per row: s .* (g - <s, g>)
            RealMatrix gb(soft.rows(), soft.cols());
            for (Eigen::Index m = 0; m < soft.rows(); ++m)
            {
                const double dot = soft.row(m).dot(gs.row(m));
                gb.row(m) = soft.row(m).array() * (gs.row(m).array() - dot);
            }
            out.biases = std::move(gb);
        }

        if (parts != GradientParts::biases_only)
        {
            // H = S V, V = Q E: dL/dV = S^T gh, dL/dQ = dL/dV E^H
            const ComplexMatrix gv = soft.transpose().cast<Complex>() * gh;
            const ComplexMatrix gq = gv * e.samples.adjoint();
            out.q_re = gq.real();
            out.q_im = gq.imag();
        }
        return out;
    }

    ExactFit exact_fit(const RealMatrix &selection, const ComplexMatrix &q, const BeamTarget &target, bool with_gradient)
    {
        require_dims(q.rows() == q.cols(), "exact_fit: Q must be square");
        require_dims(selection.cols() == q.rows() && target.steering.rows() == q.rows(),
                     "exact_fit: dimension mismatch");
        const ComplexMatrix s = selection.cast<Complex>();
        const ComplexMatrix z = s.transpose() * (s * target.steering); // S^T S A
        const ComplexMatrix w = q.adjoint() * z;                        // N x K

        ExactFit out;
        out.pattern.resize(std::size_t(w.cols()));
        for (Eigen::Index k = 0; k < w.cols(); ++k)
            out.pattern[std::size_t(k)] = w.col(k).squaredNorm();
        out.fit = fit_loss(target.desired, out.pattern, target.weights);

        if (with_gradient)
        {
            // p^_k = ||W_k||^2, dL/dW_k = -4 gamma_k (p_k - p^_k) W_k; W = Q^H Z => dL/dQ = Z (dL/dW)^H
            RealVector scale(w.cols());
            for (Eigen::Index k = 0; k < w.cols(); ++k)
            {
                const auto ku = std::size_t(k);
                scale(k) = -4.0 * target.weights[ku] * (target.desired[ku] - out.pattern[ku]);
            }
            const ComplexMatrix gw = w * scale.cast<Complex>().asDiagonal();
            out.grad_q = z * gw.adjoint();
        }
        return out;
    }
} // namespace l2s
