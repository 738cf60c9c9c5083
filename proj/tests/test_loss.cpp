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
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace l2s;

namespace
{
    struct Instance
    {
        ArrayGeometry geom;
        std::vector<double> angles;
        BeamTarget target;
        SelectionModel model;
        Precoder q;
        Excitation e;
    };

    Instance make_instance(std::size_t n, std::size_t m, std::size_t k, std::size_t t, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const ArrayGeometry geom(n, 0.5);
        std::vector<double> angles(k), desired(k), weights(k);
        for (std::size_t i = 0; i < k; ++i)
        {
            angles[i] = -80.0 + 160.0 * (double(i) + u(rng) * 0.9) / double(k);
            desired[i] = u(rng) < 0.4 ? 0.0 : 2.0 * u(rng);
            weights[i] = 0.5 + u(rng);
        }
        const BeamScenario scn(angles, desired, weights);
        return {geom,
                angles,
                make_target(scn, geom),
                SelectionModel(support::to_eigen(oracle::random_grid(m, n, rng))),
                Precoder(support::to_eigen(oracle::random_cgrid(n, n, rng, 0.5))),
                generate_excitation(n, t, seed + 1000)};
    }

    double loss_at(const Instance &x, const RealMatrix &b, const ComplexMatrix &q, double alpha)
    {
        return total_loss(SelectionModel(b), Precoder(q), x.e, x.target, alpha).total;
    }

    // Excitation whose sample covariance is exactly the identity: rows of a
    // T x T unitary scaled by sqrt(T).
    Excitation white_exact(std::size_t n, std::size_t t, std::mt19937_64 &rng)
    {
        const auto u = support::random_unitary(t, rng);
        return {std::sqrt(double(t)) * u.topRows(Eigen::Index(n)), 0};
    }

    double pattern_error(const std::vector<double> &a, const std::vector<double> &b)
    {
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k)
        {
            num += (a[k] - b[k]) * (a[k] - b[k]);
            den += b[k] * b[k];
        }
        return std::sqrt(num / den);
    }
} // namespace

TEST_SUITE("loss")
{
    TEST_CASE("excitation determinism and statistics")
    {
        const auto a = generate_excitation(4, 50, 17);
        const auto b = generate_excitation(4, 50, 17);
        const auto c = generate_excitation(4, 50, 18);
        CHECK(a.samples == b.samples);
        CHECK(a.samples != c.samples);
        CHECK(a.seed == 17);

        const auto big = generate_excitation(4, 10000, 3);
        const ComplexMatrix cov = big.samples * big.samples.adjoint() / 10000.0;
        CHECK((cov - ComplexMatrix::Identity(4, 4)).norm() < 0.15);
        // circular: real and imaginary parts each carry half the power
        CHECK(big.samples.real().array().square().mean() == doctest::Approx(0.5).epsilon(0.05));
        CHECK(big.samples.imag().array().square().mean() == doctest::Approx(0.5).epsilon(0.05));

        CHECK(support::error_code([] { generate_excitation(4, 4, 1); }) == ErrorCode::config);
        CHECK(support::error_code([] { generate_excitation(4, 3, 1); }) == ErrorCode::config);
    }

    TEST_CASE("precoder validation")
    {
        CHECK(support::error_code([] { Precoder(ComplexMatrix::Zero(2, 3)); }) == ErrorCode::dimension);
        ComplexMatrix q = ComplexMatrix::Identity(2, 2);
        q(0, 1) = Complex(std::nan(""), 0.0);
        CHECK(support::error_code([&] { Precoder{q}; }) == ErrorCode::invalid_argument);

        std::mt19937_64 rng(4);
        ComplexMatrix acc = ComplexMatrix::Zero(5, 5);
        for (int i = 0; i < 2000; ++i)
        {
            const auto p = Precoder::random(5, rng);
            acc += p.q() * p.q().adjoint();
        }
        CHECK((acc / 2000.0 - ComplexMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 0.1);
    }

    TEST_CASE("empirical power examples")
    {
        const auto x = make_instance(5, 2, 6, 40, 1);
        const RealMatrix s = soft_selection(x.model);
        const auto zero = empirical_power(s, Precoder(ComplexMatrix::Zero(5, 5)), x.e, x.target.steering);
        for (double v : zero)
            CHECK(v == 0.0);

        std::mt19937_64 rng(12);
        const auto e = white_exact(5, 40, rng);
        CHECK((e.samples * e.samples.adjoint() / 40.0 - ComplexMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
        const auto p = empirical_power(RealMatrix::Identity(5, 5), Precoder(ComplexMatrix::Identity(5, 5)), e,
                                       x.target.steering);
        const auto exact = exact_beampattern(RealMatrix::Identity(5, 5), ComplexMatrix::Identity(5, 5), x.target.steering);
        for (std::size_t k = 0; k < p.size(); ++k)
        {
            CHECK(p[k] == doctest::Approx(5.0).epsilon(1e-12));
            CHECK(p[k] == doctest::Approx(exact[k]).epsilon(1e-12));
        }
    }

    TEST_CASE("empirical power matches the scalar reference")
    {
        const auto x = make_instance(4, 2, 5, 9, 77);
        const RealMatrix s = soft_selection(x.model);
        const auto got = empirical_power(s, x.q, x.e, x.target.steering);
        const auto want = oracle::empirical_power(support::to_grid(s), support::to_grid(x.q.q()),
                                                  support::to_grid(x.e.samples), x.angles, 0.5);
        for (std::size_t k = 0; k < got.size(); ++k)
            CHECK(support::rel_diff(got[k], want[k]) < 1e-12);
    }

    TEST_CASE("empirical power converges to the exact pattern as T grows")
    {
        const auto x = make_instance(6, 3, 9, 100, 5);
        const RealMatrix s = soft_selection(x.model);
        const auto exact = exact_beampattern(s, x.q.q(), x.target.steering);

        // Error is averaged over a few excitation draws so the trend is not
        // decided by one unlucky sample.
        auto err = [&](std::size_t t) {
            double sum = 0.0;
            for (std::uint64_t seed = 0; seed < 5; ++seed)
                sum += pattern_error(empirical_power(s, x.q, generate_excitation(6, t, seed), x.target.steering), exact);
            return sum / 5.0;
        };
        const double e2 = err(100), e3 = err(1000), e5 = err(100000);
        CHECK(e2 < 0.35);
        CHECK(e5 < 0.02);
        CHECK(e3 < e2);
        CHECK(e5 < e3);
    }

    TEST_CASE("fit loss examples")
    {
        const std::vector<double> p{1.0, 0.0};
        CHECK(fit_loss(p, p, std::vector<double>{3.0, 4.0}) == 0.0);
        CHECK(fit_loss(p, std::vector<double>{0.0, 1.0}, std::vector<double>{1.0, 1.0}) == 2.0);
        CHECK(fit_loss(p, std::vector<double>{0.5, 0.5}, std::vector<double>{2.0, 1.0}) == 0.75);
        CHECK(support::error_code([&] { fit_loss(p, std::vector<double>{0.5}, std::vector<double>{2.0, 1.0}); }) ==
              ErrorCode::dimension);
    }

    TEST_CASE("total loss composition")
    {
        const auto x = make_instance(5, 3, 7, 12, 9);
        const auto l = total_loss(x.model, x.q, x.e, x.target, 2.5);

        const auto s = oracle::softmax(support::to_grid(x.model.biases()));
        const auto pt = oracle::empirical_power(s, support::to_grid(x.q.q()), support::to_grid(x.e.samples), x.angles, 0.5);
        const double fit = oracle::fit(x.target.desired, pt, x.target.weights);
        const double pen = oracle::penalty(s);
        CHECK(support::rel_diff(l.fit, fit) < 1e-11);
        CHECK(support::rel_diff(l.penalty, pen) < 1e-11);
        CHECK(support::rel_diff(l.total, fit + 2.5 * pen) < 1e-11);
        CHECK(l.alpha == 2.5);
        CHECK(std::abs(l.total - (l.fit + l.alpha * l.penalty)) <= 1e-12 * std::max(1.0, l.total));

        const auto l0 = total_loss(x.model, x.q, x.e, x.target, 0.0);
        CHECK(l0.total == l0.fit);
        CHECK(support::error_code([&] { total_loss(x.model, x.q, x.e, x.target, -1.0); }) == ErrorCode::invalid_argument);
    }

    TEST_CASE("hard biases make the penalty vanish")
    {
        const auto x = make_instance(6, 3, 5, 20, 2);
        RealMatrix b = RealMatrix::Constant(3, 6, -40.0);
        b(0, 1) = b(1, 3) = b(2, 4) = 40.0;
        const auto l = total_loss(SelectionModel(b), x.q, x.e, x.target, 25.0);
        CHECK(l.penalty < 1e-30);
        CHECK(l.total == doctest::Approx(l.fit).epsilon(1e-12));
    }

    TEST_CASE("gradients match central differences")
    {
        for (std::uint64_t seed : {1u, 2u, 3u})
            for (double alpha : {0.0, 1.0, 25.0})
            {
                const auto x = make_instance(6, 3, 7, 20, seed);
                const auto g = gradients(x.model, x.q, x.e, x.target, alpha);
                REQUIRE(g.biases.rows() == 3);
                REQUIRE(g.q_re.rows() == 6);

                std::mt19937_64 rng(seed * 31 + 7);
                const std::size_t nb = 18, nq = 36;
                std::uniform_int_distribution<std::size_t> pick(0, nb + 2 * nq - 1);
                const double h = 1e-5;
                for (int c = 0; c < 50; ++c)
                {
                    const std::size_t idx = pick(rng);
                    RealMatrix bp = x.model.biases(), bm = bp;
                    ComplexMatrix qp = x.q.q(), qm = qp;
                    double analytic;
                    if (idx < nb)
                    {
                        bp.data()[idx] += h;
                        bm.data()[idx] -= h;
                        analytic = g.biases.data()[idx];
                    }
                    else if (idx < nb + nq)
                    {
                        const auto j = idx - nb;
                        qp.data()[j] += Complex(h, 0);
                        qm.data()[j] -= Complex(h, 0);
                        analytic = g.q_re.data()[j];
                    }
                    else
                    {
                        const auto j = idx - nb - nq;
                        qp.data()[j] += Complex(0, h);
                        qm.data()[j] -= Complex(0, h);
                        analytic = g.q_im.data()[j];
                    }
                    const double numeric = (loss_at(x, bp, qp, alpha) - loss_at(x, bm, qm, alpha)) / (2 * h);
                    const double err = std::abs(analytic - numeric) /
                                       std::max({std::abs(analytic), std::abs(numeric), 1e-8 / 1e-5});
                    CHECK(err < 1e-5);
                }
            }
    }

    TEST_CASE("gradient parts and bit-for-bit loss consistency")
    {
        const auto x = make_instance(5, 2, 6, 15, 21);
        const auto both = gradients(x.model, x.q, x.e, x.target, 3.0);
        const auto bo = gradients(x.model, x.q, x.e, x.target, 3.0, GradientParts::biases_only);
        const auto qo = gradients(x.model, x.q, x.e, x.target, 3.0, GradientParts::q_only);
        const auto l = total_loss(x.model, x.q, x.e, x.target, 3.0);
        CHECK(both.loss.total == l.total);
        CHECK(both.loss.fit == l.fit);
        CHECK(both.loss.penalty == l.penalty);
        CHECK(bo.q_re.size() == 0);
        CHECK(qo.biases.size() == 0);
        CHECK(bo.biases == both.biases);
        CHECK(qo.q_re == both.q_re);
        CHECK(qo.q_im == both.q_im);
    }

    TEST_CASE("gradients vanish with Q = 0 and alpha = 0")
    {
        const auto x = make_instance(6, 3, 7, 20, 4);
        const auto g = gradients(x.model, Precoder(ComplexMatrix::Zero(6, 6)), x.e, x.target, 0.0);
        CHECK(g.biases.cwiseAbs().maxCoeff() == 0.0);
        CHECK(g.q_re.cwiseAbs().maxCoeff() == 0.0);
        CHECK(g.q_im.cwiseAbs().maxCoeff() == 0.0);
    }

    TEST_CASE("gradients vanish at a constructed minimum")
    {
        // Target is exactly the pattern produced by a nearly hard selection,
        // so the fit residual is zero and the penalty is saturated.
        auto x = make_instance(6, 3, 7, 20, 6);
        RealMatrix b = RealMatrix::Constant(3, 6, -30.0);
        b(0, 0) = b(1, 2) = b(2, 5) = 30.0;
        const SelectionModel model(b);
        x.target.desired = empirical_power(soft_selection(model), x.q, x.e, x.target.steering);
        const auto g = gradients(model, x.q, x.e, x.target, 25.0);
        CHECK(g.loss.total < 1e-20);
        CHECK(g.biases.norm() < 1e-4);
        CHECK(std::sqrt(g.q_re.squaredNorm() + g.q_im.squaredNorm()) < 1e-4);
    }

    TEST_CASE("property: empirical power is unbiased for the exact pattern")
    {
        const auto x = make_instance(5, 2, 6, 20, 13);
        const RealMatrix s = soft_selection(x.model);
        const auto exact = exact_beampattern(s, x.q.q(), x.target.steering);
        const std::size_t runs = 200;
        std::vector<double> sum(exact.size(), 0.0), sq(exact.size(), 0.0);
        for (std::size_t r = 0; r < runs; ++r)
        {
            const auto p = empirical_power(s, x.q, generate_excitation(5, 20, 5000 + r), x.target.steering);
            for (std::size_t k = 0; k < p.size(); ++k)
            {
                sum[k] += p[k];
                sq[k] += p[k] * p[k];
            }
        }
        for (std::size_t k = 0; k < exact.size(); ++k)
        {
            const double mean = sum[k] / double(runs);
            const double var = (sq[k] - double(runs) * mean * mean) / double(runs - 1);
            const double se = std::sqrt(var / double(runs));
            CHECK(std::abs(mean - exact[k]) <= 3.0 * se);
        }
    }

    TEST_CASE("property: loss components are non-negative")
    {
        for (std::uint64_t seed = 0; seed < 40; ++seed)
        {
            const auto x = make_instance(3 + seed % 5, 1 + seed % 3, 2 + seed % 7, 10 + seed, seed);
            const auto l = total_loss(x.model, x.q, x.e, x.target, double(seed % 4));
            CHECK(l.fit >= 0.0);
            CHECK(l.penalty >= 0.0);
            CHECK(l.total >= 0.0);
        }
    }
}
