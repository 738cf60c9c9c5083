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

#include "l2s/gradcheck.hpp"
#include "l2s/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace l2s
{
    double gradient_error(double analytic, double numeric, double tolerance, double abs_floor)
    {
        const double scale = std::max({std::abs(analytic), std::abs(numeric), abs_floor / tolerance});
        return std::abs(analytic - numeric) / scale;
    }

    double numeric_partial(const SelectionModel &model, const Precoder &q, const Excitation &e,
                           const BeamTarget &target, double alpha, std::size_t coord, double step)
    {
        const auto mn = std::size_t(model.biases().size());
        const auto nn = std::size_t(q.q().size());
        require_dims(coord < mn + 2 * nn, "numeric_partial: coordinate out of range");

        auto eval = [&](double delta)
        {
            if (coord < mn)
            {
                RealMatrix b = model.biases();
                b.data()[coord] += delta;
                return total_loss(SelectionModel(std::move(b)), q, e, target, alpha).total;
            }
            ComplexMatrix qq = q.q();
            const std::size_t c = coord - mn;
            if (c < nn)
                qq.data()[c] += Complex(delta, 0.0);
            else
                qq.data()[c - nn] += Complex(0.0, delta);
            return total_loss(model, Precoder(std::move(qq)), e, target, alpha).total;
        };
        return (eval(step) - eval(-step)) / (2.0 * step);
    }

    namespace
    {
        struct Instance
        {
            SelectionModel model;
            Precoder q;
            Excitation e;
            BeamTarget target;
            double alpha;
        };

        Instance random_instance(std::mt19937_64 &rng, const GradcheckOptions &o, std::size_t index, bool zero_q)
        {
            auto pick = [&](std::size_t lo, std::size_t hi)
            { return std::uniform_int_distribution<std::size_t>(lo, std::max(lo, hi))(rng); };
            std::uniform_real_distribution<double> uni(0.0, 1.0);
            std::normal_distribution<double> gauss(0.0, 1.0);

            const std::size_t n = pick(2, o.max_n);
            const std::size_t m = pick(1, std::min(o.max_m, n));
            const std::size_t k = pick(1, o.max_k);
            const std::size_t t = pick(n + 1, std::max(n + 1, o.max_t));
            static constexpr double alphas[] = {0.0, 1.0, 25.0};
            const double alpha = alphas[index % 3];

            std::set<double> angle_set;
            while (angle_set.size() < k)
                angle_set.insert(std::round((uni(rng) * 180.0 - 90.0) * 100.0) / 100.0);
            std::vector<double> angles(angle_set.begin(), angle_set.end());
            std::vector<double> power(k), weight(k);
            for (std::size_t i = 0; i < k; ++i)
            {
                power[i] = 2.0 * uni(rng);
                weight[i] = 0.5 + 1.5 * uni(rng);
            }
            const ArrayGeometry geom(n, 0.25 + 0.5 * uni(rng));
            const BeamScenario scenario(std::move(angles), std::move(power), std::move(weight));

            RealMatrix b(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
            for (Eigen::Index i = 0; i < b.size(); ++i)
                b.data()[i] = gauss(rng);
            Precoder q = Precoder::random(n, rng);
            if (zero_q)
                q = Precoder(ComplexMatrix::Zero(Eigen::Index(n), Eigen::Index(n)));
            return {SelectionModel(std::move(b)), std::move(q), generate_excitation(n, t, rng()),
                    make_target(scenario, geom), alpha};
        }
    } // namespace

    GradcheckReport run_gradcheck(const GradcheckOptions &o)
    {
        std::mt19937_64 rng(derive_seed(o.seed, 11));
        GradcheckReport report;
        const std::size_t total = o.instances + (o.include_zero_q ? 1 : 0);
        for (std::size_t inst = 0; inst < total; ++inst)
        {
            const bool zero_q = inst == o.instances;
            const Instance in = random_instance(rng, o, inst, zero_q);
            const auto g = gradients(in.model, in.q, in.e, in.target, in.alpha);

            const auto mn = std::size_t(g.biases.size());
            const auto nn = std::size_t(g.q_re.size());
            const std::size_t dim = mn + 2 * nn;
            std::vector<std::size_t> coords(dim);
            std::iota(coords.begin(), coords.end(), std::size_t{0});
            std::shuffle(coords.begin(), coords.end(), rng);
            coords.resize(std::min(dim, o.coords_per_instance));

            for (auto c : coords)
            {
                double analytic = c < mn ? g.biases.data()[c] : c < mn + nn ? g.q_re.data()[c - mn] : g.q_im.data()[c - mn - nn];
                analytic *= 1.0 + o.corrupt;
                const double numeric = numeric_partial(in.model, in.q, in.e, in.target, in.alpha, c, o.step);
                const double err = gradient_error(analytic, numeric, o.tolerance, o.abs_floor);
                if (err > report.worst_error || !std::isfinite(err))
                {
                    report.worst_error = std::isfinite(err) ? err : INFINITY;
                    report.worst_instance = inst;
                }
                ++report.coords;
            }
            ++report.instances;
        }
        report.passed = report.worst_error < o.tolerance;
        return report;
    }
} // namespace l2s
