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

#ifndef L2S_ORACLE_HPP
#define L2S_ORACLE_HPP

#include "l2s/trainer.hpp"

#include <functional>

namespace l2s
{
    // Exhaustive search over every M-subset of the array. Only meant for small
    // arrays where C(N, M) stays below `cap`.

    struct OracleConfig
    {
        std::size_t inner_steps = 2000;
        double learning_rate = 0.01;
        std::uint64_t seed = 0;
        std::uint64_t cap = 200000;
        std::size_t threads = 0; // 0 = hardware concurrency

        bool operator==(const OracleConfig &) const = default;
    };

    // C(n, m), saturating at UINT64_MAX.
    std::uint64_t binomial(std::uint64_t n, std::uint64_t m);

    // Visits every m-subset of [0, n) in lexicographic order. Throws
    // cap_exceeded when C(n, m) > cap.
    void enumerate_selections(std::size_t n, std::size_t m, std::uint64_t cap,
                              const std::function<void(const HardSelection &)> &visit);

    std::vector<HardSelection> enumerate_selections(std::size_t n, std::size_t m, std::uint64_t cap);

    // Position of the subset in lexicographic enumeration order.
    std::uint64_t lexicographic_rank(const HardSelection &selection);

    // Seed used for the Q initialization of a given subset.
    std::uint64_t subset_seed(std::uint64_t master, const HardSelection &selection);

    struct SelectionFit
    {
        HardSelection selection;
        Precoder q;
        double fit_loss;
    };

    SelectionFit optimize_q_fixed_selection(const HardSelection &selection, const ArrayGeometry &geom,
                                            const BeamScenario &scenario, std::size_t inner_steps, double lr,
                                            std::uint64_t seed);

    // Same as above with the seed and step settings the oracle would use for this subset.
    SelectionFit score_selection(const HardSelection &selection, const ArrayGeometry &geom,
                                 const BeamScenario &scenario, const OracleConfig &config);

    struct RankedSelection
    {
        HardSelection selection;
        double fit_loss;
    };

    struct OracleResult
    {
        HardSelection best_selection;
        double best_fit_loss;
        std::vector<RankedSelection> ranked; // ascending fit_loss
        std::uint64_t evaluated_count;
    };

    OracleResult brute_force_best(const ArrayGeometry &geom, const BeamScenario &scenario, std::size_t m_select,
                                  const OracleConfig &config);
} // namespace l2s

#endif
