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

#include "l2s/oracle.hpp"
#include "l2s/rng.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace l2s
{
    std::uint64_t binomial(std::uint64_t n, std::uint64_t m)
    {
        if (m > n)
            return 0;
        m = std::min(m, n - m);
        unsigned __int128 c = 1;
        for (std::uint64_t i = 1; i <= m; ++i)
        {
            c = c * (n - m + i) / i;
            if (c > std::numeric_limits<std::uint64_t>::max())
                return std::numeric_limits<std::uint64_t>::max();
        }
        return std::uint64_t(c);
    }

    namespace
    {
        // Exact C(n, m) in decimal, for messages about counts past 64 bits.
        // Little-endian base 1e9 limbs; every partial product is an integer.
        std::string binomial_decimal(std::uint64_t n, std::uint64_t m)
        {
            m = std::min(m, n - m);
            std::vector<std::uint64_t> limbs{1};
            constexpr std::uint64_t base = 1000000000;
            for (std::uint64_t i = 1; i <= m; ++i)
            {
                std::uint64_t carry = 0;
                for (auto &l : limbs)
                {
                    const unsigned __int128 v = (unsigned __int128)l * (n - m + i) + carry;
                    l = std::uint64_t(v % base);
                    carry = std::uint64_t(v / base);
                }
                while (carry)
                {
                    limbs.push_back(carry % base);
                    carry /= base;
                }
                unsigned __int128 rem = 0;
                for (auto it = limbs.rbegin(); it != limbs.rend(); ++it)
                {
                    const unsigned __int128 v = rem * base + *it;
                    *it = std::uint64_t(v / i);
                    rem = v % i;
                }
                while (limbs.size() > 1 && limbs.back() == 0)
                    limbs.pop_back();
            }
            std::string out = std::to_string(limbs.back());
            for (auto it = limbs.rbegin() + 1; it != limbs.rend(); ++it)
            {
                const auto part = std::to_string(*it);
                out += std::string(9 - part.size(), '0') + part;
            }
            return out;
        }

        void check_cap(std::size_t n, std::size_t m, std::uint64_t cap)
        {
            if (m < 1 || m > n)
                fail(ErrorCode::invalid_argument, "enumerate: need 1 <= m <= n");
            const auto count = binomial(n, m);
            if (count > cap)
            {
                fail(ErrorCode::cap_exceeded, "C(" + std::to_string(n) + ", " + std::to_string(m) +
                                                  ") = " + binomial_decimal(n, m) +
                                                  " subsets exceeds the enumeration cap of " + std::to_string(cap));
            }
        }
    } // namespace

    void enumerate_selections(std::size_t n, std::size_t m, std::uint64_t cap,
                              const std::function<void(const HardSelection &)> &visit)
    {
        check_cap(n, m, cap);
        std::vector<std::size_t> idx(m);
        for (std::size_t i = 0; i < m; ++i)
            idx[i] = i;
        while (true)
        {
            visit(HardSelection(idx, n));
            // advance to next combination
            std::size_t i = m;
            while (i > 0 && idx[i - 1] == n - m + (i - 1))
                --i;
            if (i == 0)
                return;
            ++idx[i - 1];
            for (std::size_t j = i; j < m; ++j)
                idx[j] = idx[j - 1] + 1;
        }
    }

    std::vector<HardSelection> enumerate_selections(std::size_t n, std::size_t m, std::uint64_t cap)
    {
        std::vector<HardSelection> out;
        enumerate_selections(n, m, cap, [&](const HardSelection &s) { out.push_back(s); });
        return out;
    }

    std::uint64_t lexicographic_rank(const HardSelection &selection)
    {
        // Count subsets that precede this one lexicographically.
        const auto &idx = selection.indices();
        const std::size_t n = selection.n_elements();
        const std::size_t m = idx.size();
        std::uint64_t rank = 0;
        std::size_t prev = 0;
        for (std::size_t i = 0; i < m; ++i)
        {
            for (std::size_t v = (i == 0 ? 0 : prev + 1); v < idx[i]; ++v)
                rank += binomial(n - v - 1, m - i - 1);
            prev = idx[i];
        }
        return rank;
    }

    std::uint64_t subset_seed(std::uint64_t master, const HardSelection &selection)
    {
        return derive_seed(derive_seed(master, seed_stream::oracle), lexicographic_rank(selection));
    }

    SelectionFit optimize_q_fixed_selection(const HardSelection &selection, const ArrayGeometry &geom,
                                            const BeamScenario &scenario, std::size_t inner_steps, double lr,
                                            std::uint64_t seed)
    {
        if (inner_steps < 1)
            fail(ErrorCode::config, "oracle: inner_steps must be >= 1");
        if (selection.n_elements() != geom.n_elements())
            fail(ErrorCode::invalid_argument, "oracle: selection is for a different array size");
        const BeamTarget target = make_target(scenario, geom);
        std::mt19937_64 rng(seed);
        auto fit = refine_q(selection, target, Precoder::random(geom.n_elements(), rng), inner_steps,
                            AdamConfig{lr, 0.9, 0.999, 1e-8});
        return {selection, std::move(fit.q), fit.fit};
    }

    SelectionFit score_selection(const HardSelection &selection, const ArrayGeometry &geom,
                                 const BeamScenario &scenario, const OracleConfig &config)
    {
        return optimize_q_fixed_selection(selection, geom, scenario, config.inner_steps, config.learning_rate,
                                          subset_seed(config.seed, selection));
    }

    OracleResult brute_force_best(const ArrayGeometry &geom, const BeamScenario &scenario, std::size_t m_select,
                                  const OracleConfig &config)
    {
        const auto subsets = enumerate_selections(geom.n_elements(), m_select, config.cap);
        std::vector<double> losses(subsets.size());

        std::size_t workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
        workers = std::min(workers, subsets.size());
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto work = [&]
        {
            try
            {
                for (std::size_t i = next++; i < subsets.size(); i = next++)
                    losses[i] = score_selection(subsets[i], geom, scenario, config).fit_loss;
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next = subsets.size();
            }
        };
        if (workers <= 1)
            work();
        else
        {
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < workers; ++w)
                pool.emplace_back(work);
        }
        if (error)
            std::rethrow_exception(error);

        std::vector<RankedSelection> ranked;
        ranked.reserve(subsets.size());
        for (std::size_t i = 0; i < subsets.size(); ++i)
            ranked.push_back({subsets[i], losses[i]});
        // stable on lexicographic order for ties
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const RankedSelection &a, const RankedSelection &b) { return a.fit_loss < b.fit_loss; });
        return OracleResult{ranked.front().selection, ranked.front().fit_loss, std::move(ranked),
                            std::uint64_t(subsets.size())};
    }
} // namespace l2s
