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
#include "l2s/scenario.hpp"
#include "support.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace l2s;

namespace
{
    std::vector<std::vector<std::size_t>> indices_of(const std::vector<HardSelection> &v)
    {
        std::vector<std::vector<std::size_t>> out;
        for (const auto &s : v)
            out.push_back(s.indices());
        return out;
    }

    BeamScenario symmetric_scenario()
    {
        const auto angles = make_grid(-60.0, 60.0, 10.0);
        std::vector<double> p(angles.size(), 0.0);
        for (std::size_t k = 0; k < angles.size(); ++k)
            if (std::abs(std::abs(angles[k]) - 30.0) < 1e-9)
                p[k] = 1.0;
        return BeamScenario(angles, p, std::vector<double>(angles.size(), 1.0));
    }
} // namespace

TEST_SUITE("oracle")
{
    TEST_CASE("binomial")
    {
        CHECK(binomial(8, 3) == 56);
        CHECK(binomial(16, 8) == 12870);
        CHECK(binomial(5, 5) == 1);
        CHECK(binomial(3, 4) == 0);
        CHECK(binomial(100, 20) == std::numeric_limits<std::uint64_t>::max());
    }

    TEST_CASE("enumeration examples")
    {
        using V = std::vector<std::vector<std::size_t>>;
        CHECK(indices_of(enumerate_selections(3, 2, 100)) == V{{0, 1}, {0, 2}, {1, 2}});
        CHECK(indices_of(enumerate_selections(5, 5, 100)) == V{{0, 1, 2, 3, 4}});

        const auto all = indices_of(enumerate_selections(8, 3, 200000));
        CHECK(all.size() == 56);
        CHECK(std::set(all.begin(), all.end()).size() == 56);
        CHECK(std::is_sorted(all.begin(), all.end()));
        for (std::size_t i = 0; i < all.size(); ++i)
            CHECK(lexicographic_rank(HardSelection(all[i], 8)) == i);
    }

    TEST_CASE("enumeration refuses past the cap with the exact count")
    {
        try
        {
            enumerate_selections(100, 20, 200000);
            FAIL("expected cap_exceeded");
        }
        catch (const Error &e)
        {
            CHECK(e.code() == ErrorCode::cap_exceeded);
            CHECK(std::string(e.what()).find("535983370403809682970") != std::string::npos);
        }
        CHECK(support::error_code([] { enumerate_selections(8, 3, 55); }) == ErrorCode::cap_exceeded);
        CHECK(support::error_code([] { enumerate_selections(8, 3, 56); }) == std::nullopt);
        CHECK(support::error_code([] { enumerate_selections(4, 0, 10); }) == ErrorCode::invalid_argument);
        CHECK(support::error_code([] { enumerate_selections(4, 5, 10); }) == ErrorCode::invalid_argument);
    }

    TEST_CASE("subset seeds are distinct and stable")
    {
        std::set<std::uint64_t> seeds;
        for (const auto &s : enumerate_selections(8, 3, 100))
            seeds.insert(subset_seed(0, s));
        CHECK(seeds.size() == 56);
        const HardSelection s({1, 2, 5}, 8);
        CHECK(subset_seed(9, s) == subset_seed(9, s));
        CHECK(subset_seed(9, s) != subset_seed(10, s));
    }

    TEST_CASE("zero target drives the precoder to zero")
    {
        const ArrayGeometry g(6, 0.5);
        const auto angles = make_grid(-60.0, 60.0, 15.0);
        const BeamScenario zero(angles, std::vector<double>(angles.size(), 0.0), std::vector<double>(angles.size(), 1.0));
        // The fit is quartic in Q near zero, so fixed-rate Adam needs a long run.
        const auto r = optimize_q_fixed_selection(HardSelection({0, 2, 3}, 6), g, zero, 20000, 0.01, 5);
        CHECK(r.fit_loss < 1e-8);
    }

    TEST_CASE("full selection reaches N^2 at a single angle")
    {
        const ArrayGeometry g(4, 0.5);
        const BeamScenario one({20.0}, {16.0}, {1.0});
        const auto r = optimize_q_fixed_selection(HardSelection({0, 1, 2, 3}, 4), g, one, 2000, 0.01, 1);
        CHECK(r.fit_loss < 1e-6);
        const auto res = brute_force_best(g, one, 4, OracleConfig{});
        CHECK(res.ranked.size() == 1);
        CHECK(res.evaluated_count == 1);
    }

    TEST_CASE("inner optimizer is deterministic and seed-stable on the small scenario")
    {
        const auto scn = load_scenario(L2S_SCENARIO_DIR "/small_n8_m3.json");
        const auto bs = scn.training_scenario();
        REQUIRE(bs.size() == 15);
        const HardSelection best({1, 2, 5}, 8);
        const auto a = optimize_q_fixed_selection(best, scn.geometry, bs, 2000, 0.01, 1);
        const auto a2 = optimize_q_fixed_selection(best, scn.geometry, bs, 2000, 0.01, 1);
        const auto b = optimize_q_fixed_selection(best, scn.geometry, bs, 2000, 0.01, 2);
        CHECK(a.fit_loss == a2.fit_loss);
        CHECK(a.q.q() == a2.q.q());
        CHECK(support::rel_diff(a.fit_loss, b.fit_loss) < 0.05);
        // regression value of the oracle's own scoring of this subset
        CHECK(score_selection(best, scn.geometry, bs, scn.oracle).fit_loss == doctest::Approx(0.712675).epsilon(1e-5));
    }

    TEST_CASE("oracle table on the small scenario")
    {
        const auto scn = load_scenario(L2S_SCENARIO_DIR "/small_n8_m3.json");
        auto cfg = scn.oracle;
        cfg.threads = 1;
        const auto r = brute_force_best(scn.geometry, scn.training_scenario(), 3, cfg);
        CHECK(r.evaluated_count == 56);
        REQUIRE(r.ranked.size() == 56);
        std::set<std::vector<std::size_t>> seen;
        for (std::size_t i = 0; i < r.ranked.size(); ++i)
        {
            seen.insert(r.ranked[i].selection.indices());
            if (i > 0)
                CHECK(r.ranked[i - 1].fit_loss <= r.ranked[i].fit_loss);
        }
        CHECK(seen.size() == 56);
        CHECK(r.best_selection == r.ranked.front().selection);
        CHECK(r.best_fit_loss == r.ranked.front().fit_loss);

        // same table regardless of the worker count
        cfg.threads = 3;
        const auto p = brute_force_best(scn.geometry, scn.training_scenario(), 3, cfg);
        for (std::size_t i = 0; i < r.ranked.size(); ++i)
        {
            CHECK(p.ranked[i].selection == r.ranked[i].selection);
            CHECK(p.ranked[i].fit_loss == r.ranked[i].fit_loss);
        }

        // every entry is what scoring that subset alone returns
        for (std::size_t i = 0; i < r.ranked.size(); i += 11)
            CHECK(score_selection(r.ranked[i].selection, scn.geometry, scn.training_scenario(), scn.oracle).fit_loss ==
                  r.ranked[i].fit_loss);
    }

    TEST_CASE("mirrored subsets score alike on a symmetric target")
    {
        const ArrayGeometry g(6, 0.5);
        OracleConfig cfg;
        cfg.threads = 1;
        const auto r = brute_force_best(g, symmetric_scenario(), 3, cfg);
        REQUIRE(r.ranked.size() == 20);
        std::map<std::vector<std::size_t>, double> table;
        for (const auto &e : r.ranked)
            table[e.selection.indices()] = e.fit_loss;
        for (const auto &[sel, loss] : table)
        {
            std::vector<std::size_t> mirror;
            for (auto i : sel)
                mirror.push_back(5 - i);
            std::sort(mirror.begin(), mirror.end());
            CHECK(support::rel_diff(loss, table.at(mirror)) < 0.10);
        }
    }

    TEST_CASE("oracle refuses the large scenario")
    {
        const auto scn = load_scenario(L2S_SCENARIO_DIR "/exp3_n100_m20.json");
        CHECK(support::error_code([&] { brute_force_best(scn.geometry, scn.training_scenario(), scn.select_m, scn.oracle); }) ==
              ErrorCode::cap_exceeded);
    }
}
