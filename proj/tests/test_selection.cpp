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

#include "l2s/selection.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>

using namespace l2s;

namespace
{
    RealMatrix rows(std::initializer_list<std::initializer_list<double>> r)
    {
        oracle::Grid g;
        for (const auto &row : r)
            g.emplace_back(row);
        return support::to_eigen(g);
    }

    RealMatrix one_hot(std::size_t n, std::initializer_list<std::size_t> cols)
    {
        RealMatrix s = RealMatrix::Zero(Eigen::Index(cols.size()), Eigen::Index(n));
        Eigen::Index r = 0;
        for (auto c : cols)
            s(r++, Eigen::Index(c)) = 1.0;
        return s;
    }
} // namespace

TEST_SUITE("selection")
{
    TEST_CASE("model validation")
    {
        CHECK(support::error_code([] { SelectionModel(RealMatrix::Zero(5, 4)); }) == ErrorCode::invalid_argument);
        CHECK(support::error_code([] { SelectionModel(RealMatrix::Zero(2, 1)); }) == ErrorCode::invalid_argument);
        RealMatrix bad = RealMatrix::Zero(2, 4);
        bad(1, 2) = std::numeric_limits<double>::infinity();
        CHECK(support::error_code([&] { SelectionModel{bad}; }) == ErrorCode::invalid_argument);
        bad(1, 2) = std::numeric_limits<double>::quiet_NaN();
        CHECK(support::error_code([&] { SelectionModel{bad}; }) == ErrorCode::invalid_argument);
        // M = N is the degenerate full selection
        CHECK(support::error_code([] { SelectionModel(RealMatrix::Zero(4, 4)); }) == std::nullopt);
    }

    TEST_CASE("random model uses the requested spread")
    {
        std::mt19937_64 a(5), b(5);
        const auto m1 = SelectionModel::random(40, 50, a, 0.1);
        const auto m2 = SelectionModel::random(40, 50, b, 0.1);
        CHECK(m1.biases() == m2.biases());
        const double mean = m1.biases().mean();
        const double sd = std::sqrt((m1.biases().array() - mean).square().mean());
        CHECK(std::abs(mean) < 0.01);
        CHECK(sd == doctest::Approx(0.1).epsilon(0.05));
    }

    TEST_CASE("soft selection examples")
    {
        const auto uniform = soft_selection(SelectionModel(RealMatrix::Zero(3, 4)));
        CHECK((uniform.array() == 0.25).all());

        const auto peaked = soft_selection(SelectionModel(rows({{10, 0, 0, 0}})));
        const auto ref = oracle::softmax({{10, 0, 0, 0}});
        CHECK(peaked(0, 0) == doctest::Approx(0.99986).epsilon(1e-5));
        for (Eigen::Index i = 0; i < 4; ++i)
            CHECK(std::abs(peaked(0, i) - ref[0][std::size_t(i)]) < 1e-15);
        CHECK(peaked(0, 1) == peaked(0, 2));
        CHECK(peaked(0, 2) == peaked(0, 3));

        const RealMatrix b = rows({{0.3, -1.2, 2.0, 0.1}, {1, 2, 3, 4}});
        RealMatrix shifted = b;
        shifted.row(0).array() += 123.0;
        const auto s0 = soft_selection(SelectionModel(b));
        const auto s1 = soft_selection(SelectionModel(shifted));
        CHECK((s0.row(0) - s1.row(0)).cwiseAbs().maxCoeff() < 1e-15);
        CHECK(s0.row(1) == s1.row(1));
    }

    TEST_CASE("softmax survives large biases")
    {
        const auto s = softmax_rows(rows({{1000, 0, -1000}, {-800, -800, -799}}));
        CHECK(s.allFinite());
        CHECK(s(0, 0) == 1.0);
        CHECK(s.row(1).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("orthogonality penalty examples")
    {
        CHECK(orthogonality_penalty(one_hot(6, {3, 0, 5})) == 0.0);
        CHECK(orthogonality_penalty(one_hot(4, {1, 1})) == 2.0);
        CHECK(orthogonality_penalty(RealMatrix::Constant(2, 4, 0.25)) == doctest::Approx(1.25).epsilon(1e-14));

        const auto s = softmax_rows(rows({{0.2, 1.0, -0.5}, {2.0, 0.0, 0.1}}));
        CHECK(orthogonality_penalty(s) == doctest::Approx(oracle::penalty(support::to_grid(s))).epsilon(1e-13));
    }

    TEST_CASE("harden examples")
    {
        const auto r = harden(one_hot(6, {3, 0, 5}));
        CHECK(r.selection.indices() == std::vector<std::size_t>{0, 3, 5});
        CHECK(r.penalty == 0.0);
        CHECK(r.max_row_entropy == 0.0);

        const auto r2 = harden(rows({{0.1, 0.7, 0.2}, {0.6, 0.3, 0.1}}));
        CHECK(r2.selection.indices() == std::vector<std::size_t>{0, 1});
        CHECK(r2.max_row_entropy > 0.0);
        CHECK(r2.penalty > 0.0);

        // exact tie: lowest index wins
        const auto r3 = harden(rows({{0.4, 0.4, 0.2}}));
        CHECK(r3.selection.indices() == std::vector<std::size_t>{0});
    }

    TEST_CASE("harden reports colliding rows")
    {
        const RealMatrix s = rows({{0.1, 0.2, 0.7}, {0.5, 0.4, 0.1}, {0.0, 0.1, 0.9}});
        try
        {
            harden(s);
            FAIL("expected DuplicateSelection");
        }
        catch (const DuplicateSelection &e)
        {
            CHECK(e.code() == ErrorCode::duplicate_selection);
            CHECK(e.column() == 2);
            CHECK(e.rows() == std::vector<std::size_t>{0, 2});
        }
    }

    TEST_CASE("greedy fallback")
    {
        // Row 2 is the most confident and keeps column 2; row 0 moves to its
        // runner-up column 1.
        const RealMatrix s = rows({{0.1, 0.2, 0.7}, {0.5, 0.4, 0.1}, {0.0, 0.1, 0.9}});
        CHECK(harden_greedy(s).indices() == std::vector<std::size_t>{0, 1, 2});

        const RealMatrix t = rows({{0.05, 0.05, 0.9, 0.0}, {0.0, 0.1, 0.8, 0.1}});
        CHECK(harden_greedy(t).indices() == std::vector<std::size_t>{1, 2});

        // agrees with argmax when there is no collision
        const RealMatrix u = rows({{0.1, 0.7, 0.2}, {0.6, 0.3, 0.1}});
        CHECK(harden_greedy(u) == harden(u).selection);
    }

    TEST_CASE("hard selection validation and matrix")
    {
        CHECK(support::error_code([] { HardSelection({1, 1}, 4); }) == ErrorCode::invalid_argument);
        CHECK(support::error_code([] { HardSelection({4}, 4); }) == ErrorCode::invalid_argument);
        CHECK(support::error_code([] { HardSelection({}, 4); }) == ErrorCode::invalid_argument);
        const HardSelection h({5, 1, 3}, 6);
        CHECK(h.indices() == std::vector<std::size_t>{1, 3, 5});
        const auto m = h.matrix();
        CHECK(m.rows() == 3);
        CHECK(m.cols() == 6);
        CHECK(m.sum() == 3.0);
        CHECK(m(0, 1) == 1.0);
        CHECK(m(1, 3) == 1.0);
        CHECK(m(2, 5) == 1.0);
    }

    TEST_CASE("property: row-stochastic, penalty bounds, shift and permutation")
    {
        std::mt19937_64 rng(31);
        std::normal_distribution<double> scale(0.0, 5.0);
        for (int trial = 0; trial < 300; ++trial)
        {
            const std::size_t n = 2 + std::size_t(trial % 9);
            const std::size_t m = 1 + std::size_t(trial % int(n));
            const double spread = std::abs(scale(rng)) + 0.01;
            const RealMatrix b = support::to_eigen(oracle::random_grid(m, n, rng, spread));
            const auto s = soft_selection(SelectionModel(b));

            for (Eigen::Index r = 0; r < s.rows(); ++r)
                CHECK(std::abs(s.row(r).sum() - 1.0) < 1e-12);
            CHECK((s.array() >= 0.0).all());

            const double pen = orthogonality_penalty(s);
            CHECK(pen >= 0.0);
            if (s.rowwise().maxCoeff().minCoeff() < 1.0)
                CHECK(pen > 0.0);

            RealMatrix shifted = b;
            for (Eigen::Index r = 0; r < b.rows(); ++r)
                shifted.row(r).array() += scale(rng);
            const auto ss = soft_selection(SelectionModel(shifted));
            CHECK((ss - s).cwiseAbs().maxCoeff() < 1e-12);

            std::vector<Eigen::Index> order(m);
            for (std::size_t i = 0; i < m; ++i)
                order[i] = Eigen::Index(i);
            std::shuffle(order.begin(), order.end(), rng);
            RealMatrix bp(b.rows(), b.cols());
            for (std::size_t i = 0; i < m; ++i)
                bp.row(Eigen::Index(i)) = b.row(order[i]);
            const auto sp = soft_selection(SelectionModel(bp));
            for (std::size_t i = 0; i < m; ++i)
                CHECK(sp.row(Eigen::Index(i)) == s.row(order[i]));

            std::optional<std::vector<std::size_t>> hard;
            try
            {
                hard = harden(s).selection.indices();
            }
            catch (const DuplicateSelection &)
            {
            }
            if (hard)
            {
                CHECK(harden(ss).selection.indices() == *hard);
                CHECK(harden(sp).selection.indices() == *hard);
            }
        }
    }

    TEST_CASE("property: penalty is zero exactly for disjoint one-hot rows")
    {
        std::mt19937_64 rng(8);
        for (int trial = 0; trial < 100; ++trial)
        {
            const std::size_t n = 3 + std::size_t(trial % 6);
            std::vector<std::size_t> cols(n);
            for (std::size_t i = 0; i < n; ++i)
                cols[i] = i;
            std::shuffle(cols.begin(), cols.end(), rng);
            const std::size_t m = 1 + std::size_t(trial % int(n));
            RealMatrix s = RealMatrix::Zero(Eigen::Index(m), Eigen::Index(n));
            for (std::size_t r = 0; r < m; ++r)
                s(Eigen::Index(r), Eigen::Index(cols[r])) = 1.0;
            CHECK(orthogonality_penalty(s) == 0.0);
            if (m >= 2)
            {
                s.row(1) = s.row(0);
                CHECK(orthogonality_penalty(s) > 0.0);
            }
        }
    }
}
