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

#include <algorithm>
#include <cmath>
#include <numeric>

namespace l2s
{
    SelectionModel::SelectionModel(RealMatrix biases) : biases_(std::move(biases))
    {
        if (biases_.rows() < 1 || biases_.cols() < 2)
            fail(ErrorCode::invalid_argument, "selection model: need at least 1 head and 2 antennas");
        // M == N is allowed as a degenerate case with no selection pressure.
        if (biases_.rows() > biases_.cols())
            fail(ErrorCode::invalid_argument, "selection model: more heads than antennas");
        if (!biases_.allFinite())
            fail(ErrorCode::invalid_argument, "selection model: non-finite bias");
    }

    SelectionModel SelectionModel::random(std::size_t m, std::size_t n, std::mt19937_64 &rng, double stddev)
    {
        std::normal_distribution<double> dist(0.0, stddev);
        RealMatrix b(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
        // Explicit loop order keeps draws independent of Eigen's traversal.
        for (Eigen::Index i = 0; i < b.rows(); ++i)
            for (Eigen::Index j = 0; j < b.cols(); ++j)
                b(i, j) = dist(rng);
        return SelectionModel(std::move(b));
    }

    HardSelection::HardSelection(std::vector<std::size_t> indices, std::size_t n_elements)
        : indices_(std::move(indices)), n_(n_elements)
    {
        if (indices_.empty())
            fail(ErrorCode::invalid_argument, "hard selection: empty");
        std::sort(indices_.begin(), indices_.end());
        for (std::size_t i = 0; i < indices_.size(); ++i)
        {
            if (indices_[i] >= n_)
                fail(ErrorCode::invalid_argument,
                     "hard selection: index " + std::to_string(indices_[i]) + " out of range [0, " +
                         std::to_string(n_) + ")");
            if (i > 0 && indices_[i] == indices_[i - 1])
                fail(ErrorCode::invalid_argument,
                     "hard selection: duplicate index " + std::to_string(indices_[i]));
        }
    }

    RealMatrix HardSelection::matrix() const
    {
        RealMatrix s = RealMatrix::Zero(Eigen::Index(indices_.size()), Eigen::Index(n_));
        for (std::size_t m = 0; m < indices_.size(); ++m)
            s(Eigen::Index(m), Eigen::Index(indices_[m])) = 1.0;
        return s;
    }

    RealMatrix softmax_rows(const RealMatrix &logits)
    {
        if (!logits.allFinite())
            fail(ErrorCode::invalid_argument, "softmax: non-finite input");
        RealMatrix s(logits.rows(), logits.cols());
        for (Eigen::Index m = 0; m < logits.rows(); ++m)
        {
            const double top = logits.row(m).maxCoeff();
            double sum = 0.0;
            for (Eigen::Index i = 0; i < logits.cols(); ++i)
            {
                s(m, i) = std::exp(logits(m, i) - top);
                sum += s(m, i);
            }
            s.row(m) /= sum;
        }
        return s;
    }

    RealMatrix soft_selection(const SelectionModel &model)
    {
        return softmax_rows(model.biases());
    }

    double orthogonality_penalty(const RealMatrix &soft)
    {
        RealMatrix d = soft * soft.transpose();
        d.diagonal().array() -= 1.0;
        return d.squaredNorm();
    }

    HardenReport harden(const RealMatrix &soft)
    {
        const auto m_rows = std::size_t(soft.rows());
        const auto n_cols = std::size_t(soft.cols());
        std::vector<std::size_t> picks(m_rows);
        double max_entropy = 0.0;
        for (std::size_t m = 0; m < m_rows; ++m)
        {
            std::size_t best = 0;
            double entropy = 0.0;
            for (std::size_t i = 0; i < n_cols; ++i)
            {
                const double v = soft(Eigen::Index(m), Eigen::Index(i));
                if (v > soft(Eigen::Index(m), Eigen::Index(best)))
                    best = i;
                if (v > 0.0)
                    entropy -= v * std::log(v);
            }
            picks[m] = best;
            max_entropy = std::max(max_entropy, entropy);
        }

        for (std::size_t m = 0; m < m_rows; ++m)
        {
            std::vector<std::size_t> rows;
            for (std::size_t r = 0; r < m_rows; ++r)
                if (picks[r] == picks[m])
                    rows.push_back(r);
            if (rows.size() > 1)
                throw DuplicateSelection(std::move(rows), picks[m]);
        }
        return {HardSelection(std::move(picks), n_cols), max_entropy, orthogonality_penalty(soft)};
    }

    HardSelection harden_greedy(const RealMatrix &soft)
    {
        const auto m_rows = std::size_t(soft.rows());
        const auto n_cols = std::size_t(soft.cols());
        if (m_rows > n_cols)
            fail(ErrorCode::duplicate_selection, "greedy hardening: more rows than columns");

        std::vector<std::size_t> order(m_rows);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b)
                         { return soft.row(Eigen::Index(a)).maxCoeff() > soft.row(Eigen::Index(b)).maxCoeff(); });

        std::vector<bool> claimed(n_cols, false);
        std::vector<std::size_t> picks;
        picks.reserve(m_rows);
        for (auto m : order)
        {
            std::size_t best = n_cols;
            for (std::size_t i = 0; i < n_cols; ++i)
            {
                if (claimed[i])
                    continue;
                if (best == n_cols || soft(Eigen::Index(m), Eigen::Index(i)) > soft(Eigen::Index(m), Eigen::Index(best)))
                    best = i;
            }
            claimed[best] = true;
            picks.push_back(best);
        }
        return HardSelection(std::move(picks), n_cols);
    }
} // namespace l2s
