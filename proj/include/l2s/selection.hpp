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

#ifndef L2S_SELECTION_HPP
#define L2S_SELECTION_HPP

#include "l2s/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace l2s
{
    // M softmax heads over N antennas. Each head has one bias per antenna and
    // no input, so row m of the soft selection matrix is softmax(biases.row(m)).
    class SelectionModel
    {
    public:
        explicit SelectionModel(RealMatrix biases);

        // Zero-mean Gaussian biases with standard deviation `stddev`.
        static SelectionModel random(std::size_t m, std::size_t n, std::mt19937_64 &rng, double stddev = 0.1);

        std::size_t heads() const noexcept { return std::size_t(biases_.rows()); }
        std::size_t antennas() const noexcept { return std::size_t(biases_.cols()); }
        const RealMatrix &biases() const noexcept { return biases_; }

    private:
        RealMatrix biases_;
    };

    // M distinct antenna indices in [0, N), sorted ascending.
    class HardSelection
    {
    public:
        HardSelection(std::vector<std::size_t> indices, std::size_t n_elements);

        const std::vector<std::size_t> &indices() const noexcept { return indices_; }
        std::size_t size() const noexcept { return indices_.size(); }
        std::size_t n_elements() const noexcept { return n_; }

        // Binary M x N matrix with a single one per row at the selected column.
        RealMatrix matrix() const;

        bool operator==(const HardSelection &) const = default;

    private:
        std::vector<std::size_t> indices_;
        std::size_t n_;
    };

    RealMatrix soft_selection(const SelectionModel &model);

    // Row-wise softmax with the row maximum subtracted before exponentiation.
    RealMatrix softmax_rows(const RealMatrix &logits);

    // || S S^T - I ||_F^2
    double orthogonality_penalty(const RealMatrix &soft);

    struct HardenReport
    {
        HardSelection selection;
        double max_row_entropy; // nats
        double penalty;
    };

    // Per-row argmax (lowest index wins exact ties). Throws DuplicateSelection
    // if two rows pick the same column.
    HardenReport harden(const RealMatrix &soft);

    // Fallback for a duplicate argmax: rows are visited in descending order of
    // their max probability and each takes its most probable unclaimed column.
    HardSelection harden_greedy(const RealMatrix &soft);
} // namespace l2s

#endif
