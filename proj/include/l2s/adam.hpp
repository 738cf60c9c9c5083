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

#ifndef L2S_ADAM_HPP
#define L2S_ADAM_HPP

#include "l2s/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace l2s
{
    struct AdamConfig
    {
        double learning_rate = 0.01;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double epsilon = 1e-8;
    };

    // Bias-corrected Adam. One instance per parameter group; moments persist
    // across calls.
    class Adam
    {
    public:
        Adam(std::size_t size, AdamConfig config);

        void step(std::span<double> params, std::span<const double> grads);

        std::uint64_t steps() const noexcept { return t_; }
        const AdamConfig &config() const noexcept { return cfg_; }

    private:
        AdamConfig cfg_;
        std::vector<double> m_;
        std::vector<double> v_;
        std::uint64_t t_ = 0;
        double beta1_pow_ = 1.0;
        double beta2_pow_ = 1.0;
    };

    inline std::span<double> as_span(RealMatrix &m)
    {
        return {m.data(), std::size_t(m.size())};
    }

    inline std::span<const double> as_span(const RealMatrix &m)
    {
        return {m.data(), std::size_t(m.size())};
    }
} // namespace l2s

#endif
