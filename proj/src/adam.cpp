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

#include "l2s/adam.hpp"

#include <cmath>

namespace l2s
{
    Adam::Adam(std::size_t size, AdamConfig config) : cfg_(config), m_(size, 0.0), v_(size, 0.0)
    {
        if (!(cfg_.learning_rate > 0.0))
            fail(ErrorCode::config, "adam: learning rate must be > 0");
        if (!(cfg_.beta1 >= 0.0 && cfg_.beta1 < 1.0) || !(cfg_.beta2 >= 0.0 && cfg_.beta2 < 1.0))
            fail(ErrorCode::config, "adam: beta1 and beta2 must lie in [0, 1)");
        if (!(cfg_.epsilon > 0.0))
            fail(ErrorCode::config, "adam: epsilon must be > 0");
    }

    void Adam::step(std::span<double> params, std::span<const double> grads)
    {
        require_dims(params.size() == m_.size() && grads.size() == m_.size(), "adam: parameter/gradient size mismatch");
        ++t_;
        beta1_pow_ *= cfg_.beta1;
        beta2_pow_ *= cfg_.beta2;
        const double c1 = 1.0 - beta1_pow_;
        const double c2 = 1.0 - beta2_pow_;
        for (std::size_t i = 0; i < params.size(); ++i)
        {
            const double g = grads[i];
            m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
            v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g * g;
            const double m_hat = m_[i] / c1;
            const double v_hat = v_[i] / c2;
            params[i] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
        }
    }
} // namespace l2s
