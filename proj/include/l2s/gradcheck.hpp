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

#ifndef L2S_GRADCHECK_HPP
#define L2S_GRADCHECK_HPP

#include "l2s/loss.hpp"

namespace l2s
{
    // Central finite differences of total_loss against the analytic gradients
    // on random small problems.
    struct GradcheckOptions
    {
        std::uint64_t seed = 0;
        std::size_t instances = 20;
        std::size_t coords_per_instance = 50;
        std::size_t max_n = 8;
        std::size_t max_m = 4;
        std::size_t max_k = 10;
        std::size_t max_t = 30;
        double step = 1e-5;
        double tolerance = 1e-5;
        double abs_floor = 1e-8;
        bool include_zero_q = true;  // one extra instance with Q = 0
        double corrupt = 0.0;        // test hook: analytic gradient scaled by (1 + corrupt)
    };

    struct GradcheckReport
    {
        std::size_t instances = 0;
        std::size_t coords = 0;
        double worst_error = 0.0;
        std::size_t worst_instance = 0;
        bool passed = false;
    };

    // |a - f| / max(|a|, |f|, abs_floor / tolerance): below `tolerance` iff the
    // relative error is below it or the absolute error is below abs_floor.
    double gradient_error(double analytic, double numeric, double tolerance, double abs_floor);

    // Central difference (f(x+h) - f(x-h)) / 2h of total_loss with respect to
    // one coordinate. coord < M*N addresses biases (column-major), the next
    // N*N the real part of Q and the last N*N the imaginary part.
    double numeric_partial(const SelectionModel &model, const Precoder &q, const Excitation &e,
                           const BeamTarget &target, double alpha, std::size_t coord, double step);

    GradcheckReport run_gradcheck(const GradcheckOptions &options);
} // namespace l2s

#endif
