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

#ifndef L2S_ARRAY_HPP
#define L2S_ARRAY_HPP

#include "l2s/types.hpp"

#include <span>
#include <vector>

namespace l2s
{
    // Uniform linear array. Element n sits at n * spacing_wavelengths * lambda.
    class ArrayGeometry
    {
    public:
        ArrayGeometry(std::size_t n_elements, double spacing_wavelengths);

        std::size_t n_elements() const noexcept { return n_; }
        double spacing_wavelengths() const noexcept { return spacing_; }

        bool operator==(const ArrayGeometry &) const = default;

    private:
        std::size_t n_;
        double spacing_;
    };

    // Angle grid with desired power and per-angle importance weights.
    // Angles are in degrees from broadside.
    class BeamScenario
    {
    public:
        BeamScenario(std::vector<double> angles_deg, std::vector<double> desired_power, std::vector<double> weights);

        std::size_t size() const noexcept { return angles_.size(); }
        const std::vector<double> &angles_deg() const noexcept { return angles_; }
        const std::vector<double> &desired_power() const noexcept { return power_; }
        const std::vector<double> &weights() const noexcept { return weights_; }

        bool operator==(const BeamScenario &) const = default;

    private:
        std::vector<double> angles_;
        std::vector<double> power_;
        std::vector<double> weights_;
    };

    // a_n(theta) = exp(j 2 pi (d/lambda) n sin(theta)), n = 0..N-1. Returns N x 1.
    ComplexMatrix steering_vector(double angle_deg, const ArrayGeometry &geom);

    // Column k is steering_vector(angles_deg[k]). Returns N x K.
    ComplexMatrix steering_matrix(std::span<const double> angles_deg, const ArrayGeometry &geom);
    ComplexMatrix steering_matrix(const BeamScenario &scenario, const ArrayGeometry &geom);

    // Expected output power of the (possibly soft) sparse array,
    //   p_k = a_k^H S^T S Q Q^H S^T S a_k,
    // evaluated as || Q^H S^T S a_k ||^2 so the result is real and non-negative.
    // S is M x N, Q is N x N, A is N x K.
    std::vector<double> exact_beampattern(const RealMatrix &selection, const ComplexMatrix &q, const ComplexMatrix &a);

    // Half-power beamwidth of the lobe containing peak_angle_deg on a uniform
    // fine grid (step <= 0.05 deg). Walks outward from the peak sample to the
    // first samples below half the local peak and interpolates linearly.
    double hpbw(std::span<const double> angles_deg, std::span<const double> pattern, double peak_angle_deg);

    struct Lobe
    {
        double center_deg;  // angle of the local maximum
        double peak_power;  // raw power at the maximum
        double left_deg;    // interpolated half-power crossings
        double right_deg;
        double hpbw_deg;
    };

    // Contiguous regions of the pattern at or above half of its global peak,
    // one lobe per region, left to right.
    std::vector<Lobe> find_mainlobes(std::span<const double> angles_deg, std::span<const double> pattern);

    // Uniform grid start, start+step, ... up to stop (inclusive within 1e-9 step).
    std::vector<double> make_grid(double start_deg, double stop_deg, double step_deg);

    // 10 log10(p / max p); zero-power samples map to -300 dB.
    std::vector<double> normalized_db(std::span<const double> pattern);
} // namespace l2s

#endif
