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

#include "l2s/array.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace l2s
{
    DuplicateSelection::DuplicateSelection(std::vector<std::size_t> rows, std::size_t column)
        : Error(ErrorCode::duplicate_selection,
                [&]
                {
                    std::ostringstream os;
                    os << "duplicate selection: rows";
                    for (auto r : rows)
                        os << ' ' << r;
                    os << " all select column " << column;
                    return os.str();
                }()),
          rows_(std::move(rows)), column_(column)
    {
    }

    void fail(ErrorCode code, const std::string &what)
    {
        throw Error(code, what);
    }

    ArrayGeometry::ArrayGeometry(std::size_t n_elements, double spacing_wavelengths)
        : n_(n_elements), spacing_(spacing_wavelengths)
    {
        if (n_ < 2)
            fail(ErrorCode::invalid_argument, "array geometry: n_elements must be >= 2");
        if (!(spacing_ > 0.0) || !std::isfinite(spacing_))
            fail(ErrorCode::invalid_argument, "array geometry: spacing_wavelengths must be > 0");
    }

    BeamScenario::BeamScenario(std::vector<double> angles_deg, std::vector<double> desired_power,
                               std::vector<double> weights)
        : angles_(std::move(angles_deg)), power_(std::move(desired_power)), weights_(std::move(weights))
    {
        if (angles_.empty())
            fail(ErrorCode::invalid_argument, "beam scenario: at least one angle is required");
        if (power_.size() != angles_.size() || weights_.size() != angles_.size())
            fail(ErrorCode::invalid_argument, "beam scenario: angles, desired_power and weights differ in length");
        for (std::size_t k = 0; k < angles_.size(); ++k)
        {
            if (!(std::abs(angles_[k]) <= 90.0))
                fail(ErrorCode::domain, "beam scenario: angle " + std::to_string(angles_[k]) + " outside [-90, 90]");
            if (k > 0 && !(angles_[k] > angles_[k - 1]))
                fail(ErrorCode::invalid_argument, "beam scenario: angles must be strictly increasing");
            if (!(power_[k] >= 0.0) || !std::isfinite(power_[k]))
                fail(ErrorCode::invalid_argument, "beam scenario: desired power must be finite and >= 0");
            if (!(weights_[k] > 0.0) || !std::isfinite(weights_[k]))
                fail(ErrorCode::invalid_argument, "beam scenario: weights must be finite and > 0");
        }
    }

    ComplexMatrix steering_vector(double angle_deg, const ArrayGeometry &geom)
    {
        if (!(std::abs(angle_deg) <= 90.0))
            fail(ErrorCode::domain, "steering vector: angle " + std::to_string(angle_deg) + " outside [-90, 90]");
        const double phase_step =
            2.0 * std::numbers::pi * geom.spacing_wavelengths() * std::sin(angle_deg * std::numbers::pi / 180.0);
        ComplexMatrix a(geom.n_elements(), 1);
        for (std::size_t n = 0; n < geom.n_elements(); ++n)
            a(Eigen::Index(n), 0) = std::polar(1.0, phase_step * double(n));
        return a;
    }

    ComplexMatrix steering_matrix(std::span<const double> angles_deg, const ArrayGeometry &geom)
    {
        ComplexMatrix a(geom.n_elements(), Eigen::Index(angles_deg.size()));
        for (std::size_t k = 0; k < angles_deg.size(); ++k)
            a.col(Eigen::Index(k)) = steering_vector(angles_deg[k], geom);
        return a;
    }

    ComplexMatrix steering_matrix(const BeamScenario &scenario, const ArrayGeometry &geom)
    {
        return steering_matrix(std::span<const double>(scenario.angles_deg()), geom);
    }

    std::vector<double> exact_beampattern(const RealMatrix &selection, const ComplexMatrix &q, const ComplexMatrix &a)
    {
        require_dims(q.rows() == q.cols(), "exact_beampattern: Q must be square");
        require_dims(selection.cols() == q.rows(), "exact_beampattern: S columns must equal Q rows");
        require_dims(a.rows() == q.rows(), "exact_beampattern: steering matrix rows must equal N");

        // Z = S^T S A, W = Q^H Z; p_k = ||W_k||^2
        const ComplexMatrix sa = selection.cast<Complex>() * a;
        const ComplexMatrix z = selection.transpose().cast<Complex>() * sa;
        const ComplexMatrix w = q.adjoint() * z;
        std::vector<double> p(std::size_t(a.cols()));
        for (Eigen::Index k = 0; k < a.cols(); ++k)
            p[std::size_t(k)] = w.col(k).squaredNorm();
        return p;
    }

    std::vector<double> make_grid(double start_deg, double stop_deg, double step_deg)
    {
        if (!(step_deg > 0.0))
            fail(ErrorCode::invalid_argument, "grid: step must be > 0");
        if (!(stop_deg >= start_deg))
            fail(ErrorCode::invalid_argument, "grid: stop must be >= start");
        const auto count = std::size_t(std::floor((stop_deg - start_deg) / step_deg + 1e-9)) + 1;
        std::vector<double> grid(count);
        for (std::size_t i = 0; i < count; ++i)
            grid[i] = start_deg + double(i) * step_deg;
        return grid;
    }

    std::vector<double> normalized_db(std::span<const double> pattern)
    {
        const double peak = pattern.empty() ? 0.0 : *std::max_element(pattern.begin(), pattern.end());
        std::vector<double> db(pattern.size(), -300.0);
        if (peak <= 0.0)
            return db;
        for (std::size_t i = 0; i < pattern.size(); ++i)
            if (pattern[i] > 0.0)
                db[i] = std::max(-300.0, 10.0 * std::log10(pattern[i] / peak));
        return db;
    }

    namespace
    {
        double crossing(double x0, double y0, double x1, double y1, double level)
        {
            if (y1 == y0)
                return 0.5 * (x0 + x1);
            return x0 + (level - y0) * (x1 - x0) / (y1 - y0);
        }

        struct Crossings
        {
            double left, right;
        };

        Crossings half_power_crossings(std::span<const double> angles, std::span<const double> pattern, std::size_t peak)
        {
            const double level = 0.5 * pattern[peak];
            std::size_t i = peak;
            while (i > 0 && !(pattern[i - 1] < level))
                --i;
            if (i == 0)
                fail(ErrorCode::evaluation, "hpbw: half-power crossing not found left of the peak");
            std::size_t j = peak;
            while (j + 1 < pattern.size() && !(pattern[j + 1] < level))
                ++j;
            if (j + 1 == pattern.size())
                fail(ErrorCode::evaluation, "hpbw: half-power crossing not found right of the peak");
            return {crossing(angles[i - 1], pattern[i - 1], angles[i], pattern[i], level),
                    crossing(angles[j], pattern[j], angles[j + 1], pattern[j + 1], level)};
        }
    } // namespace

    double hpbw(std::span<const double> angles_deg, std::span<const double> pattern, double peak_angle_deg)
    {
        require_dims(angles_deg.size() == pattern.size(), "hpbw: angle grid and pattern differ in length");
        if (angles_deg.size() < 3)
            fail(ErrorCode::evaluation, "hpbw: grid too short");
        if (peak_angle_deg < angles_deg.front() || peak_angle_deg > angles_deg.back())
            fail(ErrorCode::evaluation, "hpbw: peak angle outside the grid");

        auto it = std::lower_bound(angles_deg.begin(), angles_deg.end(), peak_angle_deg);
        std::size_t idx = std::size_t(it - angles_deg.begin());
        if (idx > 0 && (idx == angles_deg.size() || peak_angle_deg - angles_deg[idx - 1] < angles_deg[idx] - peak_angle_deg))
            --idx;

        // Climb to the local maximum so a slightly off peak angle still works.
        while (true)
        {
            if (idx > 0 && pattern[idx - 1] > pattern[idx])
                --idx;
            else if (idx + 1 < pattern.size() && pattern[idx + 1] > pattern[idx])
                ++idx;
            else
                break;
        }
        if (!(pattern[idx] > 0.0))
            fail(ErrorCode::evaluation, "hpbw: peak power is zero");
        const auto c = half_power_crossings(angles_deg, pattern, idx);
        return c.right - c.left;
    }

    std::vector<Lobe> find_mainlobes(std::span<const double> angles_deg, std::span<const double> pattern)
    {
        require_dims(angles_deg.size() == pattern.size(), "find_mainlobes: angle grid and pattern differ in length");
        std::vector<Lobe> lobes;
        if (pattern.empty())
            return lobes;
        const double peak = *std::max_element(pattern.begin(), pattern.end());
        if (!(peak > 0.0))
            fail(ErrorCode::evaluation, "find_mainlobes: pattern is identically zero");
        const double level = 0.5 * peak;

        std::size_t i = 0;
        while (i < pattern.size())
        {
            if (pattern[i] < level)
            {
                ++i;
                continue;
            }
            std::size_t end = i;
            std::size_t top = i;
            while (end < pattern.size() && !(pattern[end] < level))
            {
                if (pattern[end] > pattern[top])
                    top = end;
                ++end;
            }
            Lobe lobe{angles_deg[top], pattern[top], angles_deg[i], angles_deg[end - 1], 0.0};
            try
            {
                const auto c = half_power_crossings(angles_deg, pattern, top);
                lobe.left_deg = c.left;
                lobe.right_deg = c.right;
            }
            catch (const Error &)
            {
                // Lobe runs off the grid edge; report the clipped extent.
            }
            lobe.hpbw_deg = lobe.right_deg - lobe.left_deg;
            lobes.push_back(lobe);
            i = end;
        }
        return lobes;
    }
} // namespace l2s
