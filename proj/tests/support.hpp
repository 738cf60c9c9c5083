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

#ifndef L2S_TESTS_SUPPORT_HPP
#define L2S_TESTS_SUPPORT_HPP

#include "l2s/types.hpp"
#include "oracles.hpp"

#include <filesystem>
#include <optional>
#include <random>
#include <string>

namespace support
{
    inline l2s::RealMatrix to_eigen(const oracle::Grid &g)
    {
        l2s::RealMatrix m(Eigen::Index(g.size()), Eigen::Index(g[0].size()));
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < g[i].size(); ++j)
                m(Eigen::Index(i), Eigen::Index(j)) = g[i][j];
        return m;
    }

    inline l2s::ComplexMatrix to_eigen(const oracle::CGrid &g)
    {
        l2s::ComplexMatrix m(Eigen::Index(g.size()), Eigen::Index(g[0].size()));
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < g[i].size(); ++j)
                m(Eigen::Index(i), Eigen::Index(j)) = g[i][j];
        return m;
    }

    inline oracle::CGrid to_grid(const l2s::ComplexMatrix &m)
    {
        oracle::CGrid g(std::size_t(m.rows()), std::vector<oracle::cd>(std::size_t(m.cols())));
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                g[std::size_t(i)][std::size_t(j)] = m(i, j);
        return g;
    }

    inline oracle::Grid to_grid(const l2s::RealMatrix &m)
    {
        oracle::Grid g(std::size_t(m.rows()), std::vector<double>(std::size_t(m.cols())));
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                g[std::size_t(i)][std::size_t(j)] = m(i, j);
        return g;
    }

    // Error code thrown by f, or nullopt if it returned normally.
    template <class F>
    std::optional<l2s::ErrorCode> error_code(F &&f)
    {
        try
        {
            f();
        }
        catch (const l2s::Error &e)
        {
            return e.code();
        }
        return std::nullopt;
    }

    inline double rel_diff(double a, double b)
    {
        const double s = std::max({std::abs(a), std::abs(b), 1e-300});
        return std::abs(a - b) / s;
    }

    // Fresh empty directory under the system temp dir.
    inline std::filesystem::path temp_dir(const std::string &name)
    {
        auto p = std::filesystem::temp_directory_path() / ("l2s_test_" + name);
        std::filesystem::remove_all(p);
        std::filesystem::create_directories(p);
        return p;
    }

    inline l2s::ComplexMatrix random_unitary(std::size_t n, std::mt19937_64 &rng)
    {
        const auto g = to_eigen(oracle::random_cgrid(n, n, rng));
        Eigen::HouseholderQR<l2s::ComplexMatrix> qr(g);
        return qr.householderQ() * l2s::ComplexMatrix::Identity(Eigen::Index(n), Eigen::Index(n));
    }
} // namespace support

#endif
