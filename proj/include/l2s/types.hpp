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

#ifndef L2S_TYPES_HPP
#define L2S_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace l2s
{
    using Complex = std::complex<double>;

    // Dense column-major storage. std::complex<double> is laid out as an
    // explicit (real, imag) pair of doubles.
    using ComplexMatrix = Eigen::MatrixXcd;
    using ComplexVector = Eigen::VectorXcd;
    using RealMatrix = Eigen::MatrixXd;
    using RealVector = Eigen::VectorXd;

    // Error categories shared by the C++ core and the C API status codes.
    enum class ErrorCode
    {
        invalid_argument = 1,
        domain,
        dimension,
        config,
        schema,
        io,
        duplicate_selection,
        diverged,
        cap_exceeded,
        evaluation,
        gradcheck_failed,
    };

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string &what) : std::runtime_error(what), code_(code) {}
        ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };

    // Hardening found two softmax heads with the same argmax.
    class DuplicateSelection : public Error
    {
    public:
        DuplicateSelection(std::vector<std::size_t> rows, std::size_t column);
        const std::vector<std::size_t> &rows() const noexcept { return rows_; }
        std::size_t column() const noexcept { return column_; }

    private:
        std::vector<std::size_t> rows_;
        std::size_t column_;
    };

    [[noreturn]] void fail(ErrorCode code, const std::string &what);

    inline void require_dims(bool ok, const std::string &what)
    {
        if (!ok)
            fail(ErrorCode::dimension, what);
    }
} // namespace l2s

#endif
