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

#ifndef L2S_RNG_HPP
#define L2S_RNG_HPP

#include <cstdint>

namespace l2s
{
    // Independent sub-seed for `stream` from a master seed (splitmix64 finalizer).
    constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept
    {
        std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    namespace seed_stream
    {
        inline constexpr std::uint64_t excitation = 1;
        inline constexpr std::uint64_t biases = 2;
        inline constexpr std::uint64_t precoder = 3;
        inline constexpr std::uint64_t oracle = 4;
    } // namespace seed_stream
} // namespace l2s

#endif
