/*
 * Copyright (c) 2026 The negres Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstdint>

namespace negres {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11), as in
/// Random123. Stateless: a block is a pure function of (counter, key).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept;
};

/// Purpose tags separating the independent random inputs of one path.
enum class StreamPurpose : std::uint32_t {
    Brownian = 0x57'00'00'01,
    Regime = 0x52'00'00'02,
    Test = 0x54'00'00'03,
};

/// Sequential draws from a Philox substream.
///
/// Key = the 64-bit seed split into two words. Counter word 0 is the block
/// index, word 1 the purpose tag, words 2–3 the 64-bit path index. Distinct
/// (seed, path, purpose) triples never share a counter, so path results do not
/// depend on evaluation order or worker count.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t path_index, StreamPurpose purpose) noexcept;

    std::uint32_t next_u32() noexcept;
    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept;
    /// Standard normal via Box–Muller; pairs are consumed in order.
    double normal() noexcept;
    /// Exponential with the given rate.
    double exponential(double rate) noexcept;

private:
    Philox4x32::Key key_{};
    Philox4x32::Counter counter_{};
    Philox4x32::Counter buffer_{};
    unsigned used_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

} // namespace negres
