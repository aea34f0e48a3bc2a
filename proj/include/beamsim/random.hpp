// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace beamsim
{

// Independent stream for (root seed, purpose tag, entity id). Streams with
// different tags or ids do not overlap in practice, and a given triple always
// yields the same sequence regardless of how many other streams exist.
inline std::mt19937_64 make_stream(std::uint64_t root, std::uint64_t tag, std::uint64_t id)
{
    std::seed_seq seq{static_cast<std::uint32_t>(root), static_cast<std::uint32_t>(root >> 32),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(id),
                      static_cast<std::uint32_t>(id >> 32)};
    return std::mt19937_64(seq);
}

enum StreamTag : std::uint64_t
{
    kArrivalStream = 1,
    kUserSetupStream = 2,
    kUserFadingStream = 3,
    kFileSizeStream = 4,
    kTestStream = 99,
};

} // namespace beamsim
