#include "relucoll/rng.hpp"

#include <cmath>
#include <numbers>

namespace rc {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

SampleStream::SampleStream(std::uint64_t seed, std::string_view purpose, std::uint64_t sample) : sample_(sample) {
    const std::uint64_t k = seed ^ (fnv1a64(purpose) * 0x9E3779B97F4A7C15ull);
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

void SampleStream::refill() {
    buf_ = philox4x32({block_, 0u, static_cast<std::uint32_t>(sample_), static_cast<std::uint32_t>(sample_ >> 32)}, key_);
    ++block_;
    used_ = 0;
}

double SampleStream::uniform() {
    if (used_ > 2) refill();
    const std::uint64_t hi = buf_[static_cast<std::size_t>(used_)] >> 6;  // 26 bits
    const std::uint64_t lo = buf_[static_cast<std::size_t>(used_) + 1] >> 5;  // 27 bits
    used_ += 2;
    return (static_cast<double>((hi << 27) | lo) + 0.5) * 0x1p-53;
}

double SampleStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
}

}  // namespace rc
