#pragma once
// Counter-based Philox4x32-10 generator.  A stream is identified by a seed
// and a purpose string; draw i of sample n is a pure function of
// (seed, purpose, n, i), so parallel sampling is order-independent.

#include <array>
#include <cstdint>
#include <string_view>

namespace rc {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

std::uint64_t fnv1a64(std::string_view s);

class SampleStream {
public:
    SampleStream(std::uint64_t seed, std::string_view purpose, std::uint64_t sample);

    // Uniform in (0, 1), 53-bit resolution.
    double uniform();
    double normal();

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t sample_;
    std::uint32_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int used_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rc
