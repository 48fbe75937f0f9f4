#include "flexfn/rng.hpp"

#include <cmath>

#include <boost/math/special_functions/erf.hpp>

namespace flexfn {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream_id) {}

double NormalStream::uniform() noexcept {
    // Each Philox block gives two 64-bit words, i.e. two uniforms.
    const std::uint64_t block = next_ >> 1;
    if (block != block_) {
        cache_ = philox4x32({static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                             static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                            key_);
        block_ = block;
    }
    const std::size_t half = (next_ & 1u) * 2;
    ++next_;
    const std::uint64_t bits = (static_cast<std::uint64_t>(cache_[half]) << 32) | cache_[half + 1];
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double NormalStream::normal() { return normal_quantile(uniform()); }

double normal_quantile(double p) { return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p); }

}  // namespace flexfn
