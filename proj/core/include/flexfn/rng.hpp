#pragma once

#include <array>
#include <cstdint>

namespace flexfn {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Counter-based stream of standard normals.
///
/// The stream is keyed by (seed, stream_id); draw n is a pure function of
/// (seed, stream_id, n), so results do not depend on which thread evaluates them.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    /// Uniform in the open interval (0,1) with 53 random bits.
    double uniform() noexcept;
    /// Standard normal by inverse CDF.
    double normal();

    std::uint64_t position() const noexcept { return next_; }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t next_ = 0;  // index of the next uniform
    std::uint64_t block_ = ~std::uint64_t{0};
    std::array<std::uint32_t, 4> cache_{};
};

/// Standard normal quantile.
double normal_quantile(double p);

}  // namespace flexfn
