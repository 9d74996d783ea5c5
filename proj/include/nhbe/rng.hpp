#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace nhbe {

using Cx = std::complex<double>;

/*!
 * Seedable, splittable random stream.
 *
 * A stream is identified by a 64-bit key. substream(i) derives a new key from
 * (key, i) with a splitmix64 mixing chain, so the i-th child never depends on
 * how many draws were taken from the parent or from its siblings. This is what
 * makes ensemble runs independent of the worker count.
 *
 * Normal and uniform variates are generated here rather than through the
 * <random> distributions, whose output is implementation-defined; the engine
 * itself (mt19937_64 seeded through seed_seq) is fully specified.
 */
class Stream
{
  public:
    explicit Stream(std::uint64_t seed);

    std::uint64_t key() const { return key_; }

    Stream substream(std::uint64_t index) const;

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Uniform on (0, 1).
    double uniform_open();
    // Standard normal (Marsaglia polar method, spare value cached).
    double normal();

  private:
    std::uint64_t key_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Complex number with independent N(0,1) real and imaginary parts.
Cx sample_normal_complex(Stream& stream);

/*!
 * Gamma variate with the given shape and scale.
 *
 * Marsaglia-Tsang squeeze/rejection for shape >= 1; for shape < 1 a
 * Gamma(shape + 1) draw is boosted by U^(1/shape).
 */
double sample_gamma(double shape, double scale, Stream& stream);

/// Chi variate with parameter alpha > 0: sqrt of Gamma(alpha/2, scale 2).
double sample_chi(double alpha, Stream& stream);

/// Density of the chi distribution with parameter alpha at x.
double chi_pdf(double alpha, double x);

}  // namespace nhbe
