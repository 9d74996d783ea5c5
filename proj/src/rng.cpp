#include "nhbe/rng.hpp"

#include <cmath>
#include <string>

#include "nhbe/errors.hpp"

namespace nhbe {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t key)
{
    std::uint64_t const k1 = splitmix64(key);
    std::uint64_t const k2 = splitmix64(k1);
    std::seed_seq seq{static_cast<std::uint32_t>(k1),
                      static_cast<std::uint32_t>(k1 >> 32),
                      static_cast<std::uint32_t>(k2),
                      static_cast<std::uint32_t>(k2 >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

Stream::Stream(std::uint64_t seed) : key_(seed), engine_(seeded_engine(seed)) {}

Stream Stream::substream(std::uint64_t index) const
{
    return Stream(splitmix64(key_ ^ splitmix64(index ^ 0xA0761D6478BD642Full)));
}

double Stream::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Stream::uniform_open()
{
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
}

double Stream::normal()
{
    if (has_spare_)
    {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do
    {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double const f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

Cx sample_normal_complex(Stream& stream)
{
    double const re = stream.normal();
    double const im = stream.normal();
    return {re, im};
}

double sample_gamma(double shape, double scale, Stream& stream)
{
    if (!(shape > 0.0) || !std::isfinite(shape))
        throw ParameterError("gamma shape must be positive, got " + std::to_string(shape));
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw ParameterError("gamma scale must be positive, got " + std::to_string(scale));

    double const boosted = shape < 1.0 ? shape + 1.0 : shape;
    double const d = boosted - 1.0 / 3.0;
    double const c = 1.0 / std::sqrt(9.0 * d);

    double v, z, u;
    do
    {
        do
        {
            z = stream.normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        u = stream.uniform_open();
    } while (u > 1.0 - 0.0331 * z * z * z * z
             && std::log(u) > 0.5 * z * z + d * (1.0 - v + std::log(v)));

    double result = d * v * scale;
    if (boosted != shape)
        result *= std::exp(std::log(stream.uniform_open()) / shape);
    return result;
}

double sample_chi(double alpha, Stream& stream)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw ParameterError("chi parameter must be positive, got " + std::to_string(alpha));
    return std::sqrt(sample_gamma(0.5 * alpha, 2.0, stream));
}

double chi_pdf(double alpha, double x)
{
    if (x < 0.0)
        return 0.0;
    if (x == 0.0)
        return alpha < 1.0 ? INFINITY : (alpha == 1.0 ? std::sqrt(2.0 / M_PI) : 0.0);
    double const log_pdf = (1.0 - 0.5 * alpha) * std::log(2.0) - std::lgamma(0.5 * alpha)
                           - 0.5 * x * x + (alpha - 1.0) * std::log(x);
    return std::exp(log_pdf);
}

}  // namespace nhbe
