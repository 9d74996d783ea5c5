#pragma once

#include <cmath>

#include "nhbe/core.hpp"

namespace nhbe::detail {

struct ScaledEval
{
    Cx value;
    Cx derivative;
    // Same recurrence run on |xi|, |a_k|, |b_k|: bounds the size of the terms
    // that were summed, hence the rounding error of value.
    double magnitude;
    // Same bound for derivative.
    double derivative_magnitude;
    double log_scale;
};

// chi_k of the trailing k x k block and its derivative; all three quantities
// share one scale factor exp(log_scale).
inline ScaledEval trailing_recurrence(TridiagonalModel const& t, std::size_t k, Cx xi)
{
    constexpr double big = 0x1.0p+400;
    constexpr double shrink = 0x1.0p-400;
    double const log_shrink = -400.0 * std::log(2.0);

    Cx p_prev{0.0, 0.0}, p{1.0, 0.0};
    Cx d_prev{0.0, 0.0}, d{0.0, 0.0};
    double m_prev = 0.0, m = 1.0;
    double dm_prev = 0.0, dm = 0.0;
    double log_scale = 0.0;
    double const axi = std::abs(xi);
    for (std::size_t i = 1; i <= k; ++i)
    {
        Cx const shift = xi - t.a[i - 1];
        Cx const bb = i >= 2 ? t.b[i - 2] : Cx{};
        double const abb = std::abs(bb);
        Cx const p_next = shift * p - bb * p_prev;
        Cx const d_next = p + shift * d - bb * d_prev;
        double const m_next = (axi + std::abs(t.a[i - 1])) * m + abb * m_prev;
        double const dm_next = m + (axi + std::abs(t.a[i - 1])) * dm + abb * dm_prev;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        m_prev = m;
        m = m_next;
        dm_prev = dm;
        dm = dm_next;
        if (m > big)
        {
            p *= shrink;
            p_prev *= shrink;
            d *= shrink;
            d_prev *= shrink;
            m *= shrink;
            m_prev *= shrink;
            dm *= shrink;
            dm_prev *= shrink;
            log_scale -= log_shrink;
        }
    }
    return {p, d, m, dm, log_scale};
}

}  // namespace nhbe::detail
