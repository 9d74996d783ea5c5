#pragma once

#include <Eigen/Dense>

#include "nhbe/core.hpp"

namespace nhbe::detail {

inline Eigen::MatrixXcd to_dense(TridiagonalModel const& t)
{
    auto const n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        m(i, i) = t.diag_at(static_cast<std::size_t>(i));
        if (i + 1 < n)
        {
            m(i, i + 1) = 1.0;
            m(i + 1, i) = t.sub_at(static_cast<std::size_t>(i + 1));
        }
    }
    return m;
}

}  // namespace nhbe::detail
