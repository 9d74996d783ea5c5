#pragma once

#include <Eigen/Dense>

#include "nhbe/core.hpp"
#include "nhbe/rng.hpp"

namespace testing {

using nhbe::Cx;

// Dense layout: a_n top-left down to a_1 bottom-right, ones above the
// diagonal, b_{n-1} .. b_1 below it.
inline Eigen::MatrixXcd dense(nhbe::TridiagonalModel const& t)
{
    auto const n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        m(i, i) = t.a[static_cast<std::size_t>(n - 1 - i)];
        if (i + 1 < n)
        {
            m(i, i + 1) = 1.0;
            m(i + 1, i) = t.b[static_cast<std::size_t>(n - 2 - i)];
        }
    }
    return m;
}

inline nhbe::TridiagonalModel sample(double beta, std::size_t n, std::uint64_t seed)
{
    nhbe::Stream s(seed);
    return nhbe::sample_matrix({beta, n, seed}, s);
}

inline std::vector<Cx> dense_eigenvalues(nhbe::TridiagonalModel const& t)
{
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(dense(t), false);
    std::vector<Cx> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return out;
}

// Symmetric 2x2: a = (0, 0), b = (1); lambda = +-1, r = (1/2, 1/2).
inline nhbe::TridiagonalModel symmetric2()
{
    return nhbe::TridiagonalModel({Cx{0, 0}, Cx{0, 0}}, {Cx{1, 0}});
}

// Rows (6, 1) / (-16, -2): eigenvalue 2 with a single eigenvector.
inline nhbe::TridiagonalModel counterexample()
{
    return nhbe::TridiagonalModel({Cx{-2, 0}, Cx{6, 0}}, {Cx{-16, 0}});
}

}  // namespace testing
