#include <algorithm>
#include <cmath>

#include <catch_amalgamated.hpp>

#include "nhbe/core.hpp"
#include "nhbe/eigensolve.hpp"
#include "support.hpp"

using nhbe::Cx;
using nhbe::TridiagonalModel;

TEST_CASE("sample_matrix shapes and n = 1", "[core]")
{
    TridiagonalModel const t1 = testing::sample(2.0, 1, 3);
    CHECK(t1.a.size() == 1);
    CHECK(t1.b.empty());

    TridiagonalModel const t = testing::sample(1.0, 7, 3);
    CHECK(t.a.size() == 7);
    CHECK(t.b.size() == 6);
    for (Cx b : t.b)
        CHECK(b != Cx{});
}

TEST_CASE("sampling is deterministic per seed", "[core]")
{
    CHECK(testing::sample(2.0, 9, 11) == testing::sample(2.0, 9, 11));
    CHECK_FALSE(testing::sample(2.0, 9, 11) == testing::sample(2.0, 9, 12));
}

TEST_CASE("E|b_j|^2 = beta j / 2", "[core]")
{
    // |b_j| ~ chi(alpha) with alpha = beta j / 2, and E chi_alpha^2 = alpha.
    constexpr int N = 100000;
    double const beta = 4.0;
    nhbe::Stream s(99);
    std::vector<double> sum(2, 0.0), sum_sq(2, 0.0);
    for (int i = 0; i < N; ++i)
    {
        TridiagonalModel const t = nhbe::sample_matrix({beta, 3, 0}, s);
        for (std::size_t j = 0; j < 2; ++j)
        {
            double const v = std::norm(t.b[j]);
            sum[j] += v;
            sum_sq[j] += v * v;
        }
    }
    for (std::size_t j = 0; j < 2; ++j)
    {
        double const alpha = beta * static_cast<double>(j + 1) / 2.0;
        double const mean = sum[j] / N;
        double const var = sum_sq[j] / N - mean * mean;
        INFO("b_" << j + 1);
        CHECK(std::abs(mean - alpha) < 5.0 * std::sqrt(var / N));
    }
    // b_2 at beta = 4: alpha = 4.
    CHECK(std::abs(sum[1] / N - 4.0) < 0.1);
}

TEST_CASE("ensemble parameters are validated", "[core]")
{
    CHECK_THROWS_AS((nhbe::EnsembleParams{0.0, 3, 0}.validate()), nhbe::ParameterError);
    CHECK_THROWS_AS((nhbe::EnsembleParams{-1.0, 3, 0}.validate()), nhbe::ParameterError);
    CHECK_THROWS_AS((nhbe::EnsembleParams{NAN, 3, 0}.validate()), nhbe::ParameterError);
    CHECK_THROWS_AS((nhbe::EnsembleParams{2.0, 0, 0}.validate()), nhbe::ParameterError);
    CHECK_NOTHROW((nhbe::EnsembleParams{0.5, 1, 0}.validate()));
}

TEST_CASE("validate rejects mismatched bands", "[core]")
{
    TridiagonalModel t;
    t.a = {Cx{1, 0}, Cx{2, 0}};
    t.b = {};
    CHECK_THROWS_AS(nhbe::validate(t), nhbe::DimensionError);
    t.a.clear();
    CHECK_THROWS(nhbe::validate(t));
}

TEST_CASE("frobenius_sq examples and dense oracle", "[core]")
{
    CHECK(nhbe::frobenius_sq(TridiagonalModel({Cx{3, 4}}, {})) == Catch::Approx(25.0));
    CHECK(nhbe::frobenius_sq(testing::symmetric2()) == Catch::Approx(2.0));

    TridiagonalModel const t = testing::sample(2.0, 6, 5);
    double const dense = testing::dense(t).squaredNorm();
    CHECK(std::abs(nhbe::frobenius_sq(t) - dense) <= 1e-12 * dense);

    double elements = 0.0;
    for (Cx a : t.a)
        elements += std::norm(a);
    for (Cx b : t.b)
        elements += std::norm(b);
    CHECK(std::abs(nhbe::frobenius_sq(t) - 5.0 - elements) <= 1e-12 * elements);
}

TEST_CASE("matvec and rmatvec against dense products", "[core]")
{
    TridiagonalModel const z({Cx{}, Cx{}}, {Cx{2, 1}});
    std::vector<Cx> const e1 = {Cx{1, 0}, Cx{}};
    auto const v = nhbe::matvec(z, e1);
    CHECK(v[0] == Cx{});
    CHECK(v[1] == Cx(2, 1));

    TridiagonalModel const id({Cx{1, 0}, Cx{1, 0}, Cx{1, 0}}, {Cx{}, Cx{}});
    std::vector<Cx> const x = {Cx{1, 2}, Cx{3, 4}, Cx{5, 6}};
    auto const y = nhbe::matvec(id, x);
    CHECK(y[0] == x[0] + x[1]);
    CHECK(y[1] == x[1] + x[2]);
    CHECK(y[2] == x[2]);

    TridiagonalModel const t = testing::sample(2.0, 8, 17);
    nhbe::Stream s(3);
    std::vector<Cx> w(8);
    for (auto& c : w)
        c = nhbe::sample_normal_complex(s);
    Eigen::VectorXcd const wv = Eigen::Map<Eigen::VectorXcd>(w.data(), 8);
    Eigen::VectorXcd const col = testing::dense(t) * wv;
    Eigen::RowVectorXcd const row = wv.transpose() * testing::dense(t);
    auto const mv = nhbe::matvec(t, w);
    auto const rv = nhbe::rmatvec(t, w);
    for (int i = 0; i < 8; ++i)
    {
        CHECK(std::abs(mv[i] - col(i)) < 1e-14 * (1.0 + std::abs(col(i))));
        CHECK(std::abs(rv[i] - row(i)) < 1e-14 * (1.0 + std::abs(row(i))));
    }
}

TEST_CASE("reduce_to_unit_superdiagonal", "[core]")
{
    nhbe::GeneralTridiagonal g;
    g.a = {Cx{}, Cx{}};
    g.btilde = {Cx{3, 0}};
    g.c = {Cx{2, 0}};
    nhbe::Reduction const r = nhbe::reduce_to_unit_superdiagonal(g);
    CHECK(r.model.b[0] == Cx(6, 0));
    CHECK(r.scaling[0] == Cx(1, 0));
    CHECK(r.scaling[1] == Cx(2, 0));

    nhbe::GeneralTridiagonal ones;
    ones.a = {Cx{1, 1}, Cx{2, 0}, Cx{0, -1}};
    ones.btilde = {Cx{0.5, 0}, Cx{-1, 2}};
    ones.c = {Cx{1, 0}, Cx{1, 0}};
    nhbe::Reduction const same = nhbe::reduce_to_unit_superdiagonal(ones);
    CHECK(same.model.a == ones.a);
    CHECK(same.model.b == ones.btilde);

    g.c = {Cx{}};
    CHECK_THROWS_AS(nhbe::reduce_to_unit_superdiagonal(g), nhbe::DegenerateInputError);
}

TEST_CASE("reduction preserves the spectrum and characteristic polynomial", "[core]")
{
    nhbe::Stream s(2718);
    for (std::size_t n : {5, 12, 20})
    {
        nhbe::GeneralTridiagonal g;
        for (std::size_t i = 0; i < n; ++i)
            g.a.push_back(nhbe::sample_normal_complex(s));
        for (std::size_t i = 0; i + 1 < n; ++i)
        {
            g.btilde.push_back(nhbe::sample_normal_complex(s));
            g.c.push_back(nhbe::sample_normal_complex(s));
        }
        auto const dn = static_cast<Eigen::Index>(n);
        Eigen::MatrixXcd gt = Eigen::MatrixXcd::Zero(dn, dn);
        for (Eigen::Index i = 0; i < dn; ++i)
        {
            gt(i, i) = g.a[n - 1 - static_cast<std::size_t>(i)];
            if (i + 1 < dn)
            {
                gt(i, i + 1) = g.c[n - 2 - static_cast<std::size_t>(i)];
                gt(i + 1, i) = g.btilde[n - 2 - static_cast<std::size_t>(i)];
            }
        }
        TridiagonalModel const t = nhbe::reduce_to_unit_superdiagonal(g).model;

        for (int k = 0; k < 10; ++k)
        {
            Cx const xi = 2.0 * nhbe::sample_normal_complex(s);
            Cx const det_g = (xi * Eigen::MatrixXcd::Identity(dn, dn) - gt).determinant();
            nhbe::CharpolyValue const v = nhbe::charpoly_eval(t, xi);
            Cx const det_t = v.value * std::exp(v.log_scale);
            INFO("n " << n << " xi " << xi);
            CHECK(std::abs(det_t - det_g) <= 1e-10 * std::abs(det_g));
        }

        if (n == 5)
        {
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(gt, false);
            std::vector<Cx> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
            std::vector<Cx> const et = testing::dense_eigenvalues(t);
            CHECK(nhbe::multiset_distance(ev, et) < 1e-10);
        }
    }
}
