#include <algorithm>
#include <cmath>
#include <numbers>

#include <catch_amalgamated.hpp>

#include "nhbe/specmap.hpp"
#include "support.hpp"

using nhbe::Cx;
using nhbe::SpectralCoordinates;
using nhbe::TridiagonalModel;

namespace {

// Coordinates with lambda ~ CN(0, 1) and r of random phase, normalized to sum 1.
SpectralCoordinates random_coordinates(std::size_t n, nhbe::Stream& s)
{
    SpectralCoordinates c;
    Cx sum{};
    for (std::size_t j = 0; j < n; ++j)
    {
        c.lambda.push_back(nhbe::sample_normal_complex(s));
        c.r.push_back(std::polar(0.5 + s.uniform(), 2.0 * std::numbers::pi * s.uniform()));
        sum += c.r.back();
    }
    for (Cx& r : c.r)
        r /= sum;
    return c;
}

double schur_g(TridiagonalModel const& t)
{
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(testing::dense(t));
    Eigen::MatrixXcd const u = schur.matrixT().triangularView<Eigen::StrictlyUpper>();
    return u.squaredNorm() / 2.0;
}

}  // namespace

TEST_CASE("symmetric 2x2 coordinates and reconstruction", "[specmap]")
{
    SpectralCoordinates const c = nhbe::spectral_coordinates(testing::symmetric2());
    REQUIRE(c.size() == 2);
    CHECK(std::abs(c.lambda[0] - Cx(1, 0)) < 1e-15);
    CHECK(std::abs(c.lambda[1] - Cx(-1, 0)) < 1e-15);
    CHECK(std::abs(c.r[0] - Cx(0.5, 0)) < 1e-15);
    CHECK(std::abs(c.r[1] - Cx(0.5, 0)) < 1e-15);

    nhbe::Reconstruction const rec = nhbe::reconstruct(c);
    CHECK(std::abs(rec.model.a[0]) < 1e-15);
    CHECK(std::abs(rec.model.a[1]) < 1e-15);
    CHECK(std::abs(rec.model.b[0] - Cx(1, 0)) < 1e-15);
}

TEST_CASE("n = 1 coordinates", "[specmap]")
{
    TridiagonalModel const t({Cx{2, -1}}, {});
    SpectralCoordinates const c = nhbe::spectral_coordinates(t);
    CHECK(c.lambda == std::vector<Cx>{Cx{2, -1}});
    CHECK(c.r == std::vector<Cx>{Cx{1, 0}});
    CHECK(nhbe::reconstruct(c).model == t);
    CHECK(nhbe::g_exponent(c) == 0.0);
}

TEST_CASE("r agrees with the dense eigenvector route", "[specmap]")
{
    for (double beta : {0.5, 2.0})
    {
        TridiagonalModel const t = testing::sample(beta, 8, 64);
        SpectralCoordinates const c = nhbe::spectral_coordinates(t);
        SpectralCoordinates const d = nhbe::spectral_coordinates_dense(t);
        REQUIRE(c.size() == d.size());
        for (std::size_t j = 0; j < c.size(); ++j)
        {
            auto const k = static_cast<std::size_t>(
                std::min_element(d.lambda.begin(), d.lambda.end(),
                                 [&](Cx x, Cx y) { return std::abs(x - c.lambda[j]) < std::abs(y - c.lambda[j]); }) -
                d.lambda.begin());
            CHECK(std::abs(c.r[j] - d.r[k]) < 1e-8 * std::max(1.0, std::abs(d.r[k])));
        }
        Cx sum{};
        for (Cx r : c.r)
            sum += r;
        CHECK(std::abs(sum - Cx(1, 0)) < 1e-12);
    }
}

TEST_CASE("T -> (lambda, r) -> T round trip", "[specmap]")
{
    for (double beta : {0.5, 1.0, 4.0})
        for (std::size_t n : {2, 5, 12, 20})
        {
            TridiagonalModel const t = testing::sample(beta, n, static_cast<std::uint64_t>(n + 100 * beta));
            nhbe::Reconstruction const rec = nhbe::reconstruct(nhbe::spectral_coordinates(t));
            INFO("beta " << beta << " n " << n);
            CHECK(nhbe::max_relative_deviation(rec.model, t) < 1e-8);
            CHECK(nhbe::biorthogonality_error(rec.frame) < 1e-10);
        }
}

TEST_CASE("(lambda, r) -> T -> (lambda, r) round trip", "[specmap]")
{
    nhbe::Stream s(808);
    for (std::size_t n : {2, 4, 7})
    {
        SpectralCoordinates c = random_coordinates(n, s);
        nhbe::canonical_sort(c.lambda);
        TridiagonalModel const t = nhbe::reconstruct(c).model;
        SpectralCoordinates const back = nhbe::spectral_coordinates(t);
        REQUIRE(back.size() == n);
        for (std::size_t j = 0; j < n; ++j)
        {
            INFO("n " << n << " j " << j);
            CHECK(std::abs(back.lambda[j] - c.lambda[j]) < 1e-8 * std::max(1.0, std::abs(c.lambda[j])));
            CHECK(std::abs(back.r[j] - c.r[j]) < 1e-8 * std::max(1.0, std::abs(c.r[j])));
        }
    }
}

TEST_CASE("frame rows and columns", "[specmap]")
{
    TridiagonalModel const t = testing::sample(2.0, 10, 5);
    SpectralCoordinates const c = nhbe::spectral_coordinates(t);
    nhbe::Reconstruction const rec = nhbe::reconstruct(c);
    CHECK(nhbe::biorthogonality_error(rec.frame) < 1e-10);
    for (Eigen::Index i = 0; i < rec.frame.Rinv.rows(); ++i)
        CHECK(std::abs(rec.frame.Rinv(i, 0) - Cx(1, 0)) < 1e-10);
    for (std::size_t j = 0; j < c.size(); ++j)
        CHECK(std::abs(rec.frame.R(0, static_cast<Eigen::Index>(j)) - c.r[j]) < 1e-12);
}

TEST_CASE("invalid coordinates and defective matrices are rejected", "[specmap]")
{
    SpectralCoordinates c;
    c.lambda = {Cx{1, 0}, Cx{-1, 0}};
    c.r = {Cx{0.5, 0}, Cx{0.6, 0}};
    CHECK_THROWS_AS(nhbe::reconstruct(c), nhbe::DomainError);

    c.lambda = {Cx{1, 0}, Cx{1, 0}};
    c.r = {Cx{0.5, 0}, Cx{0.5, 0}};
    CHECK_THROWS_AS(nhbe::reconstruct(c), nhbe::DomainError);

    CHECK_THROWS_AS(nhbe::spectral_coordinates(testing::counterexample()), nhbe::DomainError);
}

TEST_CASE("g is the Schur departure from normality", "[specmap]")
{
    SpectralCoordinates const sym = nhbe::spectral_coordinates(testing::symmetric2());
    CHECK(std::abs(nhbe::g_exponent(sym)) < 1e-14);
    CHECK(std::abs(nhbe::g_exponent_unit_offset(sym) + 0.5) < 1e-14);

    for (std::size_t n : {3, 6, 10})
    {
        TridiagonalModel const t = testing::sample(1.0, n, 31 * n);
        SpectralCoordinates const c = nhbe::spectral_coordinates(t);
        double const g = nhbe::g_exponent(c);
        double const oracle = schur_g(t);
        INFO("n " << n);
        CHECK(g >= 0.0);
        CHECK(std::abs(g - oracle) < 1e-8 * std::max(1.0, oracle));
        CHECK(std::abs(nhbe::g_exponent(t, c.lambda) - oracle) < 1e-8 * std::max(1.0, oracle));
    }
}

TEST_CASE("g is nonnegative on random coordinates", "[specmap]")
{
    nhbe::Stream s(4242);
    for (int k = 0; k < 500; ++k)
    {
        SpectralCoordinates const c = random_coordinates(2 + static_cast<std::size_t>(k % 9), s);
        CHECK(nhbe::g_exponent(c) >= -1e-10 * std::max(1.0, nhbe::frobenius_sq(nhbe::reconstruct(c).model)));
    }
}

TEST_CASE("rotation leaves g and the moduli of T unchanged", "[specmap]")
{
    nhbe::Stream s(17);
    SpectralCoordinates const c = random_coordinates(5, s);
    double const g = nhbe::g_exponent(c);
    TridiagonalModel const t = nhbe::reconstruct(c).model;
    for (double phi : {0.3, 1.0, 2.5, -1.7})
    {
        SpectralCoordinates const rc = nhbe::rotate(c, phi);
        CHECK(std::abs(nhbe::g_exponent(rc) - g) < 1e-10 * std::max(1.0, g));
        TridiagonalModel const rt = nhbe::reconstruct(rc).model;
        for (std::size_t i = 0; i < t.a.size(); ++i)
            CHECK(std::abs(std::abs(rt.a[i]) - std::abs(t.a[i])) < 1e-10 * std::max(1.0, std::abs(t.a[i])));
        for (std::size_t i = 0; i < t.b.size(); ++i)
            CHECK(std::abs(std::abs(rt.b[i]) - std::abs(t.b[i])) < 1e-10 * std::max(1.0, std::abs(t.b[i])));
    }
}

TEST_CASE("g grows at most quartically under lambda -> s lambda", "[specmap]")
{
    nhbe::Stream s(99);
    for (int k = 0; k < 5; ++k)
    {
        SpectralCoordinates const c = random_coordinates(2, s);
        SpectralCoordinates lo = c, hi = c;
        for (Cx& l : lo.lambda)
            l *= 100.0;
        for (Cx& l : hi.lambda)
            l *= 1000.0;
        double const slope = std::log(nhbe::g_exponent(hi) / nhbe::g_exponent(lo)) / std::log(10.0);
        CHECK(slope <= 4.1);
    }
}

TEST_CASE("chi_j(T) e_1 and e_1^t chi_j(T) are unit vectors", "[specmap]")
{
    TridiagonalModel const t1 = testing::sample(2.0, 6, 1);
    nhbe::Prop31Deviation const d1 = nhbe::prop31_check(t1, 1);
    CHECK(d1.column < 1e-12);
    CHECK(d1.row < 1e-12);

    for (std::size_t n : {2, 4, 6})
    {
        TridiagonalModel const t = testing::sample(0.5, n, 3 * n);
        for (std::size_t j = 1; j < n; ++j)
        {
            nhbe::Prop31Deviation const d = nhbe::prop31_check(t, j);
            INFO("n " << n << " j " << j);
            CHECK(d.column < 1e-8);
            CHECK(d.row < 1e-8);
        }
    }
}

TEST_CASE("adjugate is rank one at each eigenvalue", "[specmap]")
{
    TridiagonalModel const one({Cx{0.5, 0.5}}, {});
    CHECK(nhbe::adjugate_identity_error(one, nhbe::spectral_coordinates(one), 0) < 1e-14);

    TridiagonalModel const two = testing::symmetric2();
    SpectralCoordinates const c2 = nhbe::spectral_coordinates(two);
    for (std::size_t j = 0; j < 2; ++j)
        CHECK(nhbe::adjugate_identity_error(two, c2, j) < 1e-14);

    TridiagonalModel const t = testing::sample(2.0, 6, 61);
    SpectralCoordinates const c = nhbe::spectral_coordinates(t);
    for (std::size_t j = 0; j < 6; ++j)
        CHECK(nhbe::adjugate_identity_error(t, c, j) < 1e-8);
}
