#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>

#include <catch_amalgamated.hpp>

#include "nhbe/mc.hpp"
#include "support.hpp"

using nhbe::Cx;
using nhbe::SampleStore;

namespace {

SampleStore ensemble(double beta, std::size_t n, std::size_t samples, std::uint64_t seed, std::size_t workers)
{
    SampleStore s;
    nhbe::run_ensemble({beta, n, seed}, samples, workers, s);
    return s;
}

SampleStore from_values(std::vector<Cx> const& values)
{
    SampleStore s;
    s.manifest.n = 1;
    s.manifest.samples = values.size();
    for (std::size_t i = 0; i < values.size(); ++i)
        s.records.push_back({i, values[i], 0});
    return s;
}

std::string serialized(SampleStore const& s)
{
    std::ostringstream out;
    nhbe::write_store(out, s);
    return out.str();
}

}  // namespace

TEST_CASE("n = 1 ensemble is the complex Gaussian", "[mc]")
{
    SampleStore const s = ensemble(2.0, 1, 100000, 5, 1);
    REQUIRE(s.records.size() == 100000);
    double sum = 0.0;
    for (nhbe::EigenRecord const& r : s.records)
        sum += std::norm(r.lambda);
    // E|a|^2 = 2.
    CHECK(std::abs(sum / 1e5 / 2.0 - 1.0) < 0.01);

    nhbe::KsResult const ks = nhbe::radial_ks_gaussian(nhbe::eigenvalues_of(s));
    CHECK(ks.p > 0.001);
}

TEST_CASE("stored result does not depend on the worker count", "[mc]")
{
    SampleStore const one = ensemble(2.0, 30, 40, 77, 1);
    SampleStore const four = ensemble(2.0, 30, 40, 77, 4);
    CHECK(one.records == four.records);
    CHECK(one.records.size() == 30 * 40);
    CHECK(one.stats.failures == 0);
    CHECK(one.stats.max_residual < 1e-10);
    for (std::size_t i = 0; i < one.records.size(); ++i)
        CHECK(one.records[i].matrix_index == i / 30);
}

TEST_CASE("density grid placement and rotation symmetry", "[mc]")
{
    nhbe::DensityGrid const g = nhbe::density_grid(from_values({Cx{0.01, 0.01}}), 1.0, 4);
    CHECK(g.at(2, 2) == 1);
    CHECK(g.dropped == 0);

    nhbe::DensityGrid const out = nhbe::density_grid(from_values({Cx{5, 0}}), 1.0, 4);
    CHECK(out.dropped == 1);

    // Adding each value rotated by 90 degrees makes the grid symmetric under that rotation.
    std::vector<Cx> values = nhbe::eigenvalues_of(ensemble(1.0, 10, 20, 3, 1));
    std::size_t const m = values.size();
    for (std::size_t i = 0; i < m; ++i)
        for (int k = 1; k < 4; ++k)
            values.push_back(values[i] * std::pow(Cx{0, 1}, k));
    std::size_t const bins = 32;
    nhbe::DensityGrid const sym = nhbe::density_grid(from_values(values), 20.0, bins);
    std::size_t mismatched = 0;
    for (std::size_t ix = 0; ix < bins; ++ix)
        for (std::size_t iy = 0; iy < bins; ++iy)
            if (sym.at(ix, iy) != sym.at(bins - 1 - iy, ix))
                ++mismatched;
    // Values landing exactly on a bin edge can shift by one bin under rotation.
    CHECK(mismatched <= 4);
}

TEST_CASE("angular uniformity test", "[mc]")
{
    for (std::uint64_t seed : {1, 2, 3})
    {
        nhbe::Stream s(seed);
        std::vector<Cx> v(20000);
        for (Cx& z : v)
            z = nhbe::sample_normal_complex(s);
        CHECK(nhbe::angular_uniformity(v, 16).p > 0.001);
    }

    nhbe::Stream s(9);
    std::vector<Cx> clustered(20000);
    for (Cx& z : clustered)
        z = std::polar(1.0, 0.5 * s.uniform());
    nhbe::ChiSquareResult const c = nhbe::angular_uniformity(clustered, 16);
    CHECK(c.p < 1e-6);
    CHECK(c.dof == 15);

    CHECK_THROWS_AS(nhbe::angular_uniformity(std::vector<Cx>(100, Cx{1, 1}), 16), nhbe::CoverageError);
}

TEST_CASE("radial profile and two-sample test", "[mc]")
{
    std::vector<Cx> ring;
    for (int k = 0; k < 100; ++k)
        ring.push_back(std::polar(0.55, 0.1 * k));
    ring.push_back(Cx{1, 0});
    std::vector<std::uint64_t> const counts = nhbe::radial_counts(ring, 4, 1.0);
    CHECK(counts == std::vector<std::uint64_t>{0, 0, 100, 1});

    std::vector<nhbe::RadialBin> const p = nhbe::radial_profile(from_values(ring), 4);
    REQUIRE(p.size() == 4);
    double const area = std::numbers::pi * (0.75 * 0.75 - 0.5 * 0.5);
    CHECK(std::abs(p[2].density - 100.0 / 101.0 / area) < 1e-12);

    nhbe::Stream s(4);
    std::vector<Cx> x(5000), y(5000), z(5000);
    for (std::size_t i = 0; i < 5000; ++i)
    {
        x[i] = nhbe::sample_normal_complex(s);
        y[i] = nhbe::sample_normal_complex(s);
        z[i] = 1.5 * nhbe::sample_normal_complex(s);
    }
    CHECK(nhbe::radial_two_sample(from_values(x), from_values(y), 20).p > 0.001);
    CHECK(nhbe::radial_two_sample(from_values(x), from_values(z), 20).p < 1e-6);
}

TEST_CASE("Kolmogorov survival function", "[mc]")
{
    CHECK(nhbe::kolmogorov_survival(0.0) == Catch::Approx(1.0));
    CHECK(std::abs(nhbe::kolmogorov_survival(1.36) - 0.0494) < 1e-3);
    CHECK(std::abs(nhbe::kolmogorov_survival(1.6276) - 0.01) < 1e-4);
    CHECK(nhbe::kolmogorov_survival(5.0) < 1e-20);
}

TEST_CASE("store round trip is byte-identical", "[mc]")
{
    SampleStore const s = ensemble(4.0, 6, 25, 12, 2);
    std::string const bytes = serialized(s);
    std::istringstream in(bytes);
    SampleStore const back = nhbe::read_store(in);
    CHECK(back.records == s.records);
    CHECK(back.manifest.seed == 12);
    CHECK(back.manifest.n == 6);
    CHECK(serialized(back) == bytes);

    std::string const path = (std::filesystem::temp_directory_path() / "nhbe_test_store.bin").string();
    nhbe::persist(s, path);
    CHECK(nhbe::load(path).records == s.records);
    std::remove(path.c_str());
    CHECK_THROWS_AS(nhbe::load(path), nhbe::IoError);
}

TEST_CASE("damaged stores raise FormatError", "[mc]")
{
    std::string const bytes = serialized(ensemble(2.0, 3, 4, 1, 1));

    std::istringstream truncated(bytes.substr(0, bytes.size() - 7));
    CHECK_THROWS_AS(nhbe::read_store(truncated), nhbe::FormatError);

    std::istringstream trailing(bytes + "x");
    CHECK_THROWS_AS(nhbe::read_store(trailing), nhbe::FormatError);

    std::string wrong_version = bytes;
    wrong_version[4] = 9;
    std::istringstream version(wrong_version);
    CHECK_THROWS_AS(nhbe::read_store(version), nhbe::FormatError);

    std::string wrong_magic = bytes;
    wrong_magic[0] = 'X';
    std::istringstream magic(wrong_magic);
    CHECK_THROWS_AS(nhbe::read_store(magic), nhbe::FormatError);
}

TEST_CASE("a million records round trip quickly", "[mc]")
{
    SampleStore s;
    s.manifest.n = 10;
    s.manifest.samples = 100000;
    nhbe::Stream rng(1);
    s.records.resize(1'000'000);
    for (std::size_t i = 0; i < s.records.size(); ++i)
        s.records[i] = {i / 10, nhbe::sample_normal_complex(rng), 0};

    auto const start = std::chrono::steady_clock::now();
    std::string const bytes = serialized(s);
    std::istringstream in(bytes);
    SampleStore const back = nhbe::read_store(in);
    double const seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(back.records == s.records);
    CHECK(seconds < 5.0);
}

TEST_CASE("large matrices keep small residuals", "[mc]")
{
    SampleStore const s = ensemble(2.0, 200, 10, 2024, 1);
    CHECK(s.records.size() == 2000);
    CHECK(s.stats.failures == 0);
    CHECK(s.stats.max_residual < 1e-7);
}

TEST_CASE("grid and profile writers", "[mc]")
{
    nhbe::DensityGrid const g = nhbe::density_grid(from_values({Cx{0.5, 0.5}, Cx{-0.5, -0.5}}), 1.0, 2);
    std::ostringstream pgm;
    nhbe::write_grid_pgm(pgm, g);
    std::string const image = pgm.str();
    CHECK(image.rfind("P5 2 2 255\n", 0) == 0);
    CHECK(image.size() == std::string("P5 2 2 255\n").size() + 4);

    std::ostringstream csv;
    nhbe::write_grid_csv(csv, g);
    CHECK(csv.str().rfind("ix,iy,re,im,count\n", 0) == 0);

    std::ostringstream prof;
    nhbe::write_profile_csv(prof, {{0.5, 1.0}});
    CHECK(prof.str().rfind("radius,density\n", 0) == 0);
}
