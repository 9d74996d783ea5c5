#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nhbe/core.hpp"
#include "nhbe/errors.hpp"

namespace nhbe {

inline constexpr std::uint32_t store_format_version = 1;

struct RunManifest
{
    double beta = 0.0;
    std::size_t n = 0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::uint32_t format_version = store_format_version;
};

/// Solver diagnostics gathered during run_ensemble.
struct RunStats
{
    std::size_t failures = 0;
    std::size_t degenerate = 0;
    double max_residual = 0.0;
};

inline constexpr std::uint8_t flag_degenerate = 1;
inline constexpr std::uint8_t flag_solver_failure = 2;

struct EigenRecord
{
    std::uint64_t matrix_index = 0;
    Cx lambda;
    std::uint8_t flags = 0;

    friend bool operator==(EigenRecord const&, EigenRecord const&) = default;
};

/// Records are ordered by matrix index, canonical order within a matrix.
struct SampleStore
{
    RunManifest manifest;
    RunStats stats;
    std::vector<EigenRecord> records;
};

/// More than 1% of the matrices in a run failed to converge.
class RunAbortedError : public Error
{
  public:
    using Error::Error;
};

/*!
 * Draws `samples` matrices, matrix i from
 * Stream(params.seed).substream(i), and appends their QR eigenvalues to
 * sink. Matrices are distributed over `workers` threads; the stored result
 * does not depend on the worker count. Degenerate spectra are kept and
 * flagged. A matrix whose QR iteration fails contributes its deflated
 * eigenvalues flagged as solver failures; more than 1% failures aborts.
 */
RunManifest run_ensemble(EnsembleParams const& params, std::size_t samples, std::size_t workers,
                         SampleStore& sink);

struct DensityGrid
{
    double extent = 0.0;
    std::size_t bins = 0;
    /// counts[iy * bins + ix]; ix along Re, iy along Im, both increasing.
    std::vector<std::uint64_t> counts;
    std::size_t dropped = 0;

    std::uint64_t at(std::size_t ix, std::size_t iy) const { return counts[iy * bins + ix]; }
};

/// 2D histogram over [-extent, extent)^2 with half-open bins.
DensityGrid density_grid(SampleStore const& store, double extent, std::size_t bins);

/// 1.05 * max|lambda| over the store (1 for an empty store).
double auto_extent(SampleStore const& store);

struct ChiSquareResult
{
    double chi2 = 0.0;
    std::size_t dof = 0;
    double p = 0.0;
};

/// Chi-square test of arg(lambda) against the uniform law on bins equal sectors.
ChiSquareResult angular_uniformity(SampleStore const& store, std::size_t bins);

/// Same test on raw values, for synthetic data.
ChiSquareResult angular_uniformity(std::vector<Cx> const& values, std::size_t bins);

struct RadialBin
{
    double radius = 0.0;
    double density = 0.0;
};

/// Counts per annulus of [0, max|lambda|] over annulus area and total count.
std::vector<RadialBin> radial_profile(SampleStore const& store, std::size_t bins);

/// Counts per annulus on [0, rmax]; values beyond rmax are dropped.
std::vector<std::uint64_t> radial_counts(std::vector<Cx> const& values, std::size_t bins,
                                         double rmax);

/// Chi-square homogeneity test of two radial count histograms on common
/// annuli spanning both samples.
ChiSquareResult radial_two_sample(SampleStore const& x, SampleStore const& y, std::size_t bins);

struct KsResult
{
    double statistic = 0.0;
    double p = 0.0;
};

/// KS test of |lambda| against the modulus of a complex Gaussian with unit
/// variance per component, CDF 1 - exp(-r^2 / 2).
KsResult radial_ks_gaussian(std::vector<Cx> const& values);

/// P(K > x) for the asymptotic Kolmogorov distribution.
double kolmogorov_survival(double x);

std::vector<Cx> eigenvalues_of(SampleStore const& store);

void write_store(std::ostream& out, SampleStore const& store);
SampleStore read_store(std::istream& in);
void persist(SampleStore const& store, std::string const& path);
SampleStore load(std::string const& path);

/// "ix,iy,re,im,count" with bin centers.
void write_grid_csv(std::ostream& out, DensityGrid const& grid);
/// Binary P5 graymap, log(1 + count) shading; the top row holds the largest Im.
void write_grid_pgm(std::ostream& out, DensityGrid const& grid);
/// "radius,density".
void write_profile_csv(std::ostream& out, std::vector<RadialBin> const& profile);

}  // namespace nhbe
