#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nhbe/core.hpp"
#include "nhbe/specmap.hpp"

namespace nhbe {

/// Outcome of one identity check. Products are compared as complex
/// logarithms; relative_error = |exp(lhs - rhs) - 1| with the imaginary part
/// of lhs - rhs reduced to (-pi, pi]. lhs_log / rhs_log are the real parts.
struct IdentityReport
{
    std::string name;
    double lhs_log = 0.0;
    double rhs_log = 0.0;
    double relative_error = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string details;
};

/// Delta(lambda)^2 prod r_j = prod_j b_j^j.
IdentityReport vandermonde_identity(SpectralCoordinates const& c, TridiagonalModel const& t,
                                    double tol = 1e-8);

struct JacobianOptions
{
    /// Central-difference step, relative to the modulus of each complex coordinate.
    double step = 1e-5;
    double tol = 1e-4;
};

/*!
 * Real (4n-2) x (4n-2) Jacobian of (r_1..r_{n-1}, lambda_1..lambda_n) ->
 * (a, b) by central differences on reconstruct, with r_n = 1 - sum of the
 * others. Real and imaginary parts are separate coordinates, so the
 * determinant equals |J|^2 for the holomorphic Jacobian J; the check
 * compares sqrt|det| with prod|b_j| / prod_{k=1..n} |r_k|. n <= 6.
 */
IdentityReport jacobian_fd_check(SpectralCoordinates const& c, JacobianOptions const& options = {});

/// log|det| of the finite-difference Jacobian at the given relative step.
double jacobian_fd_log_determinant(SpectralCoordinates const& c, double step);

struct FdConvergence
{
    double step = 0.0;
    double error_h = 0.0;
    double error_half = 0.0;
    /// log2(error_h / error_half). Central differences give 2 in general;
    /// for a holomorphic map the h^2 terms cancel in the real determinant
    /// and the observed order is 4.
    double order = 0.0;
    /// order >= 1.5: the error decreases at least as fast as h^2.
    bool second_order = false;
};

/// Errors of jacobian_fd_check at step and step / 2. Both errors below 1e-12
/// (stencil exact to rounding, e.g. n <= 2) counts as second order.
FdConvergence jacobian_fd_convergence(SpectralCoordinates const& c, double step = 1e-2);

/// sum_j r_j lambda_j^k = e_1^t T^k e_1 for k = 0..K (K <= 2n - 1). Powers are
/// taken of lambda / s and T / s with s = max|lambda_j|; the error of each k
/// is relative to max(|e_1^t T^k e_1|, sum_j |r_j| |lambda_j|^k).
IdentityReport moment_identities(TridiagonalModel const& t, SpectralCoordinates const& c,
                                 std::size_t K, double tol = 1e-7);

/*!
 * The three product identities over the spectrum:
 *   prod_i chi_{n-1}(lambda_i) = (-1)^{n(n-1)/2} prod_j b_j^j
 *   prod_i chi_n'(lambda_i)    = (-1)^{n(n-1)/2} Delta(lambda)^2
 *   prod_j r_j                 = prod_j chi_{n-1}(lambda_j) / chi_n'(lambda_j)
 * chi_{n-1} and chi_n' come from charpoly_at_eigenvalue; Delta and the b
 * products are formed directly.
 */
std::vector<IdentityReport> product_identities(TridiagonalModel const& t,
                                               SpectralCoordinates const& c, double tol = 1e-8);

/// Which measure on the free r_k the f(lambda) integrand uses.
enum class FMeasure
{
    /// exp(-g) prod_{k=1..n} |r_k|^{beta/2-1} / |r_n| d^2r_1..d^2r_{n-1}:
    /// the density implied by the Jacobian, symmetric in r_1..r_n.
    corrected,
    /// The same without 1/|r_n|.
    literal,
};

struct FEstimateOptions
{
    std::size_t samples = 1'000'000;
    std::size_t workers = 1;
    FMeasure measure = FMeasure::corrected;
};

struct FEstimate
{
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t valid = 0;
    std::size_t total = 0;
};

/*!
 * Importance-sampling estimate of f(lambda) for n in {2, 3}, with
 * r_n = 1 - r_1 - ... - r_{n-1} and g = g_exponent.
 *
 * The proposal is an equal mixture over which r_m is the dependent
 * coordinate; in each component the remaining r_k have uniform phase and
 * |r_k| ~ Gamma(beta/2, 1). Samples where reconstruction breaks down
 * contribute zero; fewer than 10% usable samples raises CoverageError.
 * Samples are drawn in fixed blocks from stream.substream(block), so the
 * result does not depend on the worker count.
 */
FEstimate f_factor_estimate(std::span<Cx const> lambda, double beta, Stream const& stream,
                            FEstimateOptions const& options = {});

struct ZnormReport
{
    double beta = 0.0;
    std::size_t n = 0;
    /// Gaussian a-factor = 2 pi; b-factor_j = 2 pi 2^{beta j/4 - 1} Gamma(beta j/4).
    std::vector<IdentityReport> factors;
    double log_quadrature = 0.0;
    double log_formula = 0.0;
    /// quadrature total / displayed Z_beta; reported, not asserted.
    double ratio = 0.0;
    /// (2 pi)^{n/2}: the ratio implied by the factorization.
    double factorized_ratio = 0.0;
};

/// Normalization of the matrix-element density by factorized 1D
/// quadratures, compared with the closed form of Z_beta. n <= 4.
ZnormReport znorm_check(double beta, std::size_t n, double tol = 1e-8);

/// n = 1: the two-dimensional Gaussian integral by nested quadrature against
/// the product of the 1D factors.
IdentityReport znorm_direct_n1(double tol = 1e-10);

}  // namespace nhbe
