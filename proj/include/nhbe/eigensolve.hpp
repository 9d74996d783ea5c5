#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "nhbe/core.hpp"

namespace nhbe {

/// Eigenvalues in canonical order: descending modulus, ties by ascending
/// phase in [0, 2pi).
struct Spectrum
{
    std::vector<Cx> lambda;

    std::size_t size() const { return lambda.size(); }
};

struct EigenReport
{
    std::size_t iterations = 0;
    /// Largest backward error ||(T - lambda I) x|| / (||x|| ||T||_F) over the
    /// computed eigenvalues (see eigen_backward_error).
    double max_residual = 0.0;
    std::size_t deflation_count = 0;
    bool degenerate_flag = false;
};

struct EigenResult
{
    Spectrum spectrum;
    EigenReport report;
};

/// QR iteration did not converge; carries whatever eigenvalues had deflated.
class SolverError : public Error
{
  public:
    SolverError(std::string const& what, Spectrum partial, EigenReport report)
        : Error(what), partial_(std::move(partial)), report_(report)
    {
    }

    Spectrum const& partial() const { return partial_; }
    EigenReport const& report() const { return report_; }

  private:
    Spectrum partial_;
    EigenReport report_;
};

struct QrOptions
{
    /// Diagonal similarity making |super| = |sub| = sqrt|b_j| before iterating.
    bool balance = true;
    /// Deflate when |h_{k+1,k}| <= eps (|h_kk| + |h_{k+1,k+1}|).
    double deflation_eps = 8.0 * std::numeric_limits<double>::epsilon() / 2.0;
    /// Total sweep budget is sweeps_per_dim * n.
    std::size_t sweeps_per_dim = 30;
    /// Pairwise gap below degeneracy_rel_gap * ||T||_F flags the spectrum.
    double degeneracy_rel_gap = 1e-8;
    bool compute_residuals = true;
};

/// Eigenvalues of T by single-shift complex QR on the Hessenberg form
/// (eigenvalues only, no Schur vectors).
EigenResult eigenvalues_qr(TridiagonalModel const& t, QrOptions const& options = {});

/// Scaled polynomial value: true value = value * exp(log_scale), and the same
/// for the derivative.
struct CharpolyValue
{
    Cx value;
    Cx derivative;
    double log_scale = 0.0;

    Cx true_value() const;
    Cx true_derivative() const;
};

/*!
 * chi_k(xi) = det(xi I - T_{k,1}) where T_{k,1} keeps the last k rows and
 * columns (entries a_1..a_k, b_1..b_{k-1}). Three-term recurrence
 *     chi_k = (xi - a_k) chi_{k-1} - b_{k-1} chi_{k-2},  chi_0 = 1, chi_{-1} = 0,
 * with joint rescaling of value and derivative. 0 <= k <= n.
 */
CharpolyValue charpoly_trailing(TridiagonalModel const& t, std::size_t k, Cx xi);

/*!
 * chi_{n-1} (trailing block) and chi_n' at an eigenvalue lambda of T, as
 * complex logarithms.
 *
 * Evaluating the recurrence at a floating-point eigenvalue cannot resolve
 * chi_{n-1}(lambda) when it is tiny: lambda is then within rounding of an
 * eigenvalue of the trailing block. Instead the value is read off the
 * eigenvectors, which are generated by the leading-block recurrence above a
 * twist index and by the trailing-block recurrence below it, each run toward
 * the peak of |x_i y_i|:
 *   chi_{n-1}(lambda) = q_{n-k}(lambda) b_{n-1} ... b_{n-k+1} / p_{k-1}(lambda)
 *   chi_n'(lambda)    = sum_i p_{i-1}(lambda) q_{n-i}(lambda)
 * (p leading-block, q trailing-block polynomials). Both are identities only
 * at eigenvalues.
 */
struct EigenvalueCharpoly
{
    Cx log_trailing;
    Cx log_derivative;
    std::size_t twist = 1;
};

EigenvalueCharpoly charpoly_at_eigenvalue(TridiagonalModel const& t, Cx lambda);

/// chi_n(xi) and chi_n'(xi); the characteristic polynomial of T.
CharpolyValue charpoly_eval(TridiagonalModel const& t, Cx xi);

/// Characteristic polynomial of the leading j x j block (first j rows and
/// columns: a_n..a_{n-j+1}). Not the same family as charpoly_trailing.
Cx principal_charpoly_firstblock(TridiagonalModel const& t, std::size_t j, Cx xi);

/// Monic coefficients (ascending powers, size j+1) of the leading-block
/// characteristic polynomial.
std::vector<Cx> principal_charpoly_coefficients(TridiagonalModel const& t, std::size_t j);

struct AberthOptions
{
    std::size_t max_dim = 64;
    std::size_t max_iterations = 2000;
};

/// Roots of chi_n by Aberth-Ehrlich simultaneous iteration. Independent of
/// the QR path; used as an oracle. The Newton ratio chi_n / chi_n' is taken
/// as 1 / trace (z I - T)^{-1}, whose diagonal comes from twisted
/// factorizations; this stays accurate near roots where the plain
/// recurrence value is swamped by cancellation. A root whose corrections
/// stall below 1e-6 max(1, |z|) is accepted (multiple roots converge only
/// linearly, to about sqrt(eps)).
Spectrum eigenvalues_aberth(TridiagonalModel const& t, AberthOptions const& options = {});

bool canonical_less(Cx x, Cx y);
void canonical_sort(std::vector<Cx>& values);

/// Bottleneck-style distance between two equally sized multisets: the
/// largest |x - y| over a minimum-total-cost perfect matching.
double multiset_distance(std::span<Cx const> x, std::span<Cx const> y);

/// True when some pair of values is closer than threshold.
bool has_close_pair(std::span<Cx const> values, double threshold);

/// Backward error of an approximate eigenvalue: an upper bound on
/// sigma_min(T - lambda I) / ||T||_F, the smallest residual over three steps
/// of inverse iteration.
double eigen_backward_error(TridiagonalModel const& t, Cx lambda);

}  // namespace nhbe
