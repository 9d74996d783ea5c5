#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "nhbe/core.hpp"
#include "nhbe/eigensolve.hpp"

namespace nhbe {

/*!
 * Spectral side of the bijection: simple eigenvalues lambda and the first
 * components r of the right eigenvectors, normalized so that sum(r) = 1 and
 * the first left eigenvector is all ones. r_n is stored explicitly.
 */
struct SpectralCoordinates
{
    std::vector<Cx> lambda;
    std::vector<Cx> r;

    std::size_t size() const { return lambda.size(); }
};

/// R has the eigenvector-matrix rows r_j^t; Rinv has columns l_j, with
/// column 0 all ones and row 0 of R equal to r.
struct EigenvectorFrame
{
    Eigen::MatrixXcd R;
    Eigen::MatrixXcd Rinv;
};

/*!
 * How chi_{n-1}(lambda_j) is evaluated in
 * r_j = chi_{n-1}(lambda_j) / prod_{i != j}(lambda_j - lambda_i).
 *
 * recurrence: the plain three-term recurrence. Loses all relative accuracy
 * when r_j is tiny, since lambda_j is then close to an eigenvalue of the
 * trailing block and the recurrence value is cancellation noise.
 * twisted: charpoly_at_eigenvalue, which reads the value off the
 * eigenvector recurrences and keeps relative accuracy there.
 */
enum class RFormula
{
    twisted,
    recurrence,
};

struct CoordinateOptions
{
    double tol = 1e-8;
    RFormula formula = RFormula::twisted;
    /// Also compute r from a dense eigendecomposition and throw
    /// InconsistencyError if the two disagree beyond tol.
    bool dense_cross_check = false;
    QrOptions qr = {};
};

/// Extracts (lambda, r) from T: lambda by QR, r_j = chi_{n-1}(lambda_j) /
/// prod_{i != j}(lambda_j - lambda_i) with chi_{n-1} the trailing-block
/// polynomial. DomainError on a degenerate spectrum, ConditioningError when
/// some |r_j| underflows.
SpectralCoordinates spectral_coordinates(TridiagonalModel const& t,
                                         CoordinateOptions const& options = {});

/// Same, with an already computed spectrum (must be simple).
SpectralCoordinates spectral_coordinates(TridiagonalModel const& t, Spectrum const& spectrum,
                                         CoordinateOptions const& options = {});

/// Dense-eigendecomposition route: r_j = V_{1j} (V^{-1})_{j1}. Independent of
/// the characteristic-polynomial formula; n is expected to be modest.
SpectralCoordinates spectral_coordinates_dense(TridiagonalModel const& t);

struct ReconstructOptions
{
    double tol = 1e-8;
    /// Project each new r_{j+1}, l_{j+1} against the earlier frame vectors.
    /// Exact arithmetic is unaffected (those projections vanish); in floating
    /// point it keeps R Rinv = I as the recurrence runs.
    bool rebiorthogonalize = true;
    bool build_frame = true;
    /// Skip the sum(r) = 1 / distinctness checks (used by finite differences,
    /// which perturb around a validated point).
    bool validate_input = true;
};

struct Reconstruction
{
    TridiagonalModel model;
    EigenvectorFrame frame;  // empty when build_frame is false
    /// ||r_{n+1}|| relative to the size of the terms that produced it.
    double residual = 0.0;
};

/// Two-sided recurrence rebuilding T, R and R^{-1} from (lambda, r).
/// BreakdownError if some b_{n-j} vanishes, InconsistencyError if the
/// terminal residual r_{n+1} exceeds tol.
Reconstruction reconstruct(SpectralCoordinates const& c, ReconstructOptions const& options = {});

/*!
 * Exponent of the eigenvector factor: g = (||T||_F^2 - sum |lambda_j|^2) / 2,
 * which equals ||N||_F^2 / 2 for N the strictly upper part of a Schur form
 * of T = reconstruct(c). Nonnegative for every T.
 *
 * g_exponent_unit_offset returns g - (n - 1) / 2, the variant that subtracts
 * the unit superdiagonal before comparing with the eigenvalues; it is
 * negative whenever T is close to normal (e.g. real symmetric T).
 */
double g_exponent(SpectralCoordinates const& c);
double g_exponent_unit_offset(SpectralCoordinates const& c);

/// g evaluated from T and its spectrum without going through reconstruct.
double g_exponent(TridiagonalModel const& t, std::span<Cx const> lambda);

/// max_{jk} |(R Rinv - I)_{jk}|.
double biorthogonality_error(EigenvectorFrame const& frame);

struct Prop31Deviation
{
    /// max |chi_j(T) e_1 - e_{j+1} b_{n-1} ... b_{n-j}|
    double column = 0.0;
    /// max |e_1^t chi_j(T) - e_{j+1}^t|
    double row = 0.0;
};

/// Evaluates chi_j(T) e_1 and e_1^t chi_j(T) by Horner on the leading-block
/// polynomial coefficients and compares with the predicted unit vectors.
Prop31Deviation prop31_check(TridiagonalModel const& t, std::size_t j);

/// Max entrywise deviation between adj(lambda_j I - T) (dense cofactors) and
/// chi'(lambda_j) R_j L_j^t from the reconstructed frame, relative to the
/// largest adjugate entry. j is 0-based into c.lambda. n <= 20.
double adjugate_identity_error(TridiagonalModel const& t, SpectralCoordinates const& c,
                               std::size_t j);

/// max over entries of |x' - x| / max(|x|, 1) for x in (a, b).
double max_relative_deviation(TridiagonalModel const& x, TridiagonalModel const& y);

/// lambda -> lambda e^{i phi}; r unchanged.
SpectralCoordinates rotate(SpectralCoordinates c, double phi);

}  // namespace nhbe
