#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nhbe/errors.hpp"
#include "nhbe/rng.hpp"

namespace nhbe {

/*!
 * Tridiagonal matrix with unit superdiagonal,
 *
 *     | a_n      1                      |
 *     | b_{n-1}  a_{n-1}  1             |
 *     |          ...      ...     ...   |
 *     |                   b_1     a_1   |
 *
 * Index convention (used everywhere in this library):
 *  - a and b are stored bottom-up: a[0] = a_1 is the bottom-right entry,
 *    a[n-1] = a_n the top-left; b[0] = b_1 is the bottom subdiagonal entry,
 *    b[n-2] = b_{n-1} the top one.
 *  - Vectors that multiply the matrix (matvec, eigenvectors, e_1, ...) are in
 *    ordinary top-down row order: v[0] pairs with the row holding a_n.
 * diag_at(i) / sub_at(i) translate a 0-based dense row index to the bands.
 */
struct TridiagonalModel
{
    std::vector<Cx> a;
    std::vector<Cx> b;

    TridiagonalModel() = default;
    TridiagonalModel(std::vector<Cx> diag, std::vector<Cx> sub);

    std::size_t size() const { return a.size(); }

    /// Diagonal entry in dense row i (0-based, top-down).
    Cx diag_at(std::size_t i) const { return a[a.size() - 1 - i]; }
    /// Subdiagonal entry at dense position (i, i-1), 1 <= i < n.
    Cx sub_at(std::size_t i) const { return b[a.size() - 1 - i]; }

    friend bool operator==(TridiagonalModel const&, TridiagonalModel const&) = default;
};

/// Throws DimensionError unless |b| = |a| - 1 and all entries are finite.
void validate(TridiagonalModel const& t);

/*!
 * General complex tridiagonal matrix: diagonal a, subdiagonal btilde,
 * superdiagonal c, all stored bottom-up like TridiagonalModel
 * (c[n-2] = c_{n-1} sits at dense position (0, 1)).
 */
struct GeneralTridiagonal
{
    std::vector<Cx> a;
    std::vector<Cx> btilde;
    std::vector<Cx> c;

    std::size_t size() const { return a.size(); }
};

struct EnsembleParams
{
    double beta = 2.0;
    std::size_t n = 1;
    std::uint64_t seed = 0;

    /// Throws ParameterError for beta <= 0 (or non-finite) and n == 0.
    void validate() const;
};

/// Result of the diagonal similarity T = C T~ C^{-1}.
struct Reduction
{
    TridiagonalModel model;
    /// Diagonal of C, top-down: (1, c_{n-1}, c_{n-1} c_{n-2}, ...).
    std::vector<Cx> scaling;
};

/// Draws one matrix: a_j complex normal, |b_j| ~ chi(beta j / 2), arg b_j
/// uniform. Draw order is a_1..a_n then (modulus, phase) for b_1..b_{n-1};
/// an exactly zero b_j is redrawn.
TridiagonalModel sample_matrix(EnsembleParams const& params, Stream& stream);

/// Maps a general tridiagonal matrix to the unit-superdiagonal form with the
/// same spectrum (b_j = c_j btilde_j). Throws DegenerateInputError on a zero
/// c_j or btilde_j.
Reduction reduce_to_unit_superdiagonal(GeneralTridiagonal const& g);

/// Squared Frobenius norm of the dense matrix, counting the n-1 unit entries.
double frobenius_sq(TridiagonalModel const& t);

/// Dense-equivalent product T v in O(n).
std::vector<Cx> matvec(TridiagonalModel const& t, std::span<Cx const> v);
/// Row-vector product v^t T in O(n).
std::vector<Cx> rmatvec(TridiagonalModel const& t, std::span<Cx const> v);

}  // namespace nhbe
