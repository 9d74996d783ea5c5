#include "nhbe/specmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "charpoly_detail.hpp"
#include "dense_detail.hpp"

namespace nhbe {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kRFloor = 1e-300;

// prod_{i != j} (lambda_j - lambda_i) as a complex logarithm.
Cx log_derivative_product(std::span<Cx const> lambda, std::size_t j)
{
    Cx s{};
    for (std::size_t i = 0; i < lambda.size(); ++i)
        if (i != j)
            s += std::log(lambda[j] - lambda[i]);
    return s;
}

Cx dot(std::span<Cx const> x, std::span<Cx const> y)
{
    Cx s{};
    for (std::size_t k = 0; k < x.size(); ++k)
        s += x[k] * y[k];
    return s;
}

double norm2(std::span<Cx const> x)
{
    double s = 0.0;
    for (Cx z : x)
        s += std::norm(z);
    return std::sqrt(s);
}

void check_coordinates(SpectralCoordinates const& c, double tol)
{
    std::size_t const n = c.size();
    if (n == 0 || c.r.size() != n)
        throw DimensionError("spectral coordinates need |lambda| = |r| >= 1");
    Cx sum{};
    double abs_sum = 0.0;
    for (Cx z : c.r)
    {
        if (std::abs(z) < kRFloor)
            throw DomainError("spectral coordinates: some r_j is zero");
        sum += z;
        abs_sum += std::abs(z);
    }
    if (std::abs(sum - 1.0) > tol * static_cast<double>(n) * std::max(1.0, abs_sum))
        throw DomainError("spectral coordinates: r does not sum to one (sum = "
                          + std::to_string(sum.real()) + " + " + std::to_string(sum.imag())
                          + "i)");
    double scale = 0.0;
    for (Cx z : c.lambda)
        scale = std::max(scale, std::abs(z));
    if (has_close_pair(c.lambda, 64.0 * kEps * std::max(scale, 1.0)))
        throw DomainError("spectral coordinates: eigenvalues are not pairwise distinct");
}

}  // namespace

SpectralCoordinates spectral_coordinates(TridiagonalModel const& t, CoordinateOptions const& options)
{
    EigenResult const eig = eigenvalues_qr(t, options.qr);
    if (eig.report.degenerate_flag)
        throw DomainError("degenerate spectrum: repeated eigenvalue, outside the bijection domain");
    return spectral_coordinates(t, eig.spectrum, options);
}

SpectralCoordinates spectral_coordinates(TridiagonalModel const& t, Spectrum const& spectrum,
                                         CoordinateOptions const& options)
{
    validate(t);
    std::size_t const n = t.size();
    if (spectrum.size() != n)
        throw DimensionError("spectrum size does not match n");
    double const fro = std::sqrt(frobenius_sq(t));
    if (has_close_pair(spectrum.lambda, options.qr.degeneracy_rel_gap * fro))
        throw DomainError("degenerate spectrum: repeated eigenvalue, outside the bijection domain");

    SpectralCoordinates c;
    c.lambda = spectrum.lambda;
    c.r.resize(n);
    if (n == 1)
    {
        c.r[0] = 1.0;
        return c;
    }
    double const log_floor = std::log(kRFloor);
    for (std::size_t j = 0; j < n; ++j)
    {
        Cx log_r;
        if (options.formula == RFormula::twisted)
            log_r = charpoly_at_eigenvalue(t, c.lambda[j]).log_trailing
                    - log_derivative_product(c.lambda, j);
        else
        {
            auto const e = detail::trailing_recurrence(t, n - 1, c.lambda[j]);
            if (e.value == Cx{})
                throw ConditioningError("r_j vanishes: chi_{n-1}(lambda_j) == 0");
            log_r = std::log(e.value) + e.log_scale - log_derivative_product(c.lambda, j);
        }
        if (!std::isfinite(log_r.real()) && log_r.real() < 0.0)
            throw ConditioningError("r_j vanishes for j = " + std::to_string(j));
        if (log_r.real() < log_floor)
            throw ConditioningError("|r_j| below underflow guard for j = " + std::to_string(j));
        if (log_r.real() > std::log(std::numeric_limits<double>::max()))
            throw ConditioningError("|r_j| overflows for j = " + std::to_string(j));
        c.r[j] = std::exp(log_r);
    }

    if (options.dense_cross_check)
    {
        SpectralCoordinates const dense = spectral_coordinates_dense(t);
        for (std::size_t j = 0; j < n; ++j)
        {
            // Pair by nearest eigenvalue; orders can differ on near-ties.
            std::size_t best = 0;
            for (std::size_t k = 1; k < n; ++k)
                if (std::abs(dense.lambda[k] - c.lambda[j])
                    < std::abs(dense.lambda[best] - c.lambda[j]))
                    best = k;
            if (std::abs(dense.r[best] - c.r[j]) > options.tol * std::max(1.0, std::abs(c.r[j])))
                throw InconsistencyError("dense eigenvector cross-check disagrees on r_"
                                         + std::to_string(j));
        }
    }
    return c;
}

SpectralCoordinates spectral_coordinates_dense(TridiagonalModel const& t)
{
    validate(t);
    std::size_t const n = t.size();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(detail::to_dense(t), true);
    if (solver.info() != Eigen::Success)
        throw InconsistencyError("dense eigendecomposition failed");
    Eigen::MatrixXcd const v = solver.eigenvectors();
    Eigen::MatrixXcd const vinv = v.inverse();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return canonical_less(solver.eigenvalues()(static_cast<Eigen::Index>(x)),
                              solver.eigenvalues()(static_cast<Eigen::Index>(y)));
    });
    SpectralCoordinates c;
    for (std::size_t k : order)
    {
        auto const kk = static_cast<Eigen::Index>(k);
        c.lambda.push_back(solver.eigenvalues()(kk));
        c.r.push_back(v(0, kk) * vinv(kk, 0));
    }
    return c;
}

Reconstruction reconstruct(SpectralCoordinates const& c, ReconstructOptions const& options)
{
    if (options.validate_input)
        check_coordinates(c, options.tol);
    else if (c.size() == 0 || c.r.size() != c.size())
        throw DimensionError("spectral coordinates need |lambda| = |r| >= 1");

    std::size_t const n = c.size();
    std::span<Cx const> const lambda = c.lambda;

    Reconstruction out;
    out.model.a.assign(n, Cx{});
    out.model.b.assign(n - 1, Cx{});

    std::vector<std::vector<Cx>> rows;
    std::vector<std::vector<Cx>> cols;
    rows.reserve(n);
    cols.reserve(n);
    rows.push_back(c.r);
    cols.emplace_back(n, Cx{1.0, 0.0});

    std::vector<Cx> r_prev(n, Cx{}), l_prev(n, Cx{});
    Cx b_prev{};  // b_n = 0
    std::vector<Cx> r_next(n), l_next(n);
    for (std::size_t j = 1; j <= n; ++j)
    {
        std::vector<Cx> const& rj = rows[j - 1];
        std::vector<Cx> const& lj = cols[j - 1];

        Cx a{};
        for (std::size_t k = 0; k < n; ++k)
            a += rj[k] * lambda[k] * lj[k];
        out.model.a[n - j] = a;

        double term_size = 0.0;
        for (std::size_t k = 0; k < n; ++k)
        {
            r_next[k] = rj[k] * lambda[k] - a * rj[k] - b_prev * r_prev[k];
            term_size += std::norm(rj[k] * lambda[k]) + std::norm(a * rj[k])
                         + std::norm(b_prev * r_prev[k]);
        }
        if (j == n)
        {
            double const denom = std::sqrt(term_size);
            out.residual = denom > 0.0 ? norm2(r_next) / denom : norm2(r_next);
            break;
        }
        if (options.rebiorthogonalize)
            for (std::size_t m = 0; m < j; ++m)
            {
                Cx const coef = dot(r_next, cols[m]);
                for (std::size_t k = 0; k < n; ++k)
                    r_next[k] -= coef * rows[m][k];
            }

        Cx b{};
        double b_size = 0.0;
        for (std::size_t k = 0; k < n; ++k)
        {
            Cx const term = r_next[k] * lambda[k] * lj[k];
            b += term;
            b_size += std::abs(term);
        }
        if (b == Cx{} || std::abs(b) <= 16.0 * kEps * b_size)
            throw BreakdownError("reconstruction breakdown: b_" + std::to_string(n - j)
                                 + " vanishes; input is not the image of a matrix with unit "
                                   "superdiagonal and simple spectrum");
        out.model.b[n - j - 1] = b;

        for (std::size_t k = 0; k < n; ++k)
            l_next[k] = (lambda[k] * lj[k] - a * lj[k] - l_prev[k]) / b;
        if (options.rebiorthogonalize)
            for (std::size_t m = 0; m < j; ++m)
            {
                Cx const coef = dot(rows[m], l_next);
                for (std::size_t k = 0; k < n; ++k)
                    l_next[k] -= coef * cols[m][k];
            }

        r_prev = rj;
        l_prev = lj;
        b_prev = b;
        rows.push_back(r_next);
        cols.push_back(l_next);
    }

    if (options.validate_input && !(out.residual <= options.tol))
        throw InconsistencyError("reconstruction residual r_{n+1} = " + std::to_string(out.residual)
                                 + " exceeds tolerance");

    if (options.build_frame)
    {
        auto const nn = static_cast<Eigen::Index>(n);
        out.frame.R.resize(nn, nn);
        out.frame.Rinv.resize(nn, nn);
        for (Eigen::Index i = 0; i < nn; ++i)
            for (Eigen::Index k = 0; k < nn; ++k)
            {
                out.frame.R(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
                out.frame.Rinv(k, i) = cols[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            }
    }
    return out;
}

double g_exponent(TridiagonalModel const& t, std::span<Cx const> lambda)
{
    double s = frobenius_sq(t);
    for (Cx z : lambda)
        s -= std::norm(z);
    return 0.5 * s;
}

double g_exponent(SpectralCoordinates const& c)
{
    ReconstructOptions opts;
    opts.build_frame = false;
    return g_exponent(reconstruct(c, opts).model, c.lambda);
}

double g_exponent_unit_offset(SpectralCoordinates const& c)
{
    return g_exponent(c) - 0.5 * static_cast<double>(c.size() - 1);
}

double biorthogonality_error(EigenvectorFrame const& frame)
{
    Eigen::MatrixXcd const p = frame.R * frame.Rinv;
    Eigen::MatrixXcd const id = Eigen::MatrixXcd::Identity(p.rows(), p.cols());
    return (p - id).cwiseAbs().maxCoeff();
}

Prop31Deviation prop31_check(TridiagonalModel const& t, std::size_t j)
{
    validate(t);
    std::size_t const n = t.size();
    if (j < 1 || j >= n)
        throw DimensionError("prop31_check: need 1 <= j <= n - 1");
    std::vector<Cx> const coef = principal_charpoly_coefficients(t, j);

    std::vector<Cx> col(n, Cx{}), row(n, Cx{});
    col[0] = coef[j];
    row[0] = coef[j];
    for (std::size_t p = j; p-- > 0;)
    {
        col = matvec(t, col);
        col[0] += coef[p];
        row = rmatvec(t, row);
        row[0] += coef[p];
    }

    Cx bprod{1.0, 0.0};
    for (std::size_t m = 1; m <= j; ++m)
        bprod *= t.b[n - 1 - m];  // b_{n-m}

    Prop31Deviation dev;
    for (std::size_t i = 0; i < n; ++i)
    {
        Cx const want_col = i == j ? bprod : Cx{};
        Cx const want_row = i == j ? Cx{1.0, 0.0} : Cx{};
        dev.column = std::max(dev.column, std::abs(col[i] - want_col));
        dev.row = std::max(dev.row, std::abs(row[i] - want_row));
    }
    return dev;
}

double adjugate_identity_error(TridiagonalModel const& t, SpectralCoordinates const& c,
                               std::size_t j)
{
    validate(t);
    std::size_t const n = t.size();
    if (n > 20)
        throw UnsupportedSizeError("adjugate identity check is limited to n <= 20");
    if (c.size() != n || j >= n)
        throw DimensionError("adjugate_identity_error: index or size mismatch");

    auto const nn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXcd adj(nn, nn);
    if (n == 1)
        adj(0, 0) = 1.0;
    else
    {
        Eigen::MatrixXcd const m =
            c.lambda[j] * Eigen::MatrixXcd::Identity(nn, nn) - detail::to_dense(t);
        Eigen::MatrixXcd minor(nn - 1, nn - 1);
        for (Eigen::Index row = 0; row < nn; ++row)
            for (Eigen::Index col = 0; col < nn; ++col)
            {
                // adj(M)_{row,col} = (-1)^{row+col} det(M without row col, column row)
                for (Eigen::Index p = 0, pi = 0; p < nn; ++p)
                {
                    if (p == col)
                        continue;
                    for (Eigen::Index q = 0, qi = 0; q < nn; ++q)
                    {
                        if (q == row)
                            continue;
                        minor(pi, qi++) = m(p, q);
                    }
                    ++pi;
                }
                Cx const det = minor.partialPivLu().determinant();
                adj(row, col) = ((row + col) % 2 == 0) ? det : -det;
            }
    }

    Reconstruction const rec = reconstruct(c);
    Cx deriv{1.0, 0.0};
    for (std::size_t i = 0; i < n; ++i)
        if (i != j)
            deriv *= c.lambda[j] - c.lambda[i];
    auto const jj = static_cast<Eigen::Index>(j);
    Eigen::MatrixXcd const rank_one = deriv * rec.frame.R.col(jj) * rec.frame.Rinv.row(jj);

    double const scale = adj.cwiseAbs().maxCoeff();
    double const dev = (adj - rank_one).cwiseAbs().maxCoeff();
    return scale > 0.0 ? dev / scale : dev;
}

double max_relative_deviation(TridiagonalModel const& x, TridiagonalModel const& y)
{
    if (x.size() != y.size() || x.b.size() != y.b.size())
        throw DimensionError("max_relative_deviation: size mismatch");
    double worst = 0.0;
    auto acc = [&](Cx p, Cx q) {
        worst = std::max(worst, std::abs(p - q) / std::max(std::abs(p), 1.0));
    };
    for (std::size_t k = 0; k < x.a.size(); ++k)
        acc(x.a[k], y.a[k]);
    for (std::size_t k = 0; k < x.b.size(); ++k)
        acc(x.b[k], y.b[k]);
    return worst;
}

SpectralCoordinates rotate(SpectralCoordinates c, double phi)
{
    Cx const w = std::polar(1.0, phi);
    for (auto& z : c.lambda)
        z *= w;
    return c;
}

}  // namespace nhbe
