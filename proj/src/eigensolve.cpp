#include "nhbe/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "charpoly_detail.hpp"

namespace nhbe {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Column-major dense square matrix; only what the QR sweep needs.
class DenseHessenberg
{
  public:
    explicit DenseHessenberg(std::size_t n) : n_(n), data_(n * n) {}
    Cx& operator()(std::size_t i, std::size_t j) { return data_[j * n_ + i]; }
    Cx operator()(std::size_t i, std::size_t j) const { return data_[j * n_ + i]; }

  private:
    std::size_t n_;
    std::vector<Cx> data_;
};

struct Givens
{
    double c;
    Cx s;
    Cx r;
};

// G = [c s; -conj(s) c] with G [x; y] = [r; 0].
Givens make_givens(Cx x, Cx y)
{
    if (y == Cx{})
        return {1.0, Cx{}, x};
    if (x == Cx{})
        return {0.0, Cx{1.0, 0.0}, y};
    double const ax = std::abs(x);
    double const rho = std::hypot(ax, std::abs(y));
    Cx const phase = x / ax;
    return {ax / rho, phase * std::conj(y) / rho, phase * rho};
}

// Both eigenvalues of [[p, q], [r, s]], larger modulus first.
std::pair<Cx, Cx> eig2x2(Cx p, Cx q, Cx r, Cx s)
{
    Cx const m = 0.5 * (p + s);
    Cx const d = 0.5 * (p - s);
    Cx const disc = std::sqrt(d * d + q * r);
    Cx l1 = m + disc;
    Cx l2 = m - disc;
    if (std::abs(l2) > std::abs(l1))
        std::swap(l1, l2);
    if (l1 != Cx{})
        l2 = (p * s - q * r) / l1;
    return {l1, l2};
}

Cx wilkinson_shift(DenseHessenberg const& h, std::size_t ihi)
{
    auto [l1, l2] = eig2x2(h(ihi - 1, ihi - 1), h(ihi - 1, ihi), h(ihi, ihi - 1), h(ihi, ihi));
    Cx const corner = h(ihi, ihi);
    return std::abs(l1 - corner) <= std::abs(l2 - corner) ? l1 : l2;
}

// One implicit single-shift QR sweep on the active window [lo, hi].
void qr_sweep(DenseHessenberg& h, std::size_t lo, std::size_t hi, Cx shift)
{
    Cx x = h(lo, lo) - shift;
    Cx y = h(lo + 1, lo);
    for (std::size_t k = lo; k < hi; ++k)
    {
        if (k > lo)
        {
            x = h(k, k - 1);
            y = h(k + 1, k - 1);
        }
        Givens const g = make_givens(x, y);
        if (k > lo)
        {
            h(k, k - 1) = g.r;
            h(k + 1, k - 1) = Cx{};
        }
        Cx const sc = std::conj(g.s);
        for (std::size_t j = k; j <= hi; ++j)
        {
            Cx const u = h(k, j);
            Cx const v = h(k + 1, j);
            h(k, j) = g.c * u + g.s * v;
            h(k + 1, j) = -sc * u + g.c * v;
        }
        std::size_t const last = std::min(k + 2, hi);
        for (std::size_t i = lo; i <= last; ++i)
        {
            Cx const u = h(i, k);
            Cx const v = h(i, k + 1);
            h(i, k) = g.c * u + sc * v;
            h(i, k + 1) = -g.s * u + g.c * v;
        }
    }
}

}  // namespace

bool canonical_less(Cx x, Cx y)
{
    double const ax = std::abs(x);
    double const ay = std::abs(y);
    if (ax != ay)
        return ax > ay;
    auto phase = [](Cx z) {
        double p = std::arg(z);
        return p < 0.0 ? p + 2.0 * std::numbers::pi : p;
    };
    return phase(x) < phase(y);
}

void canonical_sort(std::vector<Cx>& values)
{
    std::stable_sort(values.begin(), values.end(), canonical_less);
}

bool has_close_pair(std::span<Cx const> values, double threshold)
{
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            if (std::abs(values[i] - values[j]) < threshold)
                return true;
    return false;
}

double eigen_backward_error(TridiagonalModel const& t, Cx lambda)
{
    std::size_t const n = t.size();
    double const fro = std::sqrt(frobenius_sq(t));
    if (fro == 0.0)
        return 0.0;
    if (n == 1)
        return std::abs(t.a[0] - lambda) / fro;

    // LU with partial pivoting of the tridiagonal A = T - lambda I.
    std::vector<Cx> dl(n - 1), d(n), du(n - 1, Cx{1.0, 0.0}), du2(n > 2 ? n - 2 : 0);
    std::vector<bool> swapped(n - 1, false);
    for (std::size_t i = 0; i < n; ++i)
        d[i] = t.diag_at(i) - lambda;
    for (std::size_t i = 0; i + 1 < n; ++i)
        dl[i] = t.sub_at(i + 1);

    for (std::size_t i = 0; i + 1 < n; ++i)
    {
        if (std::abs(d[i]) >= std::abs(dl[i]))
        {
            if (d[i] != Cx{})
            {
                Cx const fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            }
        }
        else
        {
            Cx const fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            Cx const tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - fact * d[i + 1];
            if (i + 2 < n)
            {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            swapped[i] = true;
        }
    }
    double const tiny = kEps * fro;
    for (auto& di : d)
        if (std::abs(di) < tiny)
            di = tiny;

    auto solve = [&](std::vector<Cx>& x) {
        for (std::size_t i = 0; i + 1 < n; ++i)
        {
            if (!swapped[i])
                x[i + 1] -= dl[i] * x[i];
            else
            {
                Cx const tmp = x[i];
                x[i] = x[i + 1];
                x[i + 1] = tmp - dl[i] * x[i];
            }
        }
        x[n - 1] /= d[n - 1];
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        for (std::size_t i = n - 2; i-- > 0;)
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    };
    auto normalize = [](std::vector<Cx>& x) {
        double s = 0.0;
        for (Cx z : x)
            s += std::norm(z);
        s = std::sqrt(s);
        if (!(s > 0.0) || !std::isfinite(s))
            return false;
        for (auto& z : x)
            z /= s;
        return true;
    };

    // Every iterate gives an upper bound ||(T - lambda) x|| on sigma_min; on
    // strongly non-normal T a later iterate can be worse than an earlier one.
    std::vector<Cx> x(n, Cx{1.0, 0.0});
    normalize(x);
    double best = std::numeric_limits<double>::infinity();
    for (int step = 0; step < 3; ++step)
    {
        solve(x);
        if (!normalize(x))
            return 0.0;
        std::vector<Cx> const tx = matvec(t, x);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            res += std::norm(tx[i] - lambda * x[i]);
        best = std::min(best, std::sqrt(res));
    }
    return best / fro;
}

EigenResult eigenvalues_qr(TridiagonalModel const& t, QrOptions const& options)
{
    validate(t);
    std::size_t const n = t.size();
    EigenResult result;
    std::vector<Cx> lambda(n);
    double const fro = std::sqrt(frobenius_sq(t));

    DenseHessenberg h(n);
    for (std::size_t i = 0; i < n; ++i)
        h(i, i) = t.diag_at(i);
    for (std::size_t i = 1; i < n; ++i)
    {
        Cx const b = t.sub_at(i);
        if (options.balance)
        {
            double const m = std::sqrt(std::abs(b));
            h(i - 1, i) = m;
            h(i, i - 1) = m > 0.0 ? b / m : Cx{};
        }
        else
        {
            h(i - 1, i) = 1.0;
            h(i, i - 1) = b;
        }
    }

    std::size_t const max_sweeps = options.sweeps_per_dim * std::max<std::size_t>(n, 1);
    std::size_t sweeps = 0;
    std::size_t its = 0;
    std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n) - 1;
    while (hi >= 0)
    {
        std::size_t const ihi = static_cast<std::size_t>(hi);
        std::size_t l = ihi;
        while (l > 0)
        {
            double const s = std::abs(h(l, l - 1));
            if (s == 0.0)
                break;
            double tst = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (tst == 0.0)
                tst = fro;
            if (s <= options.deflation_eps * tst)
            {
                h(l, l - 1) = Cx{};
                ++result.report.deflation_count;
                break;
            }
            --l;
        }

        if (l == ihi)
        {
            lambda[ihi] = h(ihi, ihi);
            hi -= 1;
            its = 0;
            continue;
        }
        if (l + 1 == ihi)
        {
            auto [l1, l2] = eig2x2(h(l, l), h(l, ihi), h(ihi, l), h(ihi, ihi));
            lambda[l] = l1;
            lambda[ihi] = l2;
            hi -= 2;
            its = 0;
            continue;
        }
        if (sweeps >= max_sweeps)
        {
            Spectrum partial;
            partial.lambda.assign(lambda.begin() + static_cast<std::ptrdiff_t>(ihi) + 1,
                                  lambda.end());
            canonical_sort(partial.lambda);
            result.report.iterations = sweeps;
            throw SolverError("QR iteration did not converge within " + std::to_string(max_sweeps)
                                  + " sweeps (" + std::to_string(ihi + 1)
                                  + " eigenvalues outstanding)",
                              std::move(partial), result.report);
        }

        Cx shift;
        if (its == 10)
            shift = h(l, l) + 0.75 * std::abs(h(l + 1, l).real());
        else if (its == 20)
            shift = h(ihi, ihi) + 0.75 * std::abs(h(ihi, ihi - 1).real());
        else
            shift = wilkinson_shift(h, ihi);
        qr_sweep(h, l, ihi, shift);
        ++its;
        ++sweeps;
    }

    result.report.iterations = sweeps;
    canonical_sort(lambda);
    result.report.degenerate_flag = has_close_pair(lambda, options.degeneracy_rel_gap * fro);
    if (options.compute_residuals)
        for (Cx z : lambda)
            result.report.max_residual =
                std::max(result.report.max_residual, eigen_backward_error(t, z));
    result.spectrum.lambda = std::move(lambda);
    return result;
}

Cx CharpolyValue::true_value() const
{
    return value * std::exp(log_scale);
}

Cx CharpolyValue::true_derivative() const
{
    return derivative * std::exp(log_scale);
}

CharpolyValue charpoly_trailing(TridiagonalModel const& t, std::size_t k, Cx xi)
{
    if (k > t.size())
        throw DimensionError("charpoly_trailing: k = " + std::to_string(k) + " exceeds n");
    auto const e = detail::trailing_recurrence(t, k, xi);
    return {e.value, e.derivative, e.log_scale};
}

namespace {

// Complex logs of a polynomial sequence from a three-term recurrence,
// rescaled so the mantissas stay in range.
class LogSequence
{
  public:
    explicit LogSequence(std::size_t reserve) { logs_.reserve(reserve); }

    void push(Cx value)
    {
        logs_.push_back(value == Cx{} ? Cx{-std::numeric_limits<double>::infinity(), 0.0}
                                      : std::log(value) + scale_);
    }

    void rescale(Cx& cur, Cx& prev)
    {
        double const m = std::max(std::abs(cur), std::abs(prev));
        if (m > 0x1.0p+400 || (m < 0x1.0p-400 && m > 0.0))
        {
            int e = 0;
            std::frexp(m, &e);
            cur *= std::ldexp(1.0, -e);
            prev *= std::ldexp(1.0, -e);
            scale_ += e * std::log(2.0);
        }
    }

    Cx operator[](std::size_t i) const { return logs_[i]; }

  private:
    std::vector<Cx> logs_;
    double scale_ = 0.0;
};

// log p_i, i = 0..n-1, leading i x i blocks (dense rows from the top).
LogSequence leading_logs(TridiagonalModel const& t, Cx xi)
{
    std::size_t const n = t.size();
    LogSequence out(n);
    Cx prev{}, cur{1.0, 0.0};
    out.push(cur);
    for (std::size_t i = 1; i < n; ++i)
    {
        Cx const sub = i >= 2 ? t.sub_at(i - 1) : Cx{};
        Cx const next = (xi - t.diag_at(i - 1)) * cur - sub * prev;
        prev = cur;
        cur = next;
        out.rescale(cur, prev);
        out.push(cur);
    }
    return out;
}

// log q_i, i = 0..n-1, trailing i x i blocks.
LogSequence trailing_logs(TridiagonalModel const& t, Cx xi)
{
    std::size_t const n = t.size();
    LogSequence out(n);
    Cx prev{}, cur{1.0, 0.0};
    out.push(cur);
    for (std::size_t i = 1; i < n; ++i)
    {
        Cx const bb = i >= 2 ? t.b[i - 2] : Cx{};
        Cx const next = (xi - t.a[i - 1]) * cur - bb * prev;
        prev = cur;
        cur = next;
        out.rescale(cur, prev);
        out.push(cur);
    }
    return out;
}

}  // namespace

EigenvalueCharpoly charpoly_at_eigenvalue(TridiagonalModel const& t, Cx lambda)
{
    validate(t);
    std::size_t const n = t.size();
    if (n == 1)
        return {Cx{}, Cx{}, 1};
    LogSequence const p = leading_logs(t, lambda);
    LogSequence const q = trailing_logs(t, lambda);

    // log_c[i] = log(b_{n-1} ... b_{n-i}), log_b[m] = log(b_1 ... b_m).
    std::vector<Cx> log_c(n, Cx{}), log_b(n, Cx{});
    for (std::size_t i = 1; i < n; ++i)
    {
        log_c[i] = log_c[i - 1] + std::log(t.b[n - 1 - i]);
        log_b[i] = log_b[i - 1] + std::log(t.b[i - 1]);
    }

    // With x, y the right and left eigenvectors (positions 1..n), x_i y_i is
    // proportional to p_{i-1}^2 / c_{i-1} from the top and to
    // q_{n-i}^2 / b_{n-i} from the bottom, and to p_{i-1} q_{n-i} overall.
    std::size_t k = 1;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= n; ++i)
    {
        double const v = p[i - 1].real() + q[n - i].real();
        if (v > best)
        {
            best = v;
            k = i;
        }
    }
    Cx const top_k = 2.0 * p[k - 1] - log_c[k - 1];
    Cx const bottom_k = 2.0 * q[n - k] - log_b[n - k];
    Cx sum{};
    for (std::size_t i = 1; i <= n; ++i)
    {
        Cx const l = i <= k ? 2.0 * p[i - 1] - log_c[i - 1] - top_k
                            : 2.0 * q[n - i] - log_b[n - i] - bottom_k;
        if (std::isfinite(l.real()))
            sum += std::exp(l);
    }

    EigenvalueCharpoly out;
    out.twist = k;
    // y_1 / y_n = (y_1 / y_k)(y_k / y_n) = (c_{k-1} / p_{k-1}) q_{n-k}.
    out.log_trailing = q[n - k] + log_c[k - 1] - p[k - 1];
    // chi_n' = sum_i p_{i-1} q_{n-i}.
    out.log_derivative = p[k - 1] + q[n - k] + std::log(sum);
    return out;
}

CharpolyValue charpoly_eval(TridiagonalModel const& t, Cx xi)
{
    validate(t);
    return charpoly_trailing(t, t.size(), xi);
}

Cx principal_charpoly_firstblock(TridiagonalModel const& t, std::size_t j, Cx xi)
{
    std::size_t const n = t.size();
    if (j < 1 || j > n)
        throw DimensionError("principal_charpoly_firstblock: need 1 <= j <= n");
    // q_k = (xi - d_k) q_{k-1} - sub_k q_{k-2}, dense rows counted from the top.
    Cx prev{1.0, 0.0};
    Cx cur = xi - t.diag_at(0);
    for (std::size_t i = 1; i < j; ++i)
    {
        Cx const next = (xi - t.diag_at(i)) * cur - t.sub_at(i) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

std::vector<Cx> principal_charpoly_coefficients(TridiagonalModel const& t, std::size_t j)
{
    std::size_t const n = t.size();
    if (j < 1 || j > n)
        throw DimensionError("principal_charpoly_coefficients: need 1 <= j <= n");
    std::vector<Cx> prev{Cx{1.0, 0.0}};
    std::vector<Cx> cur{-t.diag_at(0), Cx{1.0, 0.0}};
    for (std::size_t i = 1; i < j; ++i)
    {
        std::vector<Cx> next(cur.size() + 1);
        for (std::size_t p = 0; p < cur.size(); ++p)
        {
            next[p + 1] += cur[p];
            next[p] -= t.diag_at(i) * cur[p];
        }
        for (std::size_t p = 0; p < prev.size(); ++p)
            next[p] -= t.sub_at(i) * prev[p];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

namespace {

struct LogDerivative
{
    // chi_n'(z) / chi_n(z) = trace (z I - T)^{-1}
    Cx trace;
    // True when some diagonal entry of the resolvent is infinite at the
    // working precision, i.e. z is a root to within rounding.
    bool at_root;
    // First-order rounding bound on trace, absolute.
    double error = 0.0;
};

// Diagonal of (z I - T)^{-1} through twisted factorizations: entry i is
// 1 / gamma_i with gamma_i = f_i + g_i - (z - d_i), where f and g are the
// pivots of the top-down and bottom-up elimination without pivoting.
LogDerivative resolvent_trace(TridiagonalModel const& t, Cx z)
{
    std::size_t const n = t.size();
    double const tiny = kEps * kEps;
    auto guard = [&](Cx v, double scale) { return v == Cx{} ? Cx{tiny * (1.0 + scale), 0.0} : v; };

    std::vector<Cx> f(n), g(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        Cx const shift = z - t.diag_at(i);
        f[i] = i == 0 ? shift : shift - t.sub_at(i) / f[i - 1];
        f[i] = guard(f[i], std::abs(shift));
    }
    for (std::size_t i = n; i-- > 0;)
    {
        Cx const shift = z - t.diag_at(i);
        g[i] = i + 1 == n ? shift : shift - t.sub_at(i + 1) / g[i + 1];
        g[i] = guard(g[i], std::abs(shift));
    }

    LogDerivative out{Cx{}, false};
    for (std::size_t i = 0; i < n; ++i)
    {
        Cx const shift = z - t.diag_at(i);
        Cx const gamma = f[i] + g[i] - shift;
        double size = std::abs(shift);
        if (i > 0)
            size += std::abs(t.sub_at(i) / f[i - 1]);
        if (i + 1 < n)
            size += std::abs(t.sub_at(i + 1) / g[i + 1]);
        if (std::abs(gamma) <= 4.0 * kEps * size)
            out.at_root = true;
        if (gamma == Cx{})
            return {Cx{std::numeric_limits<double>::infinity(), 0.0}, true};
        out.trace += 1.0 / gamma;
        out.error += 4.0 * kEps * size / std::norm(gamma);
    }
    return out;
}

}  // namespace

Spectrum eigenvalues_aberth(TridiagonalModel const& t, AberthOptions const& options)
{
    validate(t);
    std::size_t const n = t.size();
    if (n > options.max_dim)
        throw UnsupportedSizeError("Aberth oracle is capped at n = " + std::to_string(options.max_dim));
    Spectrum out;
    if (n == 1)
    {
        out.lambda = {t.a[0]};
        return out;
    }

    Cx center{};
    for (Cx z : t.a)
        center += z;
    center /= static_cast<double>(n);
    auto const at_center = detail::trailing_recurrence(t, n, center);
    double radius = 0.0;
    if (at_center.value != Cx{})
        radius = std::exp((std::log(std::abs(at_center.value)) + at_center.log_scale)
                          / static_cast<double>(n));
    if (!(radius > 0.0) || !std::isfinite(radius))
        radius = 1.0 + std::abs(center);

    std::vector<Cx> z(n);
    for (std::size_t k = 0; k < n; ++k)
        z[k] = center
               + std::polar(radius, 2.0 * std::numbers::pi * static_cast<double>(k)
                                        / static_cast<double>(n)
                                    + 0.4);

    std::vector<bool> done(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> stall(n, 0);
    std::size_t remaining = n;
    for (std::size_t iter = 0; iter < options.max_iterations && remaining > 0; ++iter)
    {
        for (std::size_t k = 0; k < n; ++k)
        {
            if (done[k])
                continue;
            LogDerivative const e = resolvent_trace(t, z[k]);
            if (!std::isfinite(std::abs(e.trace)))
            {
                done[k] = true;
                --remaining;
                continue;
            }
            Cx sum{};
            for (std::size_t j = 0; j < n; ++j)
                if (j != k)
                    sum += 1.0 / (z[k] - z[j]);
            // Near a defective eigenvalue the resolvent diagonal cancels
            // badly in the trace; the plain recurrence is then the better
            // Newton ratio. Take whichever has the smaller error bound.
            auto const rec = detail::trailing_recurrence(t, n, z[k]);
            double const eps_n = 2.0 * static_cast<double>(n) * kEps;
            double const rec_error = eps_n * (rec.magnitude / std::abs(rec.value)
                                              + rec.derivative_magnitude / std::abs(rec.derivative));
            double const trace_error = e.error / std::abs(e.trace);
            Cx newton;
            bool root = e.at_root;
            if (rec_error < trace_error && rec.derivative != Cx{})
            {
                newton = rec.value / rec.derivative;
                root = std::abs(rec.value) <= eps_n * rec.magnitude;
            }
            else if (e.trace != Cx{})
                newton = 1.0 / e.trace;
            Cx w;
            if (newton == Cx{} && !root)
                w = 1e-8 * (1.0 + std::abs(z[k]));
            else
                w = newton / (1.0 - newton * sum);
            z[k] -= w;
            double const step = std::abs(w);
            if (step < 0.5 * best[k])
            {
                best[k] = step;
                stall[k] = 0;
            }
            else
                ++stall[k];
            // Multiple roots stall at about sqrt(eps) accuracy.
            bool const stalled = stall[k] >= 8 && best[k] <= 1e-6 * std::max(1.0, std::abs(z[k]));
            if (step <= 2.0 * kEps * std::abs(z[k]) || root || stalled)
            {
                done[k] = true;
                --remaining;
            }
        }
    }
    if (remaining > 0)
        throw SolverError("Aberth iteration did not converge (" + std::to_string(remaining)
                              + " roots outstanding)",
                          Spectrum{}, EigenReport{});
    canonical_sort(z);
    out.lambda = std::move(z);
    return out;
}

double multiset_distance(std::span<Cx const> x, std::span<Cx const> y)
{
    if (x.size() != y.size())
        throw DimensionError("multiset_distance: sizes differ");
    std::size_t const n = x.size();
    if (n == 0)
        return 0.0;

    // Hungarian algorithm (potentials form), 1-based internally.
    double const inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<bool> used(n + 1);
    auto cost = [&](std::size_t i, std::size_t j) { return std::abs(x[i - 1] - y[j - 1]); };
    for (std::size_t i = 1; i <= n; ++i)
    {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), false);
        do
        {
            used[j0] = true;
            std::size_t const i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j)
            {
                if (used[j])
                    continue;
                double const cur = cost(i0, j) - u[i0] - v[j];
                if (cur < minv[j])
                {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta)
                {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j)
            {
                if (used[j])
                {
                    u[p[j]] += delta;
                    v[j] -= delta;
                }
                else
                    minv[j] -= delta;
            }
            j0 = j1;
        } while (p[j0] != 0);
        do
        {
            std::size_t const j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double worst = 0.0;
    for (std::size_t j = 1; j <= n; ++j)
        worst = std::max(worst, cost(p[j], j));
    return worst;
}

}  // namespace nhbe
