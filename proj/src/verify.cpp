#include "nhbe/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "nhbe/eigensolve.hpp"

namespace nhbe {

namespace {

constexpr double kPi = std::numbers::pi;

IdentityReport compare_logs(std::string name, Cx lhs, Cx rhs, double tol)
{
    IdentityReport rep;
    rep.name = std::move(name);
    rep.lhs_log = lhs.real();
    rep.rhs_log = rhs.real();
    Cx diff = lhs - rhs;
    double im = std::remainder(diff.imag(), 2.0 * kPi);
    diff = {diff.real(), im};
    rep.relative_error = std::abs(std::exp(diff) - 1.0);
    if (!std::isfinite(rep.relative_error))
        rep.relative_error = std::numeric_limits<double>::infinity();
    rep.tolerance = tol;
    rep.passed = rep.relative_error <= tol;
    return rep;
}

Cx log_vandermonde_sq(std::span<Cx const> lambda)
{
    Cx s{};
    for (std::size_t i = 0; i < lambda.size(); ++i)
        for (std::size_t j = i + 1; j < lambda.size(); ++j)
        {
            Cx const d = lambda[i] - lambda[j];
            if (d == Cx{})
                throw ConditioningError("Delta(lambda) vanishes: repeated eigenvalue");
            s += 2.0 * std::log(d);
        }
    return s;
}

Cx log_b_power_product(TridiagonalModel const& t)
{
    Cx s{};
    for (std::size_t j = 1; j < t.size(); ++j)
        s += static_cast<double>(j) * std::log(t.b[j - 1]);
    return s;
}

void check_pair(TridiagonalModel const& t, SpectralCoordinates const& c)
{
    validate(t);
    if (c.size() != t.size() || c.r.size() != c.size())
        throw DimensionError("matrix and coordinates have different sizes");
}

std::vector<double> map_to_real(SpectralCoordinates const& c)
{
    ReconstructOptions opts;
    opts.validate_input = false;
    opts.build_frame = false;
    TridiagonalModel const m = reconstruct(c, opts).model;
    std::vector<double> out;
    out.reserve(2 * (m.a.size() + m.b.size()));
    for (Cx z : m.a)
    {
        out.push_back(z.real());
        out.push_back(z.imag());
    }
    for (Cx z : m.b)
    {
        out.push_back(z.real());
        out.push_back(z.imag());
    }
    return out;
}

// Free coordinates: r_1..r_{n-1}, lambda_1..lambda_n (complex, 2n - 1 of them).
Cx& free_coordinate(SpectralCoordinates& c, std::size_t idx)
{
    std::size_t const n = c.size();
    return idx + 1 < n ? c.r[idx] : c.lambda[idx - (n - 1)];
}

void close_sum(SpectralCoordinates& c)
{
    Cx s{};
    for (std::size_t k = 0; k + 1 < c.size(); ++k)
        s += c.r[k];
    c.r.back() = Cx{1.0, 0.0} - s;
}

Cx log_measure_factor(TridiagonalModel const& m, SpectralCoordinates const& c)
{
    Cx s{};
    for (Cx z : m.b)
        s += std::log(std::abs(z));
    for (Cx z : c.r)
        s -= std::log(std::abs(z));
    return s;
}

double fd_error(SpectralCoordinates const& c, double step, double rhs_log)
{
    double const lhs = 0.5 * jacobian_fd_log_determinant(c, step);
    return std::abs(std::expm1(lhs - rhs_log));
}

}  // namespace

IdentityReport vandermonde_identity(SpectralCoordinates const& c, TridiagonalModel const& t,
                                    double tol)
{
    check_pair(t, c);
    Cx lhs = log_vandermonde_sq(c.lambda);
    for (Cx r : c.r)
        lhs += std::log(r);
    IdentityReport rep = compare_logs("vandermonde", lhs, log_b_power_product(t), tol);
    rep.details = "Delta^2 prod r vs prod b_j^j, n = " + std::to_string(t.size());
    return rep;
}

double jacobian_fd_log_determinant(SpectralCoordinates const& c, double step)
{
    std::size_t const n = c.size();
    std::size_t const dim = 4 * n - 2;
    Eigen::MatrixXd jac(dim, dim);
    for (std::size_t idx = 0; idx < 2 * n - 1; ++idx)
    {
        for (int part = 0; part < 2; ++part)
        {
            SpectralCoordinates plus = c, minus = c;
            double const scale = std::abs(free_coordinate(plus, idx)) > 0.0
                                     ? std::abs(free_coordinate(plus, idx))
                                     : 1.0;
            double const h = step * scale;
            Cx const dz = part == 0 ? Cx{h, 0.0} : Cx{0.0, h};
            free_coordinate(plus, idx) += dz;
            free_coordinate(minus, idx) -= dz;
            close_sum(plus);
            close_sum(minus);
            std::vector<double> const fp = map_to_real(plus);
            std::vector<double> const fm = map_to_real(minus);
            auto const col = static_cast<Eigen::Index>(2 * idx + static_cast<std::size_t>(part));
            for (std::size_t row = 0; row < dim; ++row)
                jac(static_cast<Eigen::Index>(row), col) = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    double s = 0.0;
    for (Eigen::Index i = 0; i < lu.matrixLU().rows(); ++i)
        s += std::log(std::abs(lu.matrixLU()(i, i)));
    return s;
}

IdentityReport jacobian_fd_check(SpectralCoordinates const& c, JacobianOptions const& options)
{
    std::size_t const n = c.size();
    if (n == 0 || c.r.size() != n)
        throw DimensionError("jacobian_fd_check: bad coordinates");
    if (n > 6)
        throw UnsupportedSizeError("jacobian_fd_check is limited to n <= 6");
    TridiagonalModel const m = reconstruct(c, ReconstructOptions{.build_frame = false}).model;
    double const log_det = jacobian_fd_log_determinant(c, options.step);
    Cx const rhs = log_measure_factor(m, c);
    IdentityReport rep = compare_logs("jacobian", Cx{0.5 * log_det, 0.0}, rhs, options.tol);

    // Density of dmu(a,b) w.r.t. dmu(r,lambda) with d^2b = d|b| dphi,
    // d^2r = d|r| dphi: |det| prod_{k<n} |r_k| / prod |b_j|.
    double log_density = log_det;
    for (std::size_t k = 0; k + 1 < n; ++k)
        log_density += std::log(std::abs(c.r[k]));
    for (Cx z : m.b)
        log_density -= std::log(std::abs(z));
    double const displayed = rhs.real();
    double const with_rn = displayed - std::log(std::abs(c.r.back()));
    std::ostringstream os;
    os << "sqrt|det| vs prod|b|/prod|r| at step " << options.step << ", n = " << n
       << "; measure density " << std::exp(log_density) << " vs prod|b|/prod|r| = "
       << std::exp(displayed) << " and prod|b|/(prod|r| |r_n|) = " << std::exp(with_rn);
    rep.details = os.str();
    return rep;
}

FdConvergence jacobian_fd_convergence(SpectralCoordinates const& c, double step)
{
    TridiagonalModel const m = reconstruct(c, ReconstructOptions{.build_frame = false}).model;
    double const rhs = log_measure_factor(m, c).real();
    FdConvergence out;
    out.step = step;
    out.error_h = fd_error(c, step, rhs);
    out.error_half = fd_error(c, 0.5 * step, rhs);
    if (out.error_h < 1e-12 && out.error_half < 1e-12)
    {
        out.order = std::numeric_limits<double>::infinity();
        out.second_order = true;
        return out;
    }
    out.order = std::log2(out.error_h / out.error_half);
    out.second_order = out.order >= 1.5;
    return out;
}

IdentityReport moment_identities(TridiagonalModel const& t, SpectralCoordinates const& c,
                                 std::size_t K, double tol)
{
    check_pair(t, c);
    std::size_t const n = t.size();
    if (K > 2 * n - 1)
        throw DimensionError("moment_identities: need K <= 2n - 1");
    double s = 0.0;
    for (Cx z : c.lambda)
        s = std::max(s, std::abs(z));
    if (s == 0.0)
        s = 1.0;

    std::vector<Cx> pw(n, Cx{1.0, 0.0});  // (lambda_j / s)^k
    std::vector<Cx> v(n, Cx{});           // (T / s)^k e_1
    v[0] = 1.0;
    IdentityReport rep;
    rep.name = "moments";
    rep.tolerance = tol;
    std::size_t worst_k = 0;
    for (std::size_t k = 0; k <= K; ++k)
    {
        if (k > 0)
        {
            for (std::size_t j = 0; j < n; ++j)
                pw[j] *= c.lambda[j] / s;
            v = matvec(t, v);
            for (auto& z : v)
                z /= s;
        }
        Cx lhs{};
        double abs_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j)
        {
            lhs += c.r[j] * pw[j];
            abs_sum += std::abs(c.r[j] * pw[j]);
        }
        Cx const rhs = v[0];
        double const denom = std::max(std::abs(rhs), abs_sum);
        double const err = denom > 0.0 ? std::abs(lhs - rhs) / denom : std::abs(lhs - rhs);
        if (k == 0 || err > rep.relative_error)
        {
            rep.relative_error = err;
            worst_k = k;
            double const shift = static_cast<double>(k) * std::log(s);
            rep.lhs_log = std::log(std::abs(lhs)) + shift;
            rep.rhs_log = std::log(std::abs(rhs)) + shift;
        }
    }
    rep.passed = rep.relative_error <= tol;
    rep.details = "sum r lambda^k vs e1^t T^k e1, k = 0.." + std::to_string(K)
                  + ", worst at k = " + std::to_string(worst_k);
    return rep;
}

std::vector<IdentityReport> product_identities(TridiagonalModel const& t,
                                               SpectralCoordinates const& c, double tol)
{
    check_pair(t, c);
    std::size_t const n = t.size();
    Cx sum_trailing{}, sum_derivative{}, sum_log_r{};
    for (std::size_t j = 0; j < n; ++j)
    {
        EigenvalueCharpoly const e = charpoly_at_eigenvalue(t, c.lambda[j]);
        sum_trailing += e.log_trailing;
        sum_derivative += e.log_derivative;
        sum_log_r += std::log(c.r[j]);
    }
    Cx const sign = (n * (n - 1) / 2) % 2 == 1 ? Cx{0.0, kPi} : Cx{};

    std::vector<IdentityReport> out;
    out.push_back(compare_logs("prod_bj", sum_trailing, sign + log_b_power_product(t), tol));
    out.back().details = "prod chi_{n-1}(lambda_i) vs (-1)^{n(n-1)/2} prod b_j^j";
    out.push_back(compare_logs("prod_der", sum_derivative, sign + log_vandermonde_sq(c.lambda), tol));
    out.back().details = "prod chi_n'(lambda_i) vs (-1)^{n(n-1)/2} Delta^2";
    out.push_back(compare_logs("prod_rj", sum_log_r, sum_trailing - sum_derivative, tol));
    out.back().details = "prod r_j vs prod chi_{n-1}(lambda_j) / chi_n'(lambda_j)";
    return out;
}

FEstimate f_factor_estimate(std::span<Cx const> lambda, double beta, Stream const& stream,
                            FEstimateOptions const& options)
{
    std::size_t const n = lambda.size();
    if (n < 2 || n > 3)
        throw UnsupportedSizeError("f_factor_estimate supports n = 2 and n = 3");
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw ParameterError("beta must be positive");
    if (options.samples < 2 || options.workers < 1)
        throw ParameterError("need samples >= 2 and workers >= 1");
    if (has_close_pair(lambda, 0.0))
        throw DomainError("f_factor_estimate: lambda must be simple");

    double const alpha = 0.5 * beta;
    double const log_q_const = -std::lgamma(alpha) - std::log(2.0 * kPi);
    // Area density of one proposal coordinate, log.
    auto log_q = [&](Cx r) {
        double const rho = std::abs(r);
        return (alpha - 2.0) * std::log(rho) - rho + log_q_const;
    };

    constexpr std::size_t block = 4096;
    std::size_t const blocks = (options.samples + block - 1) / block;
    struct Partial
    {
        double sum = 0.0;
        double sum_sq = 0.0;
        std::size_t valid = 0;
    };
    std::vector<Partial> partial(blocks);
    std::vector<Cx> const lam(lambda.begin(), lambda.end());

    auto run_block = [&](std::size_t b) {
        Stream s = stream.substream(b);
        std::size_t const count = std::min(block, options.samples - b * block);
        SpectralCoordinates c;
        c.lambda = lam;
        c.r.resize(n);
        std::vector<double> logs(n);
        Partial acc;
        for (std::size_t i = 0; i < count; ++i)
        {
            auto const m = std::min(static_cast<std::size_t>(s.uniform() * static_cast<double>(n)),
                                    n - 1);
            Cx rest{};
            for (std::size_t k = 0; k < n; ++k)
            {
                if (k == m)
                    continue;
                double const rho = sample_gamma(alpha, 1.0, s);
                double const phi = 2.0 * kPi * s.uniform();
                c.r[k] = std::polar(rho, phi);
                rest += c.r[k];
            }
            c.r[m] = Cx{1.0, 0.0} - rest;
            if (std::any_of(c.r.begin(), c.r.end(), [](Cx z) { return z == Cx{}; }))
                continue;

            double g = 0.0;
            try
            {
                ReconstructOptions opts;
                opts.validate_input = false;
                opts.build_frame = false;
                g = g_exponent(reconstruct(c, opts).model, c.lambda);
            }
            catch (Error const&)
            {
                continue;
            }
            if (!std::isfinite(g))
                continue;
            ++acc.valid;

            // Target in area measure on the free r_1..r_{n-1}.
            double log_target = -g;
            for (std::size_t k = 0; k < n; ++k)
                log_target += (alpha - 1.0) * std::log(std::abs(c.r[k]));
            for (std::size_t k = 0; k + 1 < n; ++k)
                log_target -= std::log(std::abs(c.r[k]));
            if (options.measure == FMeasure::corrected)
                log_target -= std::log(std::abs(c.r[n - 1]));

            for (std::size_t mm = 0; mm < n; ++mm)
            {
                logs[mm] = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    if (k != mm)
                        logs[mm] += log_q(c.r[k]);
            }
            double const top = *std::max_element(logs.begin(), logs.end());
            double mix = 0.0;
            for (double l : logs)
                mix += std::exp(l - top);
            double const log_proposal = top + std::log(mix / static_cast<double>(n));

            double const w = std::exp(log_target - log_proposal);
            acc.sum += w;
            acc.sum_sq += w * w;
        }
        partial[b] = acc;
    };

    std::size_t const workers = std::min(options.workers, blocks);
    if (workers <= 1)
        for (std::size_t b = 0; b < blocks; ++b)
            run_block(b);
    else
    {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t b = w; b < blocks; b += workers)
                    run_block(b);
            });
        for (auto& th : pool)
            th.join();
    }

    FEstimate est;
    est.total = options.samples;
    double sum = 0.0, sum_sq = 0.0;
    for (Partial const& p : partial)
    {
        sum += p.sum;
        sum_sq += p.sum_sq;
        est.valid += p.valid;
    }
    if (static_cast<double>(est.valid) < 0.1 * static_cast<double>(est.total))
        throw CoverageError("f_factor_estimate: only " + std::to_string(est.valid) + " of "
                            + std::to_string(est.total) + " samples usable");
    double const N = static_cast<double>(est.total);
    est.mean = sum / N;
    double const var = std::max(0.0, (sum_sq / N - est.mean * est.mean) * N / (N - 1.0));
    est.std_error = std::sqrt(var / N);
    return est;
}

ZnormReport znorm_check(double beta, std::size_t n, double tol)
{
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw ParameterError("beta must be positive");
    if (n < 1 || n > 4)
        throw UnsupportedSizeError("znorm_check supports 1 <= n <= 4");

    boost::math::quadrature::sinh_sinh<double> whole_line;
    boost::math::quadrature::exp_sinh<double> half_line;

    ZnormReport rep;
    rep.beta = beta;
    rep.n = n;

    double const gauss_1d = whole_line.integrate([](double x) { return std::exp(-0.5 * x * x); });
    double const a_factor = gauss_1d * gauss_1d;
    rep.factors.push_back(compare_logs("znorm_a_factor", Cx{std::log(a_factor), 0.0},
                                       Cx{std::log(2.0 * kPi), 0.0}, tol));
    rep.factors.back().details = "int exp(-|a|^2/2) dRe dIm = 2 pi";
    rep.log_quadrature = static_cast<double>(n) * std::log(a_factor);

    for (std::size_t j = 1; j < n; ++j)
    {
        double const p = beta * static_cast<double>(j) / 2.0 - 1.0;
        double const radial = half_line.integrate(
            [p](double x) { return std::exp(p * std::log(x) - 0.5 * x * x); });
        double const b_factor = 2.0 * kPi * radial;
        double const q = beta * static_cast<double>(j) / 4.0;
        double const closed = std::log(2.0 * kPi) + (q - 1.0) * std::log(2.0) + std::lgamma(q);
        rep.factors.push_back(compare_logs("znorm_b_factor_" + std::to_string(j),
                                           Cx{std::log(b_factor), 0.0}, Cx{closed, 0.0}, tol));
        rep.factors.back().details = "2 pi int x^{beta j/2 - 1} exp(-x^2/2) dx = 2 pi 2^{beta j/4 - 1} Gamma(beta j/4)";
        rep.log_quadrature += std::log(b_factor);
    }

    double const nn = static_cast<double>(n);
    rep.log_formula = (1.5 * nn - 1.0) * std::log(2.0 * kPi)
                      - (nn - nn * (nn - 1.0) * beta / 8.0 - 1.0) * std::log(2.0);
    for (std::size_t k = 1; k < n; ++k)
        rep.log_formula += std::lgamma(beta * static_cast<double>(k) / 4.0);
    rep.ratio = std::exp(rep.log_quadrature - rep.log_formula);
    rep.factorized_ratio = std::pow(2.0 * kPi, 0.5 * nn);
    return rep;
}

IdentityReport znorm_direct_n1(double tol)
{
    boost::math::quadrature::sinh_sinh<double> whole_line;
    double const direct = whole_line.integrate([&](double y) {
        boost::math::quadrature::sinh_sinh<double> inner;
        double const row = inner.integrate([y](double x) { return std::exp(-0.5 * (x * x + y * y)); });
        return row;
    });
    double const one_d = whole_line.integrate([](double x) { return std::exp(-0.5 * x * x); });
    IdentityReport rep = compare_logs("znorm_direct_n1", Cx{std::log(direct), 0.0},
                                      Cx{2.0 * std::log(one_d), 0.0}, tol);
    rep.details = "nested 2D quadrature vs product of 1D factors";
    return rep;
}

}  // namespace nhbe
