#include "nhbe/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nhbe/eigensolve.hpp"
#include "nhbe/io.hpp"
#include "nhbe/mc.hpp"
#include "nhbe/specmap.hpp"
#include "nhbe/verify.hpp"

namespace nhbe::cli {

namespace {

using nlohmann::ordered_json;

struct Config
{
    double beta = 2.0;
    std::size_t n = 5;
    std::uint64_t seed = 0;
    std::size_t samples = 100;
    std::size_t workers = 1;
    std::optional<double> tol;
    std::string in;
    std::string out;
    std::size_t bins = 0;
    std::string extent = "auto";
    std::string oracle = "qr";
    bool report = false;
    std::string check = "all";
    std::optional<std::size_t> k;
    std::size_t cases = 1;
    double step = 1e-5;
    double alpha = 0.01;
    std::string csv;
    std::string pgm;
    std::string compare;
};

/// Check result; the exit status is 3 when any check fails.
class CheckFailed : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

std::ostream& open_output(std::string const& path, std::ofstream& file, std::ostream& fallback,
                          bool binary = false)
{
    if (path.empty() || path == "-")
        return fallback;
    file.open(path, binary ? std::ios::binary : std::ios::out);
    if (!file)
        throw IoError("cannot open " + path + " for writing");
    return file;
}

MatrixFile matrix_input(Config const& cfg)
{
    if (!cfg.in.empty())
        return load_matrix(cfg.in);
    EnsembleParams params{cfg.beta, cfg.n, cfg.seed};
    params.validate();
    Stream s(cfg.seed);
    return MatrixFile{sample_matrix(params, s), cfg.beta};
}

ordered_json report_json(IdentityReport const& rep, ordered_json const& config)
{
    ordered_json j;
    j["name"] = rep.name;
    j["relative_error"] = rep.relative_error;
    j["passed"] = rep.passed;
    j["tolerance"] = rep.tolerance;
    j["config"] = config;
    j["lhs_log"] = rep.lhs_log;
    j["rhs_log"] = rep.rhs_log;
    if (!rep.details.empty())
        j["details"] = rep.details;
    return j;
}

void add_source_options(CLI::App* sub, Config& cfg)
{
    sub->add_option("--in", cfg.in, "Matrix file (otherwise a matrix is sampled)");
    sub->add_option("--beta", cfg.beta, "Ensemble parameter beta > 0")->capture_default_str();
    sub->add_option("--n", cfg.n, "Matrix dimension")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
}

int cmd_sample(Config const& cfg, std::ostream& out)
{
    EnsembleParams params{cfg.beta, cfg.n, cfg.seed};
    params.validate();
    Stream s(cfg.seed);
    TridiagonalModel const t = sample_matrix(params, s);
    std::ofstream file;
    write_matrix(open_output(cfg.out, file, out), t, cfg.beta);
    return exit_ok;
}

int cmd_eig(Config const& cfg, std::ostream& out)
{
    MatrixFile const m = matrix_input(cfg);
    ordered_json rep;
    Spectrum spec;
    if (cfg.oracle == "qr")
    {
        EigenResult const r = eigenvalues_qr(m.model);
        spec = r.spectrum;
        rep["oracle"] = "qr";
        rep["iterations"] = r.report.iterations;
        rep["max_residual"] = r.report.max_residual;
        rep["deflation_count"] = r.report.deflation_count;
        rep["degenerate_flag"] = r.report.degenerate_flag;
    }
    else
    {
        spec = eigenvalues_aberth(m.model);
        rep["oracle"] = "aberth";
        rep["degenerate_flag"] = has_close_pair(spec.lambda, 1e-8 * std::sqrt(frobenius_sq(m.model)));
    }
    std::ofstream file;
    std::ostream& os = open_output(cfg.out, file, out);
    for (Cx z : spec.lambda)
        os << format_double(z.real()) << ',' << format_double(z.imag()) << '\n';
    if (cfg.report)
        out << rep.dump() << '\n';
    return exit_ok;
}

int cmd_roundtrip(Config const& cfg, std::ostream& out)
{
    MatrixFile const m = matrix_input(cfg);
    double const tol = cfg.tol.value_or(1e-8);
    SpectralCoordinates const c = spectral_coordinates(m.model);
    TridiagonalModel const back = reconstruct(c).model;
    double const dev = max_relative_deviation(m.model, back);
    out << "max_relative_deviation " << format_double(dev) << '\n';
    if (!(dev <= tol))
        throw CheckFailed("round trip deviation " + format_double(dev) + " exceeds " + format_double(tol));
    return exit_ok;
}

int cmd_coords(Config const& cfg, std::ostream& out)
{
    MatrixFile const m = matrix_input(cfg);
    std::ofstream file;
    write_coordinates(open_output(cfg.out, file, out), spectral_coordinates(m.model));
    return exit_ok;
}

int cmd_reconstruct(Config const& cfg, std::ostream& out)
{
    if (cfg.in.empty())
        throw ParameterError("reconstruct needs --in <coordinates file>");
    SpectralCoordinates const c = load_coordinates(cfg.in);
    ReconstructOptions opts;
    opts.tol = cfg.tol.value_or(opts.tol);
    Reconstruction const r = reconstruct(c, opts);
    std::ofstream file;
    write_matrix(open_output(cfg.out, file, out), r.model, cfg.beta);
    return exit_ok;
}

int cmd_verify(Config const& cfg, std::ostream& out)
{
    static std::vector<std::string> const known = {"vandermonde", "jacobian", "jacobian-order",
                                                   "moments", "products", "f", "znorm"};
    std::vector<std::string> checks;
    if (cfg.check == "all")
        checks = known;
    else if (std::find(known.begin(), known.end(), cfg.check) != known.end())
        checks = {cfg.check};
    else
        throw ParameterError("unknown check '" + cfg.check + "'");
    if (cfg.cases < 1)
        throw ParameterError("--cases must be >= 1");

    EnsembleParams params{cfg.beta, cfg.n, cfg.seed};
    params.validate();
    Stream const root(cfg.seed);
    bool all_passed = true;
    auto emit = [&](IdentityReport const& rep, ordered_json const& config) {
        out << report_json(rep, config).dump() << '\n';
        all_passed = all_passed && rep.passed;
    };

    for (std::string const& check : checks)
    {
        if (cfg.check == "all" && ((check == "jacobian" || check == "jacobian-order") && cfg.n > 6))
            continue;
        if (cfg.check == "all" && check == "f" && (cfg.n < 2 || cfg.n > 3))
            continue;
        if (cfg.check == "all" && check == "znorm" && cfg.n > 4)
            continue;

        if (check == "znorm")
        {
            ordered_json config{{"check", check}, {"beta", cfg.beta}, {"n", cfg.n}};
            ZnormReport const z = znorm_check(cfg.beta, cfg.n, cfg.tol.value_or(1e-8));
            for (IdentityReport const& f : z.factors)
                emit(f, config);
            IdentityReport ratio;
            ratio.name = "znorm_ratio";
            ratio.lhs_log = std::log(z.ratio);
            ratio.rhs_log = std::log(z.factorized_ratio);
            ratio.relative_error = std::abs(z.ratio / z.factorized_ratio - 1.0);
            ratio.tolerance = cfg.tol.value_or(1e-8);
            ratio.passed = ratio.relative_error <= ratio.tolerance;
            ratio.details = "quadrature / closed-form Z = " + format_double(z.ratio)
                            + ", expected (2 pi)^{n/2} = " + format_double(z.factorized_ratio);
            emit(ratio, config);
            if (cfg.n == 1)
                emit(znorm_direct_n1(), config);
            continue;
        }

        for (std::size_t i = 0; i < cfg.cases; ++i)
        {
            Stream s = cfg.cases == 1 ? root : root.substream(i);
            TridiagonalModel const t = sample_matrix(params, s);
            ordered_json config{{"check", check}, {"beta", cfg.beta}, {"n", cfg.n},
                                {"seed", cfg.seed}, {"case", i}};
            EigenResult const eig = eigenvalues_qr(t);
            SpectralCoordinates const c = spectral_coordinates(t, eig.spectrum);

            if (check == "vandermonde")
                emit(vandermonde_identity(c, t, cfg.tol.value_or(1e-8)), config);
            else if (check == "jacobian")
                emit(jacobian_fd_check(c, JacobianOptions{cfg.step, cfg.tol.value_or(1e-4)}), config);
            else if (check == "jacobian-order")
            {
                FdConvergence const fc = jacobian_fd_convergence(c);
                IdentityReport rep;
                rep.name = "jacobian_order";
                rep.lhs_log = std::log(fc.error_h);
                rep.rhs_log = std::log(fc.error_half);
                // error_half / error_h <= 2^{-1.5} means order >= 1.5
                rep.relative_error = fc.error_h < 1e-12 && fc.error_half < 1e-12
                                         ? 0.0
                                         : fc.error_half / fc.error_h;
                rep.tolerance = std::pow(2.0, -1.5);
                rep.passed = fc.second_order;
                rep.details = "errors " + format_double(fc.error_h) + " at h = "
                              + format_double(fc.step) + ", " + format_double(fc.error_half)
                              + " at h/2, observed order " + format_double(fc.order);
                emit(rep, config);
            }
            else if (check == "moments")
            {
                std::size_t const K = cfg.k.value_or(2 * cfg.n - 1);
                emit(moment_identities(t, c, K, cfg.tol.value_or(1e-7)), config);
            }
            else if (check == "products")
                for (IdentityReport const& rep : product_identities(t, c, cfg.tol.value_or(1e-8)))
                    emit(rep, config);
            else if (check == "f")
            {
                FEstimateOptions opts;
                opts.samples = cfg.samples;
                opts.workers = cfg.workers;
                FEstimate const base = f_factor_estimate(c.lambda, cfg.beta, s.substream(0), opts);
                IdentityReport rep;
                rep.name = "f_estimate";
                rep.lhs_log = std::log(base.mean);
                rep.relative_error = base.std_error / base.mean;
                rep.tolerance = cfg.tol.value_or(0.05);
                rep.passed = rep.relative_error <= rep.tolerance;
                rep.details = "mean " + format_double(base.mean) + ", stderr "
                              + format_double(base.std_error) + ", valid "
                              + std::to_string(base.valid) + "/" + std::to_string(base.total);
                emit(rep, config);

                SpectralCoordinates const rot = rotate(c, 1.0);
                FEstimate const turned = f_factor_estimate(rot.lambda, cfg.beta, s.substream(1), opts);
                IdentityReport inv;
                inv.name = "f_rotation";
                inv.lhs_log = std::log(turned.mean);
                inv.rhs_log = std::log(base.mean);
                inv.relative_error = std::abs(turned.mean - base.mean) / base.mean;
                inv.tolerance = 3.0 * std::hypot(base.std_error, turned.std_error) / base.mean;
                inv.passed = inv.relative_error <= inv.tolerance;
                inv.details = "rotation by 1 rad: " + format_double(turned.mean) + " vs "
                              + format_double(base.mean);
                emit(inv, config);
            }
        }
    }
    if (!all_passed)
        throw CheckFailed("one or more identity checks failed");
    return exit_ok;
}

int cmd_ensemble(Config const& cfg, std::ostream& out)
{
    if (cfg.out.empty())
        throw ParameterError("ensemble needs --out <store file>");
    EnsembleParams params{cfg.beta, cfg.n, cfg.seed};
    SampleStore store;
    RunManifest const m = run_ensemble(params, cfg.samples, cfg.workers, store);
    persist(store, cfg.out);
    ordered_json j{{"beta", m.beta},
                   {"n", m.n},
                   {"samples", m.samples},
                   {"seed", m.seed},
                   {"workers", m.workers},
                   {"records", store.records.size()},
                   {"failures", store.stats.failures},
                   {"degenerate", store.stats.degenerate},
                   {"max_residual", store.stats.max_residual}};
    out << j.dump() << '\n';
    return exit_ok;
}

SampleStore store_input(Config const& cfg)
{
    if (cfg.in.empty())
        throw ParameterError("needs --in <store file>");
    return load(cfg.in);
}

int cmd_density(Config const& cfg, std::ostream& out)
{
    SampleStore const store = store_input(cfg);
    double extent = 0.0;
    if (cfg.extent == "auto")
        extent = auto_extent(store);
    else
    {
        try
        {
            std::size_t used = 0;
            extent = std::stod(cfg.extent, &used);
            if (used != cfg.extent.size())
                throw std::invalid_argument("trailing");
        }
        catch (std::exception const&)
        {
            throw ParameterError("--extent must be 'auto' or a number");
        }
    }
    DensityGrid const grid = density_grid(store, extent, cfg.bins ? cfg.bins : 256);
    if (!cfg.pgm.empty())
    {
        std::ofstream file;
        write_grid_pgm(open_output(cfg.pgm, file, out, true), grid);
    }
    if (!cfg.csv.empty() || cfg.pgm.empty())
    {
        std::ofstream file;
        write_grid_csv(open_output(cfg.csv, file, out), grid);
    }
    if (!cfg.csv.empty() || !cfg.pgm.empty())
        out << ordered_json{{"extent", extent}, {"bins", grid.bins}, {"dropped", grid.dropped}}.dump()
            << '\n';
    return exit_ok;
}

int cmd_angular(Config const& cfg, std::ostream& out)
{
    SampleStore const store = store_input(cfg);
    ChiSquareResult const r = angular_uniformity(store, cfg.bins ? cfg.bins : 16);
    bool const passed = r.p > cfg.alpha;
    out << ordered_json{{"chi2", r.chi2}, {"dof", r.dof}, {"p", r.p}, {"alpha", cfg.alpha},
                        {"passed", passed}}
               .dump()
        << '\n';
    if (!passed)
        throw CheckFailed("angular uniformity rejected");
    return exit_ok;
}

int cmd_radial(Config const& cfg, std::ostream& out)
{
    SampleStore const store = store_input(cfg);
    std::size_t const bins = cfg.bins ? cfg.bins : 64;
    if (!cfg.compare.empty())
    {
        ChiSquareResult const r = radial_two_sample(store, load(cfg.compare), bins);
        out << ordered_json{{"chi2", r.chi2}, {"dof", r.dof}, {"p", r.p}}.dump() << '\n';
        return exit_ok;
    }
    std::ofstream file;
    write_profile_csv(open_output(cfg.out, file, out), radial_profile(store, bins));
    return exit_ok;
}

}  // namespace

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    Config cfg;
    CLI::App app{"Non-Hermitian tridiagonal beta ensembles: sampling, spectra, spectral coordinates"};
    app.name("nhbe");
    app.require_subcommand(1);

    auto* sample = app.add_subcommand("sample", "Sample a matrix and write it in matrix text format");
    sample->add_option("--beta", cfg.beta, "Ensemble parameter beta > 0")->capture_default_str();
    sample->add_option("--n", cfg.n, "Matrix dimension")->capture_default_str();
    sample->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    sample->add_option("--out", cfg.out, "Output file (default stdout)");

    auto* eig = app.add_subcommand("eig", "Print the canonical spectrum as CSV re,im");
    add_source_options(eig, cfg);
    eig->add_option("--oracle", cfg.oracle, "Eigenvalue method")
        ->check(CLI::IsMember({"qr", "aberth"}))
        ->capture_default_str();
    eig->add_flag("--report", cfg.report, "Print the solver report as a JSON line");
    eig->add_option("--out", cfg.out, "CSV output file (default stdout)");

    auto* roundtrip = app.add_subcommand("roundtrip", "T -> (lambda, r) -> T' and print the deviation");
    add_source_options(roundtrip, cfg);
    roundtrip->add_option("--tol", cfg.tol, "Pass threshold on the max relative deviation (1e-8)");

    auto* coords = app.add_subcommand("coords", "Write the spectral coordinates of a matrix");
    add_source_options(coords, cfg);
    coords->add_option("--out", cfg.out, "Coordinates file (default stdout)");

    auto* recon = app.add_subcommand("reconstruct", "Rebuild a matrix from spectral coordinates");
    recon->add_option("--in", cfg.in, "Coordinates file")->required();
    recon->add_option("--out", cfg.out, "Matrix file (default stdout)");
    recon->add_option("--beta", cfg.beta, "beta recorded in the matrix header")->capture_default_str();
    recon->add_option("--tol", cfg.tol, "Tolerance for the coordinate checks (1e-8)");

    auto* verify = app.add_subcommand("verify", "Run identity checks and print JSON lines");
    verify->add_option("--check", cfg.check,
                       "vandermonde, jacobian, jacobian-order, moments, products, f, znorm or all")
        ->capture_default_str();
    verify->add_option("--beta", cfg.beta, "Ensemble parameter beta > 0")->capture_default_str();
    verify->add_option("--n", cfg.n, "Matrix dimension")->capture_default_str();
    verify->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    verify->add_option("--cases", cfg.cases, "Number of sampled matrices")->capture_default_str();
    verify->add_option("--k", cfg.k, "Highest moment for the moments check (2n - 1)");
    verify->add_option("--tol", cfg.tol, "Override the check tolerance");
    verify->add_option("--step", cfg.step, "Relative finite-difference step")->capture_default_str();
    verify->add_option("--samples", cfg.samples, "Monte Carlo samples for the f check")
        ->default_val(1000000);
    verify->add_option("--workers", cfg.workers, "Threads for the f check")->capture_default_str();

    auto* ensemble = app.add_subcommand("ensemble", "Sample many matrices and store their eigenvalues");
    ensemble->add_option("--beta", cfg.beta, "Ensemble parameter beta > 0")->capture_default_str();
    ensemble->add_option("--n", cfg.n, "Matrix dimension")->capture_default_str();
    ensemble->add_option("--samples", cfg.samples, "Number of matrices")->capture_default_str();
    ensemble->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    ensemble->add_option("--workers", cfg.workers, "Threads")->capture_default_str();
    ensemble->add_option("--out", cfg.out, "Store file")->required();

    auto* density = app.add_subcommand("density", "2D eigenvalue histogram as CSV and/or PGM");
    density->add_option("--in", cfg.in, "Store file")->required();
    density->add_option("--bins", cfg.bins, "Bins per axis (256)");
    density->add_option("--extent", cfg.extent, "Half-width of the window, or auto (1.05 max|lambda|)")
        ->capture_default_str();
    density->add_option("--csv", cfg.csv, "CSV output (stdout if neither output is given)");
    density->add_option("--pgm", cfg.pgm, "PGM P5 heatmap output");

    auto* angular = app.add_subcommand("angular", "Chi-square test of uniform eigenvalue phases");
    angular->add_option("--in", cfg.in, "Store file")->required();
    angular->add_option("--bins", cfg.bins, "Sectors (16)");
    angular->add_option("--alpha", cfg.alpha, "Fail when p <= alpha")->capture_default_str();

    auto* radial = app.add_subcommand("radial", "Radial eigenvalue profile, or a two-store comparison");
    radial->add_option("--in", cfg.in, "Store file")->required();
    radial->add_option("--bins", cfg.bins, "Annuli (64)");
    radial->add_option("--out", cfg.out, "CSV output (default stdout)");
    radial->add_option("--compare", cfg.compare, "Second store: print a chi-square homogeneity test");

    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try
    {
        if (*sample)
            return cmd_sample(cfg, out);
        if (*eig)
            return cmd_eig(cfg, out);
        if (*roundtrip)
            return cmd_roundtrip(cfg, out);
        if (*coords)
            return cmd_coords(cfg, out);
        if (*recon)
            return cmd_reconstruct(cfg, out);
        if (*verify)
            return cmd_verify(cfg, out);
        if (*ensemble)
            return cmd_ensemble(cfg, out);
        if (*density)
            return cmd_density(cfg, out);
        if (*angular)
            return cmd_angular(cfg, out);
        if (*radial)
            return cmd_radial(cfg, out);
    }
    catch (CheckFailed const& e)
    {
        err << "check failed: " << e.what() << '\n';
        return exit_check_failed;
    }
    catch (ParameterError const& e)
    {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (IoError const& e)
    {
        err << "I/O error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (FormatError const& e)
    {
        err << "format error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (Error const& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_domain;
    }
    return exit_usage;
}

}  // namespace nhbe::cli
