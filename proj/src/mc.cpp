#include "nhbe/mc.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>
#include <json.hpp>

#include "nhbe/eigensolve.hpp"

namespace nhbe {

namespace {

constexpr char kMagic[4] = {'N', 'H', 'B', 'E'};
constexpr std::size_t kRecordBytes = 25;

ChiSquareResult chi_square_uniform(std::vector<std::uint64_t> const& counts, std::size_t total)
{
    double const expected = static_cast<double>(total) / static_cast<double>(counts.size());
    ChiSquareResult res;
    for (std::uint64_t c : counts)
    {
        double const d = static_cast<double>(c) - expected;
        res.chi2 += d * d / expected;
    }
    res.dof = counts.size() - 1;
    res.p = boost::math::gamma_q(0.5 * static_cast<double>(res.dof), 0.5 * res.chi2);
    return res;
}

template <class T>
void put_le(std::string& buf, T value)
{
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes, bytes + sizeof(T));
    buf.append(reinterpret_cast<char const*>(bytes), sizeof(T));
}

template <class T>
T get_le(char const* p)
{
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

void read_exact(std::istream& in, char* dst, std::size_t count, char const* what)
{
    in.read(dst, static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count)
        throw FormatError(std::string("sample store truncated while reading ") + what);
}

}  // namespace

RunManifest run_ensemble(EnsembleParams const& params, std::size_t samples, std::size_t workers,
                         SampleStore& sink)
{
    params.validate();
    if (samples < 1)
        throw ParameterError("samples must be >= 1");
    if (workers < 1)
        throw ParameterError("workers must be >= 1");

    RunManifest manifest;
    manifest.beta = params.beta;
    manifest.n = params.n;
    manifest.samples = samples;
    manifest.seed = params.seed;
    manifest.workers = workers;

    Stream const root(params.seed);
    std::vector<std::vector<EigenRecord>> per_matrix(samples);
    std::vector<double> residual(samples, 0.0);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> failures{0};
    std::atomic<bool> abort{false};
    std::size_t const failure_limit = samples / 100;
    std::mutex diag_mutex;
    std::string first_failure;

    auto work = [&] {
        for (;;)
        {
            std::size_t const i = next.fetch_add(1);
            if (i >= samples || abort.load())
                return;
            Stream s = root.substream(i);
            TridiagonalModel const t = sample_matrix(params, s);
            std::vector<EigenRecord>& out = per_matrix[i];
            try
            {
                EigenResult const r = eigenvalues_qr(t);
                std::uint8_t const flags = r.report.degenerate_flag ? flag_degenerate : 0;
                for (Cx z : r.spectrum.lambda)
                    out.push_back({i, z, flags});
                residual[i] = r.report.max_residual;
            }
            catch (SolverError const& e)
            {
                for (Cx z : e.partial().lambda)
                    out.push_back({i, z, flag_solver_failure});
                residual[i] = e.report().max_residual;
                std::size_t const f = failures.fetch_add(1) + 1;
                {
                    std::lock_guard lock(diag_mutex);
                    if (first_failure.empty())
                        first_failure = "matrix " + std::to_string(i) + ": " + e.what();
                }
                if (f > failure_limit)
                    abort.store(true);
            }
        }
    };

    std::size_t const nthreads = std::min(workers, samples);
    if (nthreads == 1)
        work();
    else
    {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < nthreads; ++w)
            pool.emplace_back(work);
        for (auto& th : pool)
            th.join();
    }

    if (abort.load())
        throw RunAbortedError("ensemble run aborted: " + std::to_string(failures.load())
                              + " solver failures exceed 1% of " + std::to_string(samples)
                              + " matrices; first: " + first_failure);

    sink.manifest = manifest;
    sink.stats = RunStats{};
    sink.records.clear();
    sink.records.reserve(samples * params.n);
    for (std::size_t i = 0; i < samples; ++i)
    {
        auto const& rec = per_matrix[i];
        if (!rec.empty() && rec.front().flags & flag_solver_failure)
            ++sink.stats.failures;
        else if (!rec.empty() && rec.front().flags & flag_degenerate)
            ++sink.stats.degenerate;
        sink.stats.max_residual = std::max(sink.stats.max_residual, residual[i]);
        sink.records.insert(sink.records.end(), rec.begin(), rec.end());
    }
    return manifest;
}

DensityGrid density_grid(SampleStore const& store, double extent, std::size_t bins)
{
    if (bins < 2)
        throw ParameterError("density grid needs bins >= 2");
    if (!(extent > 0.0) || !std::isfinite(extent))
        throw ParameterError("density grid extent must be positive");
    DensityGrid grid;
    grid.extent = extent;
    grid.bins = bins;
    grid.counts.assign(bins * bins, 0);
    double const scale = static_cast<double>(bins) / (2.0 * extent);
    for (EigenRecord const& rec : store.records)
    {
        double const fx = std::floor((rec.lambda.real() + extent) * scale);
        double const fy = std::floor((rec.lambda.imag() + extent) * scale);
        if (!(fx >= 0.0 && fy >= 0.0 && fx < static_cast<double>(bins)
              && fy < static_cast<double>(bins)))
        {
            ++grid.dropped;
            continue;
        }
        ++grid.counts[static_cast<std::size_t>(fy) * bins + static_cast<std::size_t>(fx)];
    }
    return grid;
}

double auto_extent(SampleStore const& store)
{
    double m = 0.0;
    for (EigenRecord const& rec : store.records)
        m = std::max(m, std::abs(rec.lambda));
    return m > 0.0 ? 1.05 * m : 1.0;
}

ChiSquareResult angular_uniformity(std::vector<Cx> const& values, std::size_t bins)
{
    if (bins < 2)
        throw ParameterError("angular test needs bins >= 2");
    if (values.size() < 50 * bins)
        throw CoverageError("angular test needs at least 50 values per sector ("
                            + std::to_string(50 * bins) + "), got "
                            + std::to_string(values.size()));
    std::vector<std::uint64_t> counts(bins, 0);
    double const pi = std::numbers::pi;
    for (Cx z : values)
    {
        double const u = (std::arg(z) + pi) / (2.0 * pi);
        auto k = static_cast<std::size_t>(u * static_cast<double>(bins));
        ++counts[std::min(k, bins - 1)];
    }
    return chi_square_uniform(counts, values.size());
}

ChiSquareResult angular_uniformity(SampleStore const& store, std::size_t bins)
{
    return angular_uniformity(eigenvalues_of(store), bins);
}

std::vector<std::uint64_t> radial_counts(std::vector<Cx> const& values, std::size_t bins,
                                         double rmax)
{
    std::vector<std::uint64_t> counts(bins, 0);
    if (!(rmax > 0.0))
        return counts;
    for (Cx z : values)
    {
        double const r = std::abs(z);
        if (r > rmax)
            continue;
        auto k = static_cast<std::size_t>(r / rmax * static_cast<double>(bins));
        ++counts[std::min(k, bins - 1)];
    }
    return counts;
}

std::vector<RadialBin> radial_profile(SampleStore const& store, std::size_t bins)
{
    if (bins < 2)
        throw ParameterError("radial profile needs bins >= 2");
    std::vector<Cx> const values = eigenvalues_of(store);
    double rmax = 0.0;
    for (Cx z : values)
        rmax = std::max(rmax, std::abs(z));
    if (rmax == 0.0)
        rmax = 1.0;
    std::vector<std::uint64_t> const counts = radial_counts(values, bins, rmax);
    double const width = rmax / static_cast<double>(bins);
    double const total = static_cast<double>(values.size());
    std::vector<RadialBin> out(bins);
    for (std::size_t k = 0; k < bins; ++k)
    {
        double const r0 = width * static_cast<double>(k);
        double const r1 = r0 + width;
        double const area = std::numbers::pi * (r1 * r1 - r0 * r0);
        out[k].radius = 0.5 * (r0 + r1);
        out[k].density = total > 0.0 ? static_cast<double>(counts[k]) / (area * total) : 0.0;
    }
    return out;
}

ChiSquareResult radial_two_sample(SampleStore const& x, SampleStore const& y, std::size_t bins)
{
    if (bins < 2)
        throw ParameterError("radial comparison needs bins >= 2");
    std::vector<Cx> const vx = eigenvalues_of(x);
    std::vector<Cx> const vy = eigenvalues_of(y);
    if (vx.empty() || vy.empty())
        throw CoverageError("radial comparison needs two nonempty stores");
    double rmax = 0.0;
    for (Cx z : vx)
        rmax = std::max(rmax, std::abs(z));
    for (Cx z : vy)
        rmax = std::max(rmax, std::abs(z));
    if (rmax == 0.0)
        rmax = 1.0;
    std::vector<std::uint64_t> const cx = radial_counts(vx, bins, rmax);
    std::vector<std::uint64_t> const cy = radial_counts(vy, bins, rmax);
    double const nx = static_cast<double>(vx.size());
    double const ny = static_cast<double>(vy.size());
    double const n = nx + ny;
    ChiSquareResult res;
    std::size_t used = 0;
    for (std::size_t k = 0; k < bins; ++k)
    {
        double const col = static_cast<double>(cx[k] + cy[k]);
        if (col == 0.0)
            continue;
        ++used;
        double const ex = col * nx / n;
        double const ey = col * ny / n;
        double const dx = static_cast<double>(cx[k]) - ex;
        double const dy = static_cast<double>(cy[k]) - ey;
        res.chi2 += dx * dx / ex + dy * dy / ey;
    }
    res.dof = used > 1 ? used - 1 : 1;
    res.p = boost::math::gamma_q(0.5 * static_cast<double>(res.dof), 0.5 * res.chi2);
    return res;
}

double kolmogorov_survival(double x)
{
    if (x <= 0.0)
        return 1.0;
    double const pi = std::numbers::pi;
    if (x < 1.0)
    {
        // 1 - sqrt(2 pi)/x sum exp(-(2k-1)^2 pi^2 / (8 x^2))
        double s = 0.0;
        for (int k = 1; k <= 20; ++k)
        {
            double const m = 2.0 * k - 1.0;
            s += std::exp(-m * m * pi * pi / (8.0 * x * x));
        }
        return std::clamp(1.0 - std::sqrt(2.0 * pi) / x * s, 0.0, 1.0);
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k)
    {
        double const term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-18)
            break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult radial_ks_gaussian(std::vector<Cx> const& values)
{
    if (values.empty())
        throw CoverageError("KS test needs at least one value");
    std::vector<double> r(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        r[i] = std::abs(values[i]);
    std::sort(r.begin(), r.end());
    double const n = static_cast<double>(r.size());
    KsResult res;
    for (std::size_t i = 0; i < r.size(); ++i)
    {
        double const f = -std::expm1(-0.5 * r[i] * r[i]);
        res.statistic = std::max({res.statistic, static_cast<double>(i + 1) / n - f,
                                  f - static_cast<double>(i) / n});
    }
    double const sq = std::sqrt(n);
    res.p = kolmogorov_survival((sq + 0.12 + 0.11 / sq) * res.statistic);
    return res;
}

std::vector<Cx> eigenvalues_of(SampleStore const& store)
{
    std::vector<Cx> out;
    out.reserve(store.records.size());
    for (EigenRecord const& rec : store.records)
        out.push_back(rec.lambda);
    return out;
}

void write_store(std::ostream& out, SampleStore const& store)
{
    nlohmann::ordered_json j;
    j["format_version"] = store.manifest.format_version;
    j["beta"] = store.manifest.beta;
    j["n"] = store.manifest.n;
    j["samples"] = store.manifest.samples;
    j["seed"] = store.manifest.seed;
    j["workers"] = store.manifest.workers;
    j["records"] = store.records.size();
    j["failures"] = store.stats.failures;
    j["degenerate"] = store.stats.degenerate;
    j["max_residual"] = store.stats.max_residual;
    std::string const text = j.dump();

    std::string buf;
    buf.reserve(12 + text.size() + kRecordBytes * store.records.size());
    buf.append(kMagic, 4);
    put_le<std::uint32_t>(buf, store.manifest.format_version);
    put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(text.size()));
    buf += text;
    for (EigenRecord const& rec : store.records)
    {
        put_le<std::uint64_t>(buf, rec.matrix_index);
        put_le<double>(buf, rec.lambda.real());
        put_le<double>(buf, rec.lambda.imag());
        put_le<std::uint8_t>(buf, rec.flags);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out)
        throw IoError("failed to write sample store");
}

SampleStore read_store(std::istream& in)
{
    char head[12];
    read_exact(in, head, sizeof head, "header");
    if (std::memcmp(head, kMagic, 4) != 0)
        throw FormatError("not a sample store (bad magic)");
    auto const version = get_le<std::uint32_t>(head + 4);
    if (version != store_format_version)
        throw FormatError("unsupported sample store version " + std::to_string(version));
    auto const length = get_le<std::uint32_t>(head + 8);
    std::string text(length, '\0');
    read_exact(in, text.data(), length, "manifest");

    SampleStore store;
    std::size_t count = 0;
    try
    {
        auto const j = nlohmann::json::parse(text);
        store.manifest.format_version = j.at("format_version").get<std::uint32_t>();
        store.manifest.beta = j.at("beta").get<double>();
        store.manifest.n = j.at("n").get<std::size_t>();
        store.manifest.samples = j.at("samples").get<std::size_t>();
        store.manifest.seed = j.at("seed").get<std::uint64_t>();
        store.manifest.workers = j.at("workers").get<std::size_t>();
        store.stats.failures = j.at("failures").get<std::size_t>();
        store.stats.degenerate = j.at("degenerate").get<std::size_t>();
        store.stats.max_residual = j.at("max_residual").get<double>();
        count = j.at("records").get<std::size_t>();
    }
    catch (nlohmann::json::exception const& e)
    {
        throw FormatError(std::string("bad sample store manifest: ") + e.what());
    }
    if (store.manifest.format_version != version)
        throw FormatError("manifest version does not match header");

    std::string body(count * kRecordBytes, '\0');
    in.read(body.data(), static_cast<std::streamsize>(body.size()));
    auto const got = static_cast<std::size_t>(in.gcount());
    if (got != body.size())
        throw FormatError("sample store truncated: manifest lists " + std::to_string(count)
                          + " records, file holds " + std::to_string(got / kRecordBytes));
    if (in.peek() != std::char_traits<char>::eof())
        throw FormatError("trailing data after sample store records");

    store.records.resize(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        char const* p = body.data() + i * kRecordBytes;
        EigenRecord& rec = store.records[i];
        rec.matrix_index = get_le<std::uint64_t>(p);
        rec.lambda = Cx{get_le<double>(p + 8), get_le<double>(p + 16)};
        rec.flags = get_le<std::uint8_t>(p + 24);
    }
    return store;
}

void persist(SampleStore const& store, std::string const& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    write_store(out, store);
    out.close();
    if (!out)
        throw IoError("failed to write " + path);
}

SampleStore load(std::string const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    return read_store(in);
}

void write_grid_csv(std::ostream& out, DensityGrid const& grid)
{
    double const width = 2.0 * grid.extent / static_cast<double>(grid.bins);
    out << "ix,iy,re,im,count\n";
    for (std::size_t iy = 0; iy < grid.bins; ++iy)
        for (std::size_t ix = 0; ix < grid.bins; ++ix)
        {
            double const re = -grid.extent + width * (static_cast<double>(ix) + 0.5);
            double const im = -grid.extent + width * (static_cast<double>(iy) + 0.5);
            out << ix << ',' << iy << ',' << re << ',' << im << ',' << grid.at(ix, iy) << '\n';
        }
}

void write_grid_pgm(std::ostream& out, DensityGrid const& grid)
{
    std::uint64_t top = 0;
    for (std::uint64_t c : grid.counts)
        top = std::max(top, c);
    double const denom = std::log1p(static_cast<double>(top));
    out << "P5 " << grid.bins << ' ' << grid.bins << " 255\n";
    std::string row(grid.bins, '\0');
    for (std::size_t line = 0; line < grid.bins; ++line)
    {
        std::size_t const iy = grid.bins - 1 - line;
        for (std::size_t ix = 0; ix < grid.bins; ++ix)
        {
            double const v = top > 0 ? std::log1p(static_cast<double>(grid.at(ix, iy))) / denom : 0.0;
            row[ix] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v)));
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    if (!out)
        throw IoError("failed to write graymap");
}

void write_profile_csv(std::ostream& out, std::vector<RadialBin> const& profile)
{
    out << "radius,density\n";
    for (RadialBin const& b : profile)
        out << b.radius << ',' << b.density << '\n';
}

}  // namespace nhbe
