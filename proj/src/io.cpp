#include "nhbe/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace nhbe {

namespace {

class LineReader
{
  public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::vector<std::string> fields(std::size_t expected)
    {
        std::string line;
        do
        {
            if (!std::getline(in_, line))
                throw FormatError("unexpected end of input at line " + std::to_string(line_no_ + 1));
            ++line_no_;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
        } while (line.find_first_not_of(" \t") == std::string::npos);
        std::istringstream ss(line);
        std::vector<std::string> out;
        for (std::string tok; ss >> tok;)
            out.push_back(tok);
        if (out.size() != expected)
            throw FormatError("line " + std::to_string(line_no_) + ": expected "
                              + std::to_string(expected) + " fields, got "
                              + std::to_string(out.size()));
        return out;
    }

    double number(std::string const& s) const
    {
        double x = 0.0;
        auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ec != std::errc{} || ptr != s.data() + s.size())
            throw FormatError("line " + std::to_string(line_no_) + ": bad number '" + s + "'");
        return x;
    }

    std::size_t count(std::string const& s) const
    {
        std::size_t x = 0;
        auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ec != std::errc{} || ptr != s.data() + s.size() || x == 0)
            throw FormatError("line " + std::to_string(line_no_) + ": bad dimension '" + s + "'");
        return x;
    }

    Cx complex_line()
    {
        auto const f = fields(2);
        return {number(f[0]), number(f[1])};
    }

    void expect_end()
    {
        std::string line;
        while (std::getline(in_, line))
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw FormatError("trailing data after line " + std::to_string(line_no_));
    }

  private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

std::ofstream open_out(std::string const& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(std::string const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    return in;
}

}  // namespace

std::string format_double(double x)
{
    char buf[64];
    auto const [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

void write_matrix(std::ostream& out, TridiagonalModel const& t, double beta)
{
    validate(t);
    out << t.size() << ' ' << format_double(beta) << '\n';
    for (Cx z : t.a)
        out << format_double(z.real()) << ' ' << format_double(z.imag()) << '\n';
    for (Cx z : t.b)
        out << format_double(z.real()) << ' ' << format_double(z.imag()) << '\n';
}

MatrixFile read_matrix(std::istream& in)
{
    LineReader rd(in);
    auto const head = rd.fields(2);
    std::size_t const n = rd.count(head[0]);
    MatrixFile m;
    m.beta = rd.number(head[1]);
    m.model.a.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        m.model.a.push_back(rd.complex_line());
    for (std::size_t i = 0; i + 1 < n; ++i)
        m.model.b.push_back(rd.complex_line());
    rd.expect_end();
    try
    {
        validate(m.model);
    }
    catch (DimensionError const& e)
    {
        throw FormatError(e.what());
    }
    return m;
}

void save_matrix(std::string const& path, TridiagonalModel const& t, double beta)
{
    auto out = open_out(path);
    write_matrix(out, t, beta);
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

MatrixFile load_matrix(std::string const& path)
{
    auto in = open_in(path);
    return read_matrix(in);
}

void write_coordinates(std::ostream& out, SpectralCoordinates const& c)
{
    if (c.r.size() != c.lambda.size())
        throw DimensionError("coordinates: |lambda| != |r|");
    out << c.size() << '\n';
    for (std::size_t j = 0; j < c.size(); ++j)
        out << format_double(c.lambda[j].real()) << ' ' << format_double(c.lambda[j].imag()) << ' '
            << format_double(c.r[j].real()) << ' ' << format_double(c.r[j].imag()) << '\n';
}

SpectralCoordinates read_coordinates(std::istream& in)
{
    LineReader rd(in);
    std::size_t const n = rd.count(rd.fields(1)[0]);
    SpectralCoordinates c;
    for (std::size_t j = 0; j < n; ++j)
    {
        auto const f = rd.fields(4);
        c.lambda.emplace_back(rd.number(f[0]), rd.number(f[1]));
        c.r.emplace_back(rd.number(f[2]), rd.number(f[3]));
    }
    rd.expect_end();
    return c;
}

void save_coordinates(std::string const& path, SpectralCoordinates const& c)
{
    auto out = open_out(path);
    write_coordinates(out, c);
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

SpectralCoordinates load_coordinates(std::string const& path)
{
    auto in = open_in(path);
    return read_coordinates(in);
}

}  // namespace nhbe
