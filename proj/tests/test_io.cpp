#include <cstdio>
#include <filesystem>
#include <sstream>

#include <catch_amalgamated.hpp>

#include "nhbe/io.hpp"
#include "nhbe/specmap.hpp"
#include "support.hpp"

using nhbe::Cx;

TEST_CASE("matrix text round trip is exact", "[io]")
{
    for (std::size_t n : {1, 2, 7, 30})
    {
        nhbe::TridiagonalModel const t = testing::sample(0.5, n, n);
        std::stringstream ss;
        nhbe::write_matrix(ss, t, 0.5);
        nhbe::MatrixFile const m = nhbe::read_matrix(ss);
        CHECK(m.model == t);
        CHECK(m.beta == 0.5);
    }
}

TEST_CASE("coordinates text round trip is exact", "[io]")
{
    nhbe::SpectralCoordinates const c = nhbe::spectral_coordinates(testing::sample(2.0, 6, 4));
    std::stringstream ss;
    nhbe::write_coordinates(ss, c);
    nhbe::SpectralCoordinates const back = nhbe::read_coordinates(ss);
    CHECK(back.lambda == c.lambda);
    CHECK(back.r == c.r);
}

TEST_CASE("format_double is shortest round trip", "[io]")
{
    CHECK(nhbe::format_double(2.0) == "2");
    CHECK(nhbe::format_double(0.1) == "0.1");
    double const x = 1.0 / 3.0;
    CHECK(std::stod(nhbe::format_double(x)) == x);
}

TEST_CASE("malformed matrix files raise FormatError", "[io]")
{
    auto parse = [](std::string const& text) {
        std::istringstream in(text);
        return nhbe::read_matrix(in);
    };
    CHECK_THROWS_AS(parse(""), nhbe::FormatError);
    CHECK_THROWS_AS(parse("2 1\n1 0\n"), nhbe::FormatError);
    CHECK_THROWS_AS(parse("2 1\n1 0\n2 0\nx 0\n"), nhbe::FormatError);
    CHECK_THROWS_AS(parse("1 1\n1 0\n5 5\n"), nhbe::FormatError);
    CHECK_THROWS_AS(parse("0 1\n"), nhbe::FormatError);
    CHECK_NOTHROW(parse("1 1\n\n1.5 -2\n"));
}

TEST_CASE("malformed coordinate files raise FormatError", "[io]")
{
    std::istringstream in("2\n1 0 0.5 0\n");
    CHECK_THROWS_AS(nhbe::read_coordinates(in), nhbe::FormatError);
}

TEST_CASE("file helpers", "[io]")
{
    auto const dir = std::filesystem::temp_directory_path();
    std::string const path = (dir / "nhbe_test_io_matrix.txt").string();
    nhbe::TridiagonalModel const t = testing::sample(4.0, 3, 1);
    nhbe::save_matrix(path, t, 4.0);
    CHECK(nhbe::load_matrix(path).model == t);
    std::remove(path.c_str());
    CHECK_THROWS_AS(nhbe::load_matrix((dir / "nhbe_missing_file.txt").string()), nhbe::IoError);
}
