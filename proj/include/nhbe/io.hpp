#pragma once

#include <iosfwd>
#include <string>

#include "nhbe/core.hpp"
#include "nhbe/specmap.hpp"

namespace nhbe {

/*!
 * Matrix text format:
 *
 *     n beta
 *     re(a_1) im(a_1)
 *     ...                 (n lines, bottom-up)
 *     re(b_1) im(b_1)
 *     ...                 (n - 1 lines, bottom-up)
 *
 * Numbers are written in shortest round-trip form, so write/read is exact.
 */
struct MatrixFile
{
    TridiagonalModel model;
    double beta = 0.0;
};

void write_matrix(std::ostream& out, TridiagonalModel const& t, double beta);
MatrixFile read_matrix(std::istream& in);

void save_matrix(std::string const& path, TridiagonalModel const& t, double beta);
MatrixFile load_matrix(std::string const& path);

/// Coordinates text format: "n", then n lines "re(lambda) im(lambda) re(r) im(r)".
void write_coordinates(std::ostream& out, SpectralCoordinates const& c);
SpectralCoordinates read_coordinates(std::istream& in);

void save_coordinates(std::string const& path, SpectralCoordinates const& c);
SpectralCoordinates load_coordinates(std::string const& path);

/// Shortest decimal string that parses back to x.
std::string format_double(double x);

}  // namespace nhbe
