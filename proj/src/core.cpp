#include "nhbe/core.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace nhbe {

TridiagonalModel::TridiagonalModel(std::vector<Cx> diag, std::vector<Cx> sub)
    : a(std::move(diag)), b(std::move(sub))
{
    validate(*this);
}

void validate(TridiagonalModel const& t)
{
    if (t.a.empty())
        throw DimensionError("tridiagonal model needs n >= 1");
    if (t.b.size() + 1 != t.a.size())
        throw DimensionError("subdiagonal length " + std::to_string(t.b.size())
                             + " does not match n = " + std::to_string(t.a.size()));
    auto finite = [](Cx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    for (Cx z : t.a)
        if (!finite(z))
            throw DimensionError("non-finite diagonal entry");
    for (Cx z : t.b)
        if (!finite(z))
            throw DimensionError("non-finite subdiagonal entry");
}

void EnsembleParams::validate() const
{
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw ParameterError("beta must be a finite positive number, got " + std::to_string(beta));
    if (n == 0)
        throw ParameterError("matrix dimension n must be at least 1");
}

TridiagonalModel sample_matrix(EnsembleParams const& params, Stream& stream)
{
    params.validate();
    TridiagonalModel t;
    t.a.resize(params.n);
    t.b.resize(params.n - 1);
    for (auto& aj : t.a)
        aj = sample_normal_complex(stream);
    for (std::size_t j = 1; j < params.n; ++j)
    {
        double const alpha = 0.5 * params.beta * static_cast<double>(j);
        Cx bj{0.0, 0.0};
        while (bj == Cx{0.0, 0.0})
        {
            double const modulus = sample_chi(alpha, stream);
            double const phase = 2.0 * std::numbers::pi * stream.uniform();
            bj = std::polar(modulus, phase);
        }
        t.b[j - 1] = bj;
    }
    return t;
}

Reduction reduce_to_unit_superdiagonal(GeneralTridiagonal const& g)
{
    std::size_t const n = g.size();
    if (n == 0 || g.btilde.size() + 1 != n || g.c.size() + 1 != n)
        throw DimensionError("general tridiagonal band lengths are inconsistent");

    Reduction out;
    out.model.a = g.a;
    out.model.b.resize(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j)
    {
        if (g.c[j] == Cx{} || g.btilde[j] == Cx{})
            throw DegenerateInputError("reduction needs nonzero c_j and btilde_j (j = "
                                       + std::to_string(j + 1) + ")");
        out.model.b[j] = g.c[j] * g.btilde[j];
    }
    out.scaling.resize(n);
    out.scaling[0] = 1.0;
    // Row i+1 picks up c_{n-1-i}.
    for (std::size_t i = 0; i + 1 < n; ++i)
        out.scaling[i + 1] = out.scaling[i] * g.c[n - 2 - i];
    return out;
}

double frobenius_sq(TridiagonalModel const& t)
{
    double s = static_cast<double>(t.size() - 1);
    for (Cx z : t.a)
        s += std::norm(z);
    for (Cx z : t.b)
        s += std::norm(z);
    return s;
}

std::vector<Cx> matvec(TridiagonalModel const& t, std::span<Cx const> v)
{
    std::size_t const n = t.size();
    if (v.size() != n)
        throw DimensionError("matvec: vector length " + std::to_string(v.size())
                             + " != n = " + std::to_string(n));
    std::vector<Cx> out(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        Cx s = t.diag_at(i) * v[i];
        if (i + 1 < n)
            s += v[i + 1];
        if (i > 0)
            s += t.sub_at(i) * v[i - 1];
        out[i] = s;
    }
    return out;
}

std::vector<Cx> rmatvec(TridiagonalModel const& t, std::span<Cx const> v)
{
    std::size_t const n = t.size();
    if (v.size() != n)
        throw DimensionError("rmatvec: vector length " + std::to_string(v.size())
                             + " != n = " + std::to_string(n));
    std::vector<Cx> out(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        // column k: diag at row k, super at row k-1, sub at row k+1
        Cx s = v[k] * t.diag_at(k);
        if (k > 0)
            s += v[k - 1];
        if (k + 1 < n)
            s += v[k + 1] * t.sub_at(k + 1);
        out[k] = s;
    }
    return out;
}

}  // namespace nhbe
