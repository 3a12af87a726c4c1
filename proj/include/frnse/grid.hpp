#pragma once

/**
 * @file grid.hpp
 * @brief Periodic cube discretization, spectral transforms and norms.
 *
 * A GridSpec fixes n points per axis on the box [0, L)^3 with spacing
 * h = L/n. Samples are stored densely with idx = (ix*n + iy)*n + iz.
 *
 * Transform convention, used by every module:
 *
 *     F(k) = (1/n^3) sum_x f(x) exp(-i k.x),    f(x) = sum_k F(k) exp(i k.x)
 *
 * so to_spectral carries the 1/n^3 factor and from_spectral is a plain sum.
 * A constant field c has F(0) = c and a grid plane wave has a unit
 * coefficient. Parseval reads ||f||_{L2}^2 = V sum_k |F(k)|^2 with V = L^3.
 *
 * Integrals are the periodic trapezoid rule, h^3 times the sum of samples.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "frnse/error.hpp"
#include "frnse/fft.hpp"

namespace frnse {

using cplx = std::complex<double>;

struct GridSpec {
    int n = 2;
    double L = 1.0;

    double spacing() const { return L / n; }
    double volume() const { return L * L * L; }
    double cell_volume() const
    {
        const double h = spacing();
        return h * h * h;
    }
    std::size_t size() const { return std::size_t(n) * n * n; }

    std::size_t index(int ix, int iy, int iz) const
    {
        return (std::size_t(ix) * n + iy) * n + iz;
    }

    void validate() const
    {
        if (n < 2)
            throw InvalidArgument("grid needs n >= 2 points per axis, got " + std::to_string(n));
        if (!(L > 0) || !std::isfinite(L))
            throw InvalidArgument("grid box length must be positive and finite");
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Signed mode number for FFT slot i: 0, 1, ..., n/2-1, -n/2, ..., -1.
inline int mode_number(int i, int n) { return i < (n + 1) / 2 ? i : i - n; }

inline std::vector<double> axis_coordinates(const GridSpec& g)
{
    std::vector<double> x(g.n);
    for (int i = 0; i < g.n; ++i)
        x[i] = i * g.spacing();
    return x;
}

inline std::vector<double> axis_wavenumbers(const GridSpec& g)
{
    std::vector<double> k(g.n);
    const double dk = 2 * std::numbers::pi / g.L;
    for (int i = 0; i < g.n; ++i)
        k[i] = dk * mode_number(i, g.n);
    return k;
}

struct Grid {
    GridSpec spec;
    std::vector<double> coordinates;  ///< per-axis x_i = i h
    std::vector<double> wavenumbers;  ///< per-axis k in FFT order
};

inline Grid make_grid(const GridSpec& spec)
{
    spec.validate();
    return Grid{spec, axis_coordinates(spec), axis_wavenumbers(spec)};
}

/// Calls fn(ix, iy, iz, idx) over the whole cube in storage order.
template <class Fn>
void for_each_index(const GridSpec& g, Fn&& fn)
{
    std::size_t idx = 0;
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < g.n; ++iz, ++idx)
                fn(ix, iy, iz, idx);
}

/// |k|^2 for every spectral slot, in storage order.
inline std::vector<double> wavenumber_squared(const GridSpec& g)
{
    const auto k = axis_wavenumbers(g);
    std::vector<double> k2(g.size());
    for_each_index(g, [&](int ix, int iy, int iz, std::size_t idx) {
        k2[idx] = k[ix] * k[ix] + k[iy] * k[iy] + k[iz] * k[iz];
    });
    return k2;
}

/// Complex samples on a periodic grid.
class Field {
public:
    Field() : Field(GridSpec{}) {}

    explicit Field(GridSpec spec) : spec_(spec), values_(spec.size())
    {
        spec_.validate();
    }

    Field(GridSpec spec, std::vector<cplx> values) : spec_(spec), values_(std::move(values))
    {
        spec_.validate();
        if (values_.size() != spec_.size())
            throw InvalidArgument("field length does not match n^3 of its grid");
        if (!all_finite())
            throw InvalidArgument("field contains non-finite values");
    }

    /// Skips the finiteness scan; callers inspect all_finite() themselves.
    static Field unchecked(GridSpec spec, std::vector<cplx> values)
    {
        Field f(spec);
        if (values.size() != spec.size())
            throw InvalidArgument("field length does not match n^3 of its grid");
        f.values_ = std::move(values);
        return f;
    }

    template <class Fn>
    static Field from_function(GridSpec spec, Fn&& fn)
    {
        Field f(spec);
        const double h = spec.spacing();
        for_each_index(spec, [&](int ix, int iy, int iz, std::size_t idx) {
            f.values_[idx] = fn(ix * h, iy * h, iz * h);
        });
        if (!f.all_finite())
            throw InvalidArgument("field contains non-finite values");
        return f;
    }

    const GridSpec& spec() const { return spec_; }
    std::size_t size() const { return values_.size(); }
    std::span<const cplx> values() const { return values_; }
    std::span<cplx> values() { return values_; }
    const cplx& operator[](std::size_t i) const { return values_[i]; }
    cplx& operator[](std::size_t i) { return values_[i]; }
    const cplx& at(int ix, int iy, int iz) const { return values_[spec_.index(ix, iy, iz)]; }

    bool all_finite() const
    {
        return std::all_of(values_.begin(), values_.end(), [](const cplx& v) {
            return std::isfinite(v.real()) && std::isfinite(v.imag());
        });
    }

    Field& operator+=(const Field& o)
    {
        require_same(o);
        for (std::size_t i = 0; i < values_.size(); ++i)
            values_[i] += o.values_[i];
        return *this;
    }
    Field& operator-=(const Field& o)
    {
        require_same(o);
        for (std::size_t i = 0; i < values_.size(); ++i)
            values_[i] -= o.values_[i];
        return *this;
    }
    Field& operator*=(cplx s)
    {
        for (auto& v : values_)
            v *= s;
        return *this;
    }

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(Field a, cplx s) { return a *= s; }
    friend Field operator*(cplx s, Field a) { return a *= s; }

    void require_same(const Field& o) const
    {
        if (!(spec_ == o.spec_))
            throw GridMismatch();
    }

private:
    GridSpec spec_;
    std::vector<cplx> values_;
};

/// Fourier coefficients under the convention documented at the top of this file.
struct SpectralField {
    GridSpec spec;
    std::vector<cplx> coeffs;

    void require_same(const SpectralField& o) const
    {
        if (!(spec == o.spec))
            throw GridMismatch();
    }
};

inline SpectralField to_spectral(const Field& f)
{
    SpectralField s{f.spec(), std::vector<cplx>(f.values().begin(), f.values().end())};
    fft::forward(s.coeffs, f.spec().n);
    const double scale = 1.0 / double(f.size());
    for (auto& c : s.coeffs)
        c *= scale;
    return s;
}

inline Field from_spectral(SpectralField s)
{
    fft::backward(s.coeffs, s.spec.n);
    return Field::unchecked(s.spec, std::move(s.coeffs));
}

inline Field laplacian(const Field& f)
{
    auto s = to_spectral(f);
    const auto k2 = wavenumber_squared(f.spec());
    for (std::size_t i = 0; i < k2.size(); ++i)
        s.coeffs[i] *= -k2[i];
    return from_spectral(std::move(s));
}

/// Which norm to evaluate; H1 means ||f||^2_{L2} + ||grad f||^2_{L2}.
struct Norm {
    enum class Kind { L2, Lp, H1 };
    Kind kind = Kind::L2;
    double p = 2.0;

    static Norm l2() { return {Kind::L2, 2.0}; }
    static Norm lp(double p) { return {Kind::Lp, p}; }
    static Norm h1() { return {Kind::H1, 2.0}; }
};

inline double l2_norm(const Field& f)
{
    double s = 0;
    for (const auto& v : f.values())
        s += std::norm(v);
    return std::sqrt(s * f.spec().cell_volume());
}

inline double lp_norm(const Field& f, double p)
{
    if (!(p >= 1) || !std::isfinite(p))
        throw InvalidArgument("Lp norm needs 1 <= p < inf");
    if (p == 2.0)
        return l2_norm(f);
    double s = 0;
    for (const auto& v : f.values())
        s += std::pow(std::abs(v), p);
    return std::pow(s * f.spec().cell_volume(), 1.0 / p);
}

/// Squared H1 norm from spectral coefficients: V sum (1 + |k|^2) |F|^2.
inline double h1_norm_squared(const SpectralField& s)
{
    const auto k2 = wavenumber_squared(s.spec);
    double acc = 0;
    for (std::size_t i = 0; i < k2.size(); ++i)
        acc += (1.0 + k2[i]) * std::norm(s.coeffs[i]);
    return acc * s.spec.volume();
}

inline double h1_norm(const SpectralField& s) { return std::sqrt(h1_norm_squared(s)); }
inline double h1_norm(const Field& f) { return h1_norm(to_spectral(f)); }

inline double gradient_norm(const Field& f)
{
    const auto s = to_spectral(f);
    const auto k2 = wavenumber_squared(f.spec());
    double acc = 0;
    for (std::size_t i = 0; i < k2.size(); ++i)
        acc += k2[i] * std::norm(s.coeffs[i]);
    return std::sqrt(acc * f.spec().volume());
}

inline double norm(const Field& f, Norm which)
{
    switch (which.kind) {
    case Norm::Kind::L2:
        return l2_norm(f);
    case Norm::Kind::Lp:
        return lp_norm(f, which.p);
    case Norm::Kind::H1:
        return h1_norm(f);
    }
    return 0;
}

/// <f, g> = h^3 sum conj(f) g, antilinear in the first slot.
inline cplx inner(const Field& f, const Field& g)
{
    f.require_same(g);
    cplx s = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += std::conj(f[i]) * g[i];
    return s * f.spec().cell_volume();
}

/// Pointwise |psi|^2.
inline std::vector<double> density(const Field& psi)
{
    std::vector<double> rho(psi.size());
    for (std::size_t i = 0; i < rho.size(); ++i)
        rho[i] = std::norm(psi[i]);
    return rho;
}

inline double max_abs(const Field& f)
{
    double m = 0;
    for (const auto& v : f.values())
        m = std::max(m, std::abs(v));
    return m;
}

/// Largest |f| over the outermost layer of grid cells (the box faces).
inline double boundary_max_abs(const Field& f)
{
    const int n = f.spec().n;
    double m = 0;
    for_each_index(f.spec(), [&](int ix, int iy, int iz, std::size_t idx) {
        if (ix == 0 || iy == 0 || iz == 0 || ix == n - 1 || iy == n - 1 || iz == n - 1)
            m = std::max(m, std::abs(f[idx]));
    });
    return m;
}

} // namespace frnse
