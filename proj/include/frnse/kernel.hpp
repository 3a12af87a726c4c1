#pragma once

/**
 * @file kernel.hpp
 * @brief Newton kernel K, its inner truncation K_a and the tail, on the grid.
 *
 * For a density rho sampled inside the box, (K rho)(x) = int rho(y)/|x-y| dy
 * is evaluated as a free-space convolution
 *
 *     (K rho)(x_i) = h^3 sum_j T(x_i - x_j) rho_j,
 *
 * where T is the cell average of the kernel over the grid cell centred at
 * each lattice offset. Every in-box pair has offsets in [-(n-1), n-1]^3, so
 * placing T on a 2n-per-axis padded grid turns the sum into an alias-free
 * circular convolution done with one real FFT pair. The discrete multiplier
 * used by the FFT path is the DFT of T, which makes the direct double sum in
 * direct_convolution_oracle() the same discrete operator evaluated another way.
 *
 * Variants share one quadrature: Full averages 1/|x| over the cell (clipped
 * to |x| <= R), Tail averages 1/|x| restricted to |x| <= a, and Inner is
 * Full - Tail. All three tables are nonnegative, Inner <= Full entrywise, and
 * the Tail table sums to h^-3 int_{|x|<=a} dx/|x| = 2 pi a^2 / h^3.
 */

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "frnse/error.hpp"
#include "frnse/fft.hpp"
#include "frnse/grid.hpp"
#include "frnse/quadrature.hpp"
#include "frnse/random_field.hpp"

namespace frnse {

enum class KernelVariant { Full, InnerTruncated, Tail };

inline std::string to_string(KernelVariant v)
{
    switch (v) {
    case KernelVariant::Full:
        return "full";
    case KernelVariant::InnerTruncated:
        return "inner";
    case KernelVariant::Tail:
        return "tail";
    }
    return "full";
}

inline KernelVariant parse_kernel_variant(std::string_view s)
{
    if (s == "full")
        return KernelVariant::Full;
    if (s == "inner")
        return KernelVariant::InnerTruncated;
    if (s == "tail")
        return KernelVariant::Tail;
    throw InvalidArgument("unknown kernel variant '" + std::string(s) + "' (full|inner|tail)");
}

/// Smallest admissible support radius: the box diagonal.
inline double min_support_radius(const GridSpec& g) { return std::sqrt(3.0) * g.L; }

struct KernelSpec {
    KernelVariant variant = KernelVariant::Full;
    double a = 0.0;  ///< truncation radius (length); ignored by Full
    double R = 0.0;  ///< free-space support radius (length)

    static KernelSpec full(double R) { return {KernelVariant::Full, 0.0, R}; }
    static KernelSpec inner_truncated(double a, double R)
    {
        return {KernelVariant::InnerTruncated, a, R};
    }
    static KernelSpec tail(double a, double R) { return {KernelVariant::Tail, a, R}; }
    static KernelSpec full_for(const GridSpec& g) { return full(min_support_radius(g)); }

    bool truncated() const { return variant != KernelVariant::Full; }
    KernelSpec as_full() const { return full(R); }

    void validate() const
    {
        if (!(R > 0) || !std::isfinite(R))
            throw InvalidArgument("kernel support radius R must be positive");
        if (truncated() && !(a > 0 && a < R))
            throw InvalidArgument("truncated kernels need 0 < a < R");
    }

    void validate_for(const GridSpec& g) const
    {
        validate();
        // Relative slack so R = sqrt(3) L computed elsewhere is accepted.
        if (R < min_support_radius(g) * (1 - 1e-12))
            throw InvalidArgument("kernel support radius R must cover the box diagonal sqrt(3) L");
    }

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// Continuous 3D Fourier transform of the radially truncated kernel at |k|.
inline double coulomb_multiplier(const KernelSpec& spec, double k)
{
    spec.validate();
    if (k < 0)
        throw InvalidArgument("wavenumber magnitude must be nonnegative");
    const double pi = std::numbers::pi;
    // 1 - cos x = 2 sin^2(x/2) and cos x - cos y = 2 sin((y+x)/2) sin((y-x)/2)
    // keep the small-k limit free of cancellation.
    auto one_minus_cos_over_k2 = [&](double r) {
        if (k == 0)
            return 0.5 * r * r;
        const double s = std::sin(0.5 * k * r);
        return 2 * s * s / (k * k);
    };
    switch (spec.variant) {
    case KernelVariant::Full:
        return 4 * pi * one_minus_cos_over_k2(spec.R);
    case KernelVariant::Tail:
        return 4 * pi * one_minus_cos_over_k2(spec.a);
    case KernelVariant::InnerTruncated:
        if (k == 0)
            return 2 * pi * (spec.R * spec.R - spec.a * spec.a);
        return 4 * pi * 2 * std::sin(0.5 * k * (spec.R + spec.a)) *
               std::sin(0.5 * k * (spec.R - spec.a)) / (k * k);
    }
    return 0;
}

/// Schur bound sup_x int_{|x-y|<=a} dy/|x-y| = 2 pi a^2 on every L^p norm of the tail.
inline double tail_norm_bound(double a)
{
    if (!(a > 0))
        throw InvalidArgument("tail radius must be positive");
    return 2 * std::numbers::pi * a * a;
}

namespace detail {

// int over the cube of side h centred at the origin of 1/|x| on |x| <= hi.
// The cube splits into 48 congruent wedges (6 face pyramids x 8 triangles);
// along each ray the radial integral is exact, leaving a smooth 2D integral
// over the face, split at the circle where the ray leaves the ball.
inline double origin_cell_integral(double h, double hi)
{
    auto radial = [&](double s) {
        const double rho = h * std::sqrt(s * s + 0.25);
        const double m = std::min(hi, rho);
        return m * m / (rho * rho * rho) * s;
    };
    const double sstar = hi > 0.5 * h ? std::sqrt((hi / h) * (hi / h) - 0.25) : 0.0;
    auto over_s = [&](double theta) {
        const double smax = 0.5 / std::cos(theta);
        if (sstar > 0 && sstar < smax)
            return quadrature::integrate(radial, 0.0, sstar, 40) +
                   quadrature::integrate(radial, sstar, smax, 40);
        return quadrature::integrate(radial, 0.0, smax, 40);
    };
    const double quarter = 0.25 * std::numbers::pi;
    double angular;
    if (sstar > 0.5 && sstar < 0.5 * std::sqrt(2.0)) {
        const double theta_star = std::acos(0.5 / sstar);
        angular = quadrature::integrate(over_s, 0.0, theta_star, 40) +
                  quadrature::integrate(over_s, theta_star, quarter, 40);
    } else {
        angular = quadrature::integrate(over_s, 0.0, quarter, 40);
    }
    return 48 * 0.25 * h * h * h * angular;
}

inline double gl_cube(const std::array<double, 3>& c, double s, double hi, bool clip, int order)
{
    const auto& rule = quadrature::gauss_legendre(order);
    const double half = 0.5 * s;
    double acc = 0;
    for (int i = 0; i < order; ++i) {
        const double x = c[0] + half * rule.nodes[i];
        for (int j = 0; j < order; ++j) {
            const double y = c[1] + half * rule.nodes[j];
            const double wij = rule.weights[i] * rule.weights[j];
            for (int k = 0; k < order; ++k) {
                const double z = c[2] + half * rule.nodes[k];
                const double r = std::sqrt(x * x + y * y + z * z);
                if (clip && r > hi)
                    continue;
                acc += wij * rule.weights[k] / r;
            }
        }
    }
    return acc * half * half * half;
}

// int over an axis-aligned cube (centre c, side s) not containing the origin
// of 1/|x| on |x| <= hi. Subdivides near the singularity and along the sphere.
inline double cube_integral(const std::array<double, 3>& c, double s, double hi, int depth)
{
    double dmin2 = 0, dmax2 = 0;
    for (double ci : c) {
        const double lo = std::max(0.0, std::abs(ci) - 0.5 * s);
        const double up = std::abs(ci) + 0.5 * s;
        dmin2 += lo * lo;
        dmax2 += up * up;
    }
    const double dmin = std::sqrt(dmin2), dmax = std::sqrt(dmax2);
    if (dmin >= hi)
        return 0.0;

    auto split = [&] {
        double acc = 0;
        const double q = 0.25 * s;
        for (int a = -1; a <= 1; a += 2)
            for (int b = -1; b <= 1; b += 2)
                for (int d = -1; d <= 1; d += 2)
                    acc += cube_integral({c[0] + a * q, c[1] + b * q, c[2] + d * q}, 0.5 * s, hi,
                                         depth + 1);
        return acc;
    };

    if (dmax <= hi) {
        if (s > 0.25 * dmin && depth < 12)
            return split();
        return gl_cube(c, s, hi, false, 5);
    }
    if (depth < 6)
        return split();
    return gl_cube(c, s, hi, true, 3);
}

/// Cell averages of 1/|x| 1{|x| <= hi} at every offset in [-(n-1), n-1]^3,
/// stored on the (2n)^3 padded grid at index offset mod 2n.
inline std::vector<double> padded_cell_averages(const GridSpec& g, double hi)
{
    const int n = g.n, P = 2 * n;
    const double h = g.spacing();
    const double inv_vol = 1.0 / g.cell_volume();
    std::vector<double> table(std::size_t(P) * P * P, 0.0);
    auto put = [&](int dx, int dy, int dz, double v) {
        const auto w = [P](int d) { return d < 0 ? d + P : d; };
        table[(std::size_t(w(dx)) * P + w(dy)) * P + w(dz)] = v;
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
            for (int k = 0; k <= j; ++k) {
                double v;
                if (i == 0)
                    v = origin_cell_integral(h, hi) * inv_vol;
                else
                    v = cube_integral({i * h, j * h, k * h}, h, hi, 0) * inv_vol;
                const std::array<int, 3> base{i, j, k};
                static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
                for (const auto& p : perms)
                    for (int sx = -1; sx <= 1; sx += 2)
                        for (int sy = -1; sy <= 1; sy += 2)
                            for (int sz = -1; sz <= 1; sz += 2)
                                put(sx * base[p[0]], sy * base[p[1]], sz * base[p[2]], v);
            }
    return table;
}

struct TableKey {
    int n;
    double L, hi;
    friend bool operator<(const TableKey& x, const TableKey& y)
    {
        return std::tie(x.n, x.L, x.hi) < std::tie(y.n, y.L, y.hi);
    }
};

inline std::shared_ptr<const std::vector<double>> cached_cell_averages(const GridSpec& g, double hi)
{
    static std::mutex mutex;
    static std::map<TableKey, std::shared_ptr<const std::vector<double>>> cache;
    std::lock_guard lock(mutex);
    const TableKey key{g.n, g.L, hi};
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;
    auto table = std::make_shared<const std::vector<double>>(padded_cell_averages(g, hi));
    cache.emplace(key, table);
    return table;
}

} // namespace detail

/// Discrete kernel operator on one grid: cell-averaged table plus its padded multiplier.
class KernelOperator {
public:
    KernelOperator(const GridSpec& grid, const KernelSpec& spec) : grid_(grid), spec_(spec)
    {
        grid_.validate();
        spec_.validate_for(grid_);
        if (spec_.variant == KernelVariant::Full) {
            table_ = *detail::cached_cell_averages(grid_, spec_.R);
        } else if (spec_.variant == KernelVariant::Tail) {
            table_ = *detail::cached_cell_averages(grid_, spec_.a);
        } else {
            auto full = detail::cached_cell_averages(grid_, spec_.R);
            auto tail = detail::cached_cell_averages(grid_, spec_.a);
            table_.resize(full->size());
            for (std::size_t i = 0; i < table_.size(); ++i)
                table_[i] = std::max(0.0, (*full)[i] - (*tail)[i]);
        }
        build_multiplier();
    }

    /// Rebuilds an operator from a padded table, e.g. one loaded from disk.
    KernelOperator(const GridSpec& grid, const KernelSpec& spec, std::vector<double> padded_table)
        : grid_(grid), spec_(spec), table_(std::move(padded_table))
    {
        grid_.validate();
        spec_.validate_for(grid_);
        const std::size_t P = padded_n();
        if (table_.size() != P * P * P)
            throw InvalidArgument("kernel table does not match the padded grid");
        build_multiplier();
    }

    const GridSpec& grid() const { return grid_; }
    const KernelSpec& spec() const { return spec_; }
    int padded_n() const { return 2 * grid_.n; }

    /// Cell-averaged kernel at lattice offset (dx, dy, dz), |d| < n.
    double table(int dx, int dy, int dz) const
    {
        const int P = padded_n();
        const auto w = [P](int d) { return ((d % P) + P) % P; };
        return table_[(std::size_t(w(dx)) * P + w(dy)) * P + w(dz)];
    }

    std::span<const double> padded_table() const { return table_; }

    /// h^3 times the DFT of the padded table, half spectrum (last axis 0..n).
    std::span<const double> multiplier() const { return multiplier_; }

    /// h^3 sum of the table: the discrete integral of the kernel.
    double mass() const { return multiplier_[0]; }

    std::vector<double> apply(std::span<const double> density) const
    {
        if (density.size() != grid_.size())
            throw GridMismatch();
        const int n = grid_.n, P = padded_n();
        std::vector<double> pad(std::size_t(P) * P * P, 0.0);
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                std::memcpy(&pad[(std::size_t(ix) * P + iy) * P], &density[grid_.index(ix, iy, 0)],
                            sizeof(double) * n);
        std::vector<cplx> spectrum(std::size_t(P) * P * (P / 2 + 1));
        fft::r2c(pad, spectrum, P);
        for (std::size_t i = 0; i < spectrum.size(); ++i)
            spectrum[i] *= multiplier_[i];
        fft::c2r(spectrum, pad, P);
        std::vector<double> out(grid_.size());
        const double scale = 1.0 / (double(P) * P * P);
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy) {
                const double* src = &pad[(std::size_t(ix) * P + iy) * P];
                double* dst = &out[grid_.index(ix, iy, 0)];
                for (int iz = 0; iz < n; ++iz)
                    dst[iz] = src[iz] * scale;
            }
        return out;
    }

    /// Linear in the density; complex input is handled part by part.
    Field apply(const Field& density) const
    {
        if (!(density.spec() == grid_))
            throw GridMismatch();
        std::vector<double> re(density.size()), im(density.size());
        bool has_imag = false;
        for (std::size_t i = 0; i < density.size(); ++i) {
            re[i] = density[i].real();
            im[i] = density[i].imag();
            has_imag = has_imag || im[i] != 0.0;
        }
        const auto out_re = apply(re);
        std::vector<cplx> out(density.size());
        if (has_imag) {
            const auto out_im = apply(im);
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] = {out_re[i], out_im[i]};
        } else {
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] = out_re[i];
        }
        return Field::unchecked(grid_, std::move(out));
    }

private:
    void build_multiplier()
    {
        const int P = padded_n();
        std::vector<cplx> spectrum(std::size_t(P) * P * (P / 2 + 1));
        fft::r2c(table_, spectrum, P);
        // The table is even in every axis, so its DFT is real up to rounding.
        multiplier_.resize(spectrum.size());
        const double vol = grid_.cell_volume();
        for (std::size_t i = 0; i < spectrum.size(); ++i)
            multiplier_[i] = spectrum[i].real() * vol;
    }

    GridSpec grid_;
    KernelSpec spec_;
    std::vector<double> table_;
    std::vector<double> multiplier_;
};

/// Shared, lazily built operator for (grid, spec).
inline std::shared_ptr<const KernelOperator> kernel_operator(const GridSpec& grid,
                                                             const KernelSpec& spec)
{
    using Key = std::tuple<int, double, int, double, double>;
    static std::mutex mutex;
    static std::map<Key, std::shared_ptr<const KernelOperator>> cache;
    const Key key{grid.n, grid.L, static_cast<int>(spec.variant), spec.truncated() ? spec.a : 0.0,
                  spec.R};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
    }
    auto op = std::make_shared<const KernelOperator>(grid, spec);
    std::lock_guard lock(mutex);
    return cache.emplace(key, op).first->second;
}

inline Field apply_kernel(const KernelSpec& spec, const Field& density)
{
    return kernel_operator(density.spec(), spec)->apply(density);
}

inline std::vector<double> apply_kernel(const KernelSpec& spec, const GridSpec& grid,
                                        std::span<const double> density)
{
    return kernel_operator(grid, spec)->apply(density);
}

/// Brute-force h^3 sum_j T(x_i - x_j) rho_j over the same cell-averaged table.
/// O(n^6); refuses n > max_n unless forced.
inline Field direct_convolution_oracle(const KernelSpec& spec, const Field& density,
                                       bool force = false, int max_n = 16)
{
    const GridSpec& g = density.spec();
    if (g.n > max_n && !force)
        throw InvalidArgument("direct convolution oracle refuses n > " + std::to_string(max_n) +
                              " without force");
    const auto op = kernel_operator(g, spec);
    const double vol = g.cell_volume();
    std::vector<cplx> out(g.size());
    for_each_index(g, [&](int ix, int iy, int iz, std::size_t i) {
        cplx acc = 0;
        for_each_index(g, [&](int jx, int jy, int jz, std::size_t j) {
            acc += op->table(ix - jx, iy - jy, iz - jz) * density[j];
        });
        out[i] = acc * vol;
    });
    return Field::unchecked(g, std::move(out));
}

struct TailNormEstimate {
    double a = 0;
    double p = 2;
    double estimate = 0;  ///< empirical lower estimate of ||Tail||_{Lp -> Lp}
    double bound = 0;     ///< 2 pi a^2
    int trials = 0;
    bool resolved = true; ///< false when h >= a
    std::string warning;
};

/// Lower estimate of the Lp operator norm of Tail(a) on the grid. For p = 2,
/// power iteration on the symmetric discrete operator; for every p, the best
/// ratio over seeded trial functions (random densities and centred bumps).
inline TailNormEstimate tail_norm_estimate(const GridSpec& grid, double a, double p, int trials,
                                           std::uint64_t seed, int power_iterations = 60)
{
    if (!(p > 1))
        throw InvalidArgument("tail norm estimate needs p > 1");
    TailNormEstimate est;
    est.a = a;
    est.p = p;
    est.bound = tail_norm_bound(a);
    est.trials = trials;
    if (grid.spacing() >= a) {
        est.resolved = false;
        est.warning = "grid spacing h >= a: the truncation is below grid resolution";
    }
    const auto op = kernel_operator(grid, KernelSpec::tail(a, min_support_radius(grid)));
    auto ratio = [&](const Field& f) {
        const double den = lp_norm(f, p);
        return den > 0 ? lp_norm(op->apply(f), p) / den : 0.0;
    };

    std::mt19937_64 rng(seed);
    double best = 0;
    for (int t = 0; t < trials; ++t)
        best = std::max(best, ratio(random_density(grid, rng)));

    const double c = 0.5 * grid.L;
    for (double width : {0.5 * a, a, 2 * a, grid.L / 6}) {
        const Field bump = Field::from_function(grid, [&](double x, double y, double z) {
            const double r2 = (x - c) * (x - c) + (y - c) * (y - c) + (z - c) * (z - c);
            return cplx(std::exp(-0.5 * r2 / (width * width)));
        });
        best = std::max(best, ratio(bump));
    }

    if (p == 2.0) {
        Field x = random_density(grid, rng);
        for (int it = 0; it < power_iterations; ++it) {
            Field y = op->apply(x);
            const double nx = l2_norm(x), ny = l2_norm(y);
            if (nx == 0 || ny == 0)
                break;
            best = std::max(best, ny / nx);
            x = y * cplx(1.0 / ny);
        }
    } else {
        // The p = 2 maximiser is a natural extra trial for other exponents.
        Field x = random_density(grid, rng);
        for (int it = 0; it < power_iterations / 2; ++it) {
            Field y = op->apply(x);
            const double ny = l2_norm(y);
            if (ny == 0)
                break;
            x = y * cplx(1.0 / ny);
        }
        best = std::max(best, ratio(x));
    }
    est.estimate = best;
    return est;
}

} // namespace frnse
