#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

namespace frnse::quadrature {

struct Rule {
    std::vector<double> nodes;    ///< on [-1, 1]
    std::vector<double> weights;
};

inline Rule compute_gauss_legendre(int order)
{
    Rule r;
    r.nodes.resize(order);
    r.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        r.nodes[i] = x;
        r.weights[i] = 2 / ((1 - x * x) * dp * dp);
    }
    return r;
}

/// Gauss-Legendre rule of the given order, computed once per order.
inline const Rule& gauss_legendre(int order)
{
    static std::mutex mutex;
    static std::map<int, Rule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end())
        it = cache.emplace(order, compute_gauss_legendre(order)).first;
    return it->second;
}

/// Integral of fn over [lo, hi] with an order-point Gauss-Legendre rule.
template <class Fn>
double integrate(Fn&& fn, double lo, double hi, int order = 20)
{
    const auto& r = gauss_legendre(order);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0;
    for (int i = 0; i < order; ++i)
        s += r.weights[i] * fn(mid + half * r.nodes[i]);
    return s * half;
}

} // namespace frnse::quadrature
