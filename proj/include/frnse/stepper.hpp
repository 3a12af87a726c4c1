#pragma once

/**
 * @file stepper.hpp
 * @brief Integrating-factor RK4 reference integrator with blow-up monitoring.
 *
 * Classical RK4 on u(t) = U(-t) psi(t), U(t) = e^{i a1 t Lap}, for which
 * u_t = U(-t) N(U(t) u) with N = a2 f - a2 g2. Written back in psi and with
 * E(s) = U(s), one step of size dt is
 *
 *     k1 = N(psi)
 *     k2 = N(E(dt/2) (psi + dt/2 k1))
 *     k3 = N(E(dt/2) psi + dt/2 k2)
 *     k4 = N(E(dt) psi + dt E(dt/2) k3)
 *     psi' = E(dt) psi + dt/6 (E(dt) k1 + 2 E(dt/2) (k2 + k3) + k4)
 */

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "frnse/error.hpp"
#include "frnse/grid.hpp"
#include "frnse/kernel.hpp"
#include "frnse/nonlinear.hpp"
#include "frnse/propagate.hpp"
#include "frnse/trajectory.hpp"

namespace frnse {

struct StepConfig {
    double T = 0.5;
    double dt = 1e-3;
    KernelSpec kspec;
    PhysParams params;
    double h1_cap = 1e3;
    double dt_min = 1e-8;
    int snapshot_every = 0;  ///< 0 keeps only the initial and final fields

    void validate() const
    {
        if (!(T > 0) || !std::isfinite(T))
            throw InvalidArgument("stepper horizon T must be positive");
        if (!(dt_min > 0))
            throw InvalidArgument("dt_min must be positive");
        if (!(dt > dt_min) || !std::isfinite(dt))
            throw InvalidArgument("dt must exceed dt_min");
        if (!(h1_cap > 0))
            throw InvalidArgument("h1_cap must be positive");
        if (snapshot_every < 0)
            throw InvalidArgument("snapshot_every must be nonnegative");
        kspec.validate();
        params.validate();
    }
};

namespace detail {

inline Field propagate_with(const Field& psi, const std::vector<double>& k2, double t, double a1)
{
    auto s = to_spectral(psi);
    apply_free_phase(s.coeffs, k2, t, a1);
    return from_spectral(std::move(s));
}

// One IFRK4 step given k1 = N(psi), so callers can reuse it for diagnostics.
inline Field ifrk4_step_from(const Field& psi, const Field& k1, double dt, const StepConfig& cfg,
                             const std::vector<double>& k2sq)
{
    const double a1 = cfg.params.alpha1;
    if (cfg.params.alpha2 == 0)
        return propagate_with(psi, k2sq, dt, a1);
    auto N = [&](const Field& f) { return nonlinear_term(f, cfg.params, cfg.kspec); };
    const cplx half(0.5 * dt);
    const Field E_psi_half = propagate_with(psi, k2sq, 0.5 * dt, a1);
    const Field E_psi = propagate_with(psi, k2sq, dt, a1);

    const Field k2 = N(propagate_with(psi + k1 * half, k2sq, 0.5 * dt, a1));
    const Field k3 = N(E_psi_half + k2 * half);
    const Field k4 = N(E_psi + propagate_with(k3, k2sq, 0.5 * dt, a1) * cplx(dt));

    Field acc = propagate_with(k1, k2sq, dt, a1);
    acc += propagate_with(k2 + k3, k2sq, 0.5 * dt, a1) * cplx(2.0);
    acc += k4;
    Field out = E_psi + acc * cplx(dt / 6);
    if (!out.all_finite())
        throw DivergenceDetected("IFRK4 step produced non-finite values");
    return out;
}

} // namespace detail

inline Field ifrk4_step(const Field& psi, double dt, const StepConfig& cfg)
{
    cfg.params.validate();
    if (!psi.all_finite())
        throw DivergenceDetected("IFRK4 input contains non-finite values");
    const auto k2sq = wavenumber_squared(psi.spec());
    const Field k1 = cfg.params.alpha2 == 0 ? Field(psi.spec())
                                             : nonlinear_term(psi, cfg.params, cfg.kspec);
    return detail::ifrk4_step_from(psi, k1, dt, cfg, k2sq);
}

enum class StepStatus { Completed, BlowupSuspected, DivergenceDetected };

inline std::string to_string(StepStatus s)
{
    switch (s) {
    case StepStatus::Completed:
        return "completed";
    case StepStatus::BlowupSuspected:
        return "blowup_suspected";
    case StepStatus::DivergenceDetected:
        return "divergence_detected";
    }
    return "";
}

struct StepDiagnostics {
    double t = 0;
    double l2 = 0;
    double h1 = 0;
    double G1 = 0;
    double balance_residual = 0;  ///< finite-difference d/dt ||psi||^2 minus trapezoid-averaged 2 Re<psi, N>
    double dt = 0;
};

struct RunReport {
    StepStatus status = StepStatus::Completed;
    int steps = 0;
    int retries = 0;  ///< dt halvings triggered by the H1 cap
    double t_final = 0;
    double escape_time = std::numeric_limits<double>::quiet_NaN();
    std::vector<StepDiagnostics> diagnostics;
    std::string message;
};

struct EvolveResult {
    Trajectory trajectory;  ///< snapshots, always including t = 0 and the last reached time
    RunReport report;
};

/// Steps from 0 to T (the last step is shortened to land on T).
inline EvolveResult evolve(const Field& phi, const StepConfig& cfg)
{
    cfg.validate();
    if (!phi.all_finite())
        throw InvalidArgument("initial field contains non-finite values");
    const auto k2sq = wavenumber_squared(phi.spec());
    const KernelSpec full = cfg.kspec.as_full();
    auto N = [&](const Field& f) {
        return cfg.params.alpha2 == 0 ? Field(f.spec()) : nonlinear_term(f, cfg.params, cfg.kspec);
    };

    EvolveResult res;
    auto& rep = res.report;
    auto& traj = res.trajectory;

    Field psi = phi;
    double t = 0;
    Field k1 = N(psi);
    double l2sq = std::pow(l2_norm(psi), 2);
    double rate = balance_rate(psi, k1);
    const double h1_0 = h1_norm(psi);
    rep.diagnostics.push_back({0.0, std::sqrt(l2sq), h1_0, big_g1(psi, full), 0.0, 0.0});
    traj.times.push_back(0.0);
    traj.fields.push_back(psi);
    if (h1_0 > cfg.h1_cap) {
        rep.status = StepStatus::BlowupSuspected;
        rep.escape_time = 0.0;
        rep.message = "initial H1 norm exceeds h1_cap";
        fill_diagnostics(traj, full.R);
        return res;
    }

    double dt = cfg.dt;
    // Relative slack so accumulated round-off in t does not add a sliver step.
    const double t_eps = 1e-12 * cfg.T;
    while (t < cfg.T - t_eps) {
        const double step = std::min(dt, cfg.T - t);
        Field next(psi.spec());
        try {
            next = detail::ifrk4_step_from(psi, k1, step, cfg, k2sq);
        } catch (const DivergenceDetected& e) {
            rep.status = StepStatus::DivergenceDetected;
            rep.message = e.what();
            break;
        }
        const double h1 = h1_norm(next);
        if (h1 > cfg.h1_cap) {
            dt = 0.5 * step;
            ++rep.retries;
            if (dt < cfg.dt_min) {
                rep.status = StepStatus::BlowupSuspected;
                rep.escape_time = t + step;
                rep.message = "H1 norm exceeds h1_cap with dt below dt_min";
                break;
            }
            continue;
        }
        const Field k1_next = N(next);
        const double l2sq_next = std::pow(l2_norm(next), 2);
        const double rate_next = balance_rate(next, k1_next);
        const double residual = (l2sq_next - l2sq) / step - 0.5 * (rate + rate_next);
        t = (cfg.T - (t + step) <= t_eps) ? cfg.T : t + step;
        psi = next;
        k1 = k1_next;
        l2sq = l2sq_next;
        rate = rate_next;
        ++rep.steps;
        rep.diagnostics.push_back({t, std::sqrt(l2sq), h1, big_g1(psi, full), residual, step});
        if (cfg.snapshot_every > 0 && rep.steps % cfg.snapshot_every == 0) {
            traj.times.push_back(t);
            traj.fields.push_back(psi);
        }
    }
    rep.t_final = t;
    if (traj.times.back() != t) {
        traj.times.push_back(t);
        traj.fields.push_back(psi);
    }
    fill_diagnostics(traj, full.R);
    return res;
}

} // namespace frnse
