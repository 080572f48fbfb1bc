#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "morseflow/errors.hpp"
#include "morseflow/grid.hpp"
#include "morseflow/nonlinearity.hpp"
#include "morseflow/timemap.hpp"

namespace morseflow {

enum class ProfileKind { plus, minus, zero };

inline const char *profile_kind_name(ProfileKind k) {
    switch (k) {
    case ProfileKind::plus: return "plus";
    case ProfileKind::minus: return "minus";
    case ProfileKind::zero: return "zero";
    }
    return "?";
}

/// A sampled stationary solution of u'' + f(u) = 0 with Dirichlet ends.
struct EquilibriumProfile {
    int interior_points = 0;
    double dx = 0.0;
    std::vector<double> values; // N+2 entries, boundaries exactly 0
    int branch_n = 0;
    ProfileKind branch_kind = ProfileKind::zero;
    double energy = 0.0; // E = u'(0)^2 / 2
    int zeros = 0;       // zeros in [0,1]; 0 for the identically-zero profile
    double l2 = 0.0;
    double h10 = 0.0;
    double hamiltonian_drift = 0.0; // max |u'^2/2 + F(u) - E| along the shoot
    double boundary_residual = 0.0; // |u(1)| before the endpoint is clamped
};

inline constexpr double shoot_bc_tol = 1e-6;
inline constexpr double zero_snap_tol = 1e-12;

namespace detail {

/// Interior zeros: sign changes between consecutive snapped values, with a
/// run of snapped-to-zero samples counting once.
inline int count_interior_zeros(const std::vector<double> &v) {
    int zeros = 0;
    int last_sign = 0;
    bool in_zero_run = false;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        const double x = std::abs(v[i]) <= zero_snap_tol ? 0.0 : v[i];
        const int s = x > 0.0 ? 1 : (x < 0.0 ? -1 : 0);
        if (s == 0) {
            if (!in_zero_run) {
                ++zeros;
                in_zero_run = true;
            }
            continue;
        }
        if (last_sign != 0 && s != last_sign && !in_zero_run)
            ++zeros;
        last_sign = s;
        in_zero_run = false;
    }
    return zeros;
}

struct ShootOutcome {
    std::vector<double> values;
    double end_value = 0.0;
    double drift = 0.0;
};

/// Classical RK4 on u'' = -f(u) from x=0 with u(0)=0, u'(0)=v0, sampled on
/// the grid; 16 substeps per cell.
inline ShootOutcome shoot_once(const NonlinearityModel &m, double v0, int N, double E) {
    const double dx = grid_dx(N);
    const int substeps = 16;
    const double h = dx / substeps;
    ShootOutcome out;
    out.values.assign(static_cast<std::size_t>(N) + 2, 0.0);
    double u = 0.0, w = v0;
    for (int cell = 0; cell <= N; ++cell) {
        for (int s = 0; s < substeps; ++s) {
            const double k1u = w, k1w = -eval_f(m, u);
            const double k2u = w + 0.5 * h * k1w, k2w = -eval_f(m, u + 0.5 * h * k1u);
            const double k3u = w + 0.5 * h * k2w, k3w = -eval_f(m, u + 0.5 * h * k2u);
            const double k4u = w + h * k3w, k4w = -eval_f(m, u + h * k3u);
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
            out.drift = std::max(out.drift, std::abs(0.5 * w * w + eval_potential(m, u) - E));
        }
        out.values[static_cast<std::size_t>(cell) + 1] = u;
    }
    out.end_value = u;
    return out;
}

inline void finish_profile(EquilibriumProfile &p) {
    p.values.front() = 0.0;
    p.values.back() = 0.0;
    p.zeros = 2 + count_interior_zeros(p.values);
    p.l2 = l2_norm(p.values, p.dx);
    p.h10 = h10_norm(p.values, p.dx);
}

} // namespace detail

inline EquilibriumProfile zero_profile(int N) {
    EquilibriumProfile p;
    p.interior_points = N;
    p.dx = grid_dx(N);
    p.values.assign(static_cast<std::size_t>(N) + 2, 0.0);
    p.branch_n = 0;
    p.branch_kind = ProfileKind::zero;
    return p;
}

/// Integrates the stationary equation from the branch energy and samples it
/// onto the grid. u'(0) = +sqrt(2E) for a plus profile, -sqrt(2E) for minus;
/// even branches carry both profiles, so the sign must be passed explicitly.
/// Checks |u(1)| <= 1e-6 (after at most one Newton correction of E through
/// the shooting sensitivity) and the n+1 zero count.
inline EquilibriumProfile shoot_profile(const NonlinearityModel &m, const BranchSolution &branch,
                                        int N, std::optional<ProfileKind> sign = {}) {
    if (N < 255)
        throw std::domain_error("shoot_profile: N must be >= 255");
    ProfileKind kind;
    if (sign.has_value()) {
        if (*sign == ProfileKind::zero)
            throw std::domain_error("shoot_profile: explicit sign must be plus or minus");
        kind = *sign;
    } else {
        switch (branch.kind) {
        case BranchKind::plus: kind = ProfileKind::plus; break;
        case BranchKind::minus: kind = ProfileKind::minus; break;
        default:
            throw std::domain_error("shoot_profile: even branch needs an explicit profile sign");
        }
    }

    if (branch.n == 0 || branch.E_value == 0.0) {
        EquilibriumProfile p = zero_profile(N);
        p.branch_n = branch.n;
        p.branch_kind = branch.n == 0 ? ProfileKind::zero : kind;
        return p;
    }

    double E = branch.E_value;
    const double dir = kind == ProfileKind::plus ? 1.0 : -1.0;
    auto run = [&](double energy) {
        return detail::shoot_once(m, dir * std::sqrt(2.0 * energy), N, energy);
    };

    detail::ShootOutcome out = run(E);
    if (std::abs(out.end_value) > shoot_bc_tol) {
        // one Newton correction on E against the finite-difference sensitivity
        const double dE = std::max(1e-9, 1e-6 * E);
        const detail::ShootOutcome bumped = run(E + dE);
        const double sens = (bumped.end_value - out.end_value) / dE;
        if (sens != 0.0 && std::isfinite(sens)) {
            const double corrected = E - out.end_value / sens;
            if (corrected > 0.0) {
                E = corrected;
                out = run(E);
            }
        }
        if (std::abs(out.end_value) > shoot_bc_tol) {
            std::ostringstream os;
            os << "shoot_profile: |u(1)| = " << std::abs(out.end_value)
               << " exceeds bc_tol; branch energy looks inaccurate";
            throw numerical_error(os.str(), out.end_value);
        }
    }

    EquilibriumProfile p;
    p.interior_points = N;
    p.dx = grid_dx(N);
    p.values = std::move(out.values);
    p.branch_n = branch.n;
    p.branch_kind = kind;
    p.energy = E;
    p.hamiltonian_drift = out.drift;
    p.boundary_residual = std::abs(out.end_value);
    detail::finish_profile(p);

    if (p.zeros != branch.n + 1) {
        std::ostringstream os;
        os << "shoot_profile: expected " << branch.n + 1 << " zeros, found " << p.zeros;
        throw structural_error(os.str());
    }
    for (double v : p.values)
        if (!(v > m.a_minus && v < m.a_plus))
            throw structural_error("shoot_profile: profile leaves (a-, a+)");
    return p;
}

/// Stationary solution of the Heaviside differential inclusion with n+1
/// equally spaced zeros: per arch [q/n,(q+1)/n] the parabola
/// sigma_q (x - q/n)((q+1)/n - x)/2 solving u'' = -sigma_q, with alternating
/// sigma_q starting at +1 (plus) or -1 (minus).
inline EquilibriumProfile limit_profile(int n, ProfileKind kind, int N) {
    if (n < 1)
        throw std::domain_error("limit_profile: n must be >= 1");
    if (kind == ProfileKind::zero)
        throw std::domain_error("limit_profile: kind must be plus or minus");
    EquilibriumProfile p;
    p.interior_points = N;
    p.dx = grid_dx(N);
    p.values.assign(static_cast<std::size_t>(N) + 2, 0.0);
    const double first = kind == ProfileKind::plus ? 1.0 : -1.0;
    for (int i = 1; i <= N; ++i) {
        const double x = i * p.dx;
        int q = static_cast<int>(std::floor(x * n));
        q = std::min(q, n - 1);
        const double a = static_cast<double>(q) / n;
        const double b = static_cast<double>(q + 1) / n;
        const double sigma = (q % 2 == 0) ? first : -first;
        p.values[static_cast<std::size_t>(i)] = sigma * (x - a) * (b - x) * 0.5;
    }
    p.branch_n = n;
    p.branch_kind = kind;
    p.energy = 1.0 / (8.0 * static_cast<double>(n) * n); // u'(0) = 1/(2n)
    detail::finish_profile(p);
    p.zeros = n + 1; // analytic zero set; touching arches never double-count
    return p;
}

struct ConvergenceRow {
    double eps = 0.0;
    double dist_l2 = 0.0;
    double dist_h10 = 0.0;
    double dist_h10_to_zero = 0.0; // H^1_0 distance to the zero profile
};

struct ConvergenceSweep {
    std::vector<ConvergenceRow> rows;
    bool final_ok = false; // last H^1_0 distance below conv_tol
    bool trend_ok = false; // no step increases the distance by more than trend_slack
    double conv_tol = 0.0;
    double trend_slack = 0.0;
};

inline constexpr int default_sweep_grid = 1023;

/// Distances between the shot f_eps equilibrium and the inclusion limit, per
/// eps. Every eps must admit the branch (1/eps^2 > n^2 pi^2), otherwise the
/// offending eps is reported in the error.
inline ConvergenceSweep convergence_sweep(const std::vector<double> &eps_list, int n,
                                          ProfileKind kind, int N = default_sweep_grid,
                                          double conv_tol = 0.05, double trend_slack = 0.0,
                                          int jobs = 1) {
    if (kind == ProfileKind::zero)
        throw std::domain_error("convergence_sweep: kind must be plus or minus");
    for (double eps : eps_list) {
        const double slope = 1.0 / (eps * eps);
        if (!(slope > static_cast<double>(n) * n * pi_const * pi_const)) {
            std::ostringstream os;
            os << "convergence_sweep: eps = " << eps << " gives f'(0) = " << slope
               << " <= n^2 pi^2, branch " << n << " does not exist";
            throw std::domain_error(os.str());
        }
    }
    const EquilibriumProfile limit = limit_profile(n, kind, N);
    const BranchKind bk = (n % 2 == 1)
                              ? (kind == ProfileKind::plus ? BranchKind::plus : BranchKind::minus)
                              : BranchKind::even;

    ConvergenceSweep sweep;
    sweep.conv_tol = conv_tol;
    sweep.trend_slack = trend_slack;
    sweep.rows.assign(eps_list.size(), {});
    parallel_for_index(eps_list.size(), jobs, [&](std::size_t i) {
        const double eps = eps_list[i];
        const NonlinearityModel model = NonlinearityModel::heaviside(eps);
        const auto branch = solve_branch(model, n, bk);
        if (!branch)
            throw std::domain_error("convergence_sweep: branch vanished unexpectedly");
        const EquilibriumProfile prof = shoot_profile(model, *branch, N, kind);
        ConvergenceRow row;
        row.eps = eps;
        row.dist_l2 = l2_distance(prof.values, limit.values, prof.dx);
        row.dist_h10 = h10_distance(prof.values, limit.values, prof.dx);
        row.dist_h10_to_zero = prof.h10;
        sweep.rows[i] = row;
    });

    sweep.final_ok = !sweep.rows.empty() && sweep.rows.back().dist_h10 < conv_tol;
    sweep.trend_ok = true;
    for (std::size_t i = 0; i + 1 < sweep.rows.size(); ++i)
        if (sweep.rows[i + 1].dist_h10 > sweep.rows[i].dist_h10 + trend_slack)
            sweep.trend_ok = false;
    return sweep;
}

} // namespace morseflow
