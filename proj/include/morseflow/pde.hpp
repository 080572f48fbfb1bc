#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "morseflow/equilibria.hpp"
#include "morseflow/errors.hpp"
#include "morseflow/grid.hpp"
#include "morseflow/nonlinearity.hpp"

namespace morseflow {

/// A spatial grid function on (0,1) with homogeneous Dirichlet conditions,
/// advanced in time by the IMEX integrator below.
struct FieldState {
    int interior_points = 0;
    double dx = 0.0;
    std::vector<double> values; // N+2 entries, boundaries exactly 0
    double time = 0.0;
};

inline FieldState make_field(int N) {
    FieldState s;
    s.interior_points = N;
    s.dx = grid_dx(N);
    s.values.assign(static_cast<std::size_t>(N) + 2, 0.0);
    return s;
}

inline FieldState field_from_values(std::vector<double> values) {
    if (values.size() < 3)
        throw std::domain_error("field_from_values: need at least one interior point");
    FieldState s;
    s.interior_points = static_cast<int>(values.size()) - 2;
    s.dx = grid_dx(s.interior_points);
    s.values = std::move(values);
    s.values.front() = 0.0;
    s.values.back() = 0.0;
    return s;
}

inline FieldState field_from_profile(const EquilibriumProfile &p) {
    FieldState s;
    s.interior_points = p.interior_points;
    s.dx = p.dx;
    s.values = p.values;
    return s;
}

/// Stability ceiling for the explicit reaction part: 0.25 eps^2 for the
/// Heaviside family (Lipschitz constant 1/eps^2), 0.25/lambda otherwise.
inline double dt_max(const NonlinearityModel &m) {
    if (m.kind == ModelKind::heaviside_approx)
        return 0.25 * m.eps * m.eps;
    if (m.lambda > 0.0)
        return 0.25 / m.lambda;
    return std::numeric_limits<double>::infinity();
}

namespace detail {

/// One IMEX Euler step in place: solve (I - dt L) u_new = u + dt f(u) with
/// the 3-point Dirichlet Laplacian, by the tridiagonal forward-elimination /
/// back-substitution sweep.
inline void step_inplace(const NonlinearityModel &m, FieldState &s, double dt,
                         std::vector<double> &cp, std::vector<double> &dp) {
    const int N = s.interior_points;
    const double r = dt / (s.dx * s.dx);
    const double diag = 1.0 + 2.0 * r;
    cp.resize(static_cast<std::size_t>(N) + 1);
    dp.resize(static_cast<std::size_t>(N) + 1);

    double denom = diag;
    cp[1] = -r / denom;
    dp[1] = (s.values[1] + dt * eval_f(m, s.values[1])) / denom;
    for (int i = 2; i <= N; ++i) {
        denom = diag + r * cp[static_cast<std::size_t>(i) - 1];
        cp[static_cast<std::size_t>(i)] = -r / denom;
        const double rhs = s.values[static_cast<std::size_t>(i)] +
                           dt * eval_f(m, s.values[static_cast<std::size_t>(i)]);
        dp[static_cast<std::size_t>(i)] = (rhs + r * dp[static_cast<std::size_t>(i) - 1]) / denom;
    }
    s.values[static_cast<std::size_t>(N)] = dp[static_cast<std::size_t>(N)];
    for (int i = N - 1; i >= 1; --i)
        s.values[static_cast<std::size_t>(i)] =
            dp[static_cast<std::size_t>(i)] -
            cp[static_cast<std::size_t>(i)] * s.values[static_cast<std::size_t>(i) + 1];
    s.time += dt;

    for (int i = 1; i <= N; ++i)
        if (!std::isfinite(s.values[static_cast<std::size_t>(i)]))
            throw numerical_error("step: non-finite field value (blow-up)", s.time);
}

} // namespace detail

inline FieldState step(const NonlinearityModel &m, const FieldState &state, double dt) {
    if (!(dt > 0.0) || dt > dt_max(m) * (1.0 + 1e-9))
        throw std::domain_error("step: dt must be in (0, dt_max]");
    FieldState next = state;
    std::vector<double> cp, dp;
    detail::step_inplace(m, next, dt, cp, dp);
    return next;
}

/// V(u) = (1/2) |u|_{H^1_0}^2 - int F(u). Nonincreasing along trajectories.
inline double lyapunov(const NonlinearityModel &m, const FieldState &s) {
    const double g = h10_norm(s.values, s.dx);
    double pot = 0.0;
    for (std::size_t i = 1; i + 1 < s.values.size(); ++i)
        pot += eval_potential(m, s.values[i]);
    return 0.5 * g * g - s.dx * pot;
}

inline double lyapunov_of_values(const NonlinearityModel &m, const std::vector<double> &values,
                                 double dx) {
    FieldState s;
    s.interior_points = static_cast<int>(values.size()) - 2;
    s.dx = dx;
    s.values = values;
    return lyapunov(m, s);
}

/// Per-step Lyapunov slack.
inline double lyapunov_slack(double V) { return 1e-8 * (1.0 + std::abs(V)); }

struct Snapshot {
    double time = 0.0;
    double l2 = 0.0;
    double h10 = 0.0;
    double lyapunov = 0.0;
    std::vector<double> dist_to_equilibria; // L2, aligned with the input list
};

struct CaptureOptions {
    double dt = 0.0;             // 0 -> dt_max(model)
    double capture_tol = 1e-3;   // L2 capture radius
    double t_dwell = 1.0;        // confirmation delay against saddle transits
    double t_max = 50.0;
    double snapshot_every = 0.0; // 0 -> max(dt, t_max/1000)
    bool lyapunov_every_step = false;
};

struct TrajectoryRecord {
    std::vector<Snapshot> snapshots;
    std::optional<std::size_t> captured; // index into the equilibria list
    double capture_time = -1.0;          // first time inside the capture ball
    double confirm_time = -1.0;          // capture_time + t_dwell
    bool timed_out = false;

    long per_step_lyapunov_checks = 0;
    long lyapunov_violations = 0;
    double max_lyapunov_violation = 0.0;
    bool snapshot_lyapunov_ok = true;

    // realized witnesses for the a-priori estimates
    double absorbing_K = 0.0;       // 0.5 sup (2 int|u| - |u|_{H10}^2)_+ + 1
    double est_slack = 0.0;         // 1e-6 (1 + |u0|^2)
    bool absorbing_ok = true;       // L2 bound holds at every snapshot
    double max_absorbing_violation = 0.0;
    double sup_reaction_l2sq = 0.0; // sup int f(u)^2, smoothing-bound witness
};

/// Steps the field until it sits within capture_tol (in L2) of one listed
/// equilibrium and is still there after t_dwell, or until t_max. A timeout
/// is a result, not an error.
inline TrajectoryRecord integrate_until_capture(const NonlinearityModel &m, FieldState state,
                                                const std::vector<EquilibriumProfile> &equilibria,
                                                const CaptureOptions &opts = {}) {
    if (equilibria.empty())
        throw std::domain_error("integrate_until_capture: equilibria list is empty");
    for (const auto &eq : equilibria)
        if (eq.interior_points != state.interior_points)
            throw std::domain_error("integrate_until_capture: grid mismatch with equilibrium");
    if (!(opts.capture_tol > 0.0))
        throw std::domain_error("integrate_until_capture: capture_tol must be positive");

    const double dt = opts.dt > 0.0 ? opts.dt : dt_max(m);
    if (!(dt > 0.0) || dt > dt_max(m) * (1.0 + 1e-9))
        throw std::domain_error("integrate_until_capture: dt must be in (0, dt_max]");
    const double snap_every =
        opts.snapshot_every > 0.0 ? opts.snapshot_every : std::max(dt, opts.t_max / 1000.0);

    TrajectoryRecord rec;
    const double t0 = state.time;
    const double l2_0 = l2_norm(state.values, state.dx);
    rec.est_slack = 1e-6 * (1.0 + l2_0 * l2_0);

    std::vector<double> cp, dp;
    std::vector<double> dist(equilibria.size(), 0.0);
    double sup_absorb_term = 0.0;

    const auto distances = [&](const FieldState &s) {
        for (std::size_t k = 0; k < equilibria.size(); ++k)
            dist[k] = l2_distance(s.values, equilibria[k].values, s.dx);
    };
    const auto take_snapshot = [&](const FieldState &s) {
        Snapshot snap;
        snap.time = s.time;
        snap.l2 = l2_norm(s.values, s.dx);
        snap.h10 = h10_norm(s.values, s.dx);
        snap.lyapunov = lyapunov(m, s);
        distances(s);
        snap.dist_to_equilibria = dist;
        double abs_int = 0.0, fsq = 0.0;
        for (std::size_t i = 1; i + 1 < s.values.size(); ++i) {
            abs_int += std::abs(s.values[i]);
            const double fv = eval_f(m, s.values[i]);
            fsq += fv * fv;
        }
        abs_int *= s.dx;
        fsq *= s.dx;
        sup_absorb_term = std::max(sup_absorb_term, 2.0 * abs_int - snap.h10 * snap.h10);
        rec.sup_reaction_l2sq = std::max(rec.sup_reaction_l2sq, fsq);
        rec.snapshots.push_back(std::move(snap));
    };

    take_snapshot(state);
    double next_snap = t0 + snap_every;

    bool has_pending = false;
    std::size_t pending_idx = 0;
    double pending_since = 0.0;
    double V_prev = opts.lyapunov_every_step ? rec.snapshots.front().lyapunov : 0.0;

    while (state.time < t0 + opts.t_max - 1e-12 && !rec.captured) {
        detail::step_inplace(m, state, dt, cp, dp);

        if (opts.lyapunov_every_step) {
            const double V = lyapunov(m, state);
            ++rec.per_step_lyapunov_checks;
            const double excess = V - V_prev - lyapunov_slack(V_prev);
            if (excess > 0.0) {
                ++rec.lyapunov_violations;
                rec.max_lyapunov_violation = std::max(rec.max_lyapunov_violation, excess);
            }
            V_prev = V;
        }

        distances(state);
        if (has_pending && state.time - pending_since >= opts.t_dwell - 1e-12) {
            if (dist[pending_idx] < opts.capture_tol) {
                rec.captured = pending_idx;
                rec.capture_time = pending_since;
                rec.confirm_time = state.time;
            } else {
                has_pending = false;
            }
        }
        if (!has_pending && !rec.captured) {
            std::size_t best = 0;
            for (std::size_t k = 1; k < dist.size(); ++k)
                if (dist[k] < dist[best])
                    best = k;
            if (dist[best] < opts.capture_tol) {
                has_pending = true;
                pending_idx = best;
                pending_since = state.time;
            }
        }

        if (state.time >= next_snap - 1e-12 || rec.captured ||
            state.time >= t0 + opts.t_max - 1e-12) {
            take_snapshot(state);
            next_snap += snap_every;
        }
    }
    rec.timed_out = !rec.captured.has_value();

    // absorbing-bound witness K, fixed from the whole run before checking
    rec.absorbing_K = 0.5 * std::max(sup_absorb_term, 0.0) + 1.0;
    const double lambda1 = pi_const * pi_const;
    for (const Snapshot &s : rec.snapshots) {
        const double bound = std::exp(-lambda1 * (s.time - t0)) * l2_0 * l2_0 +
                             rec.absorbing_K / lambda1 + rec.est_slack;
        const double excess = s.l2 * s.l2 - bound;
        if (excess > 0.0) {
            rec.absorbing_ok = false;
            rec.max_absorbing_violation = std::max(rec.max_absorbing_violation, excess);
        }
    }

    // snapshot-level Lyapunov monotonicity with per-step slack accumulated
    // over the steps between snapshots
    for (std::size_t i = 0; i + 1 < rec.snapshots.size(); ++i) {
        const double V0 = rec.snapshots[i].lyapunov;
        const double V1 = rec.snapshots[i + 1].lyapunov;
        const double steps =
            std::max(1.0, std::ceil((rec.snapshots[i + 1].time - rec.snapshots[i].time) / dt));
        if (V1 > V0 + steps * lyapunov_slack(V0))
            rec.snapshot_lyapunov_ok = false;
    }
    return rec;
}

/// Deterministic smooth random field: amp * sum_{k=1..8} (c_k / k) sin(k pi x)
/// with c_k uniform in [-1,1] drawn from the seeded generator.
inline FieldState random_field(int N, unsigned long seed, double amp) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    FieldState s = make_field(N);
    for (int k = 1; k <= 8; ++k) {
        const double c = uni(rng) / k;
        for (int i = 1; i <= N; ++i)
            s.values[static_cast<std::size_t>(i)] +=
                amp * c * std::sin(k * pi_const * i * s.dx);
    }
    return s;
}

} // namespace morseflow
