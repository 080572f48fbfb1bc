#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "morseflow/errors.hpp"
#include "morseflow/nonlinearity.hpp"

namespace morseflow {

inline constexpr double pi_const = 3.14159265358979323846;

enum class Sign { plus, minus };

struct TauOptions {
    double rel_tol = 1e-9;
    int initial_panels = 32;
    int max_doublings = 20;
    double theta_cutoff = 1e-4; // below this the integrand uses its analytic limit
};

struct TauResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int panels = 0;
};

/// One row of the time-map CSV.
struct TimeMapSample {
    double E = 0.0;
    double tau_plus = 0.0;
    double tau_minus = 0.0;
    double quad_error_estimate = 0.0;
};

/// Exact limit of tau at E -> 0+: pi / sqrt(2 f'(0)). No quadrature involved.
inline double tau_limit_at_zero(const NonlinearityModel &m) {
    if (!(m.slope_at_zero > 0.0) || !std::isfinite(m.slope_at_zero))
        throw std::domain_error("tau_limit_at_zero: needs finite positive f'(0)");
    return pi_const / std::sqrt(2.0 * m.slope_at_zero);
}

/// Half-arch x-length of the energy-E solution of u'' + f(u) = 0.
///
/// Written in the desingularized form obtained from E y^2 = F(u), y = sin t:
///     tau_plus(E) = 2 sqrt(E) * int_0^{pi/2} sin t / f(U+(E sin^2 t)) dt,
/// integrated by composite Simpson with panel doubling until two successive
/// estimates agree to rel_tol. Near t = 0 the quotient degenerates to 0/0;
/// below theta_cutoff the integrand is replaced by its analytic limit
/// 1/sqrt(2 E f'(0)), which comes from F(u) ~ f'(0) u^2 / 2.
inline TauResult tau(const NonlinearityModel &m, Sign sign, double E, const TauOptions &opts = {}) {
    if (!(m.slope_at_zero > 0.0) || !std::isfinite(m.slope_at_zero))
        throw std::domain_error("tau: model needs finite positive f'(0)");
    const double E_limit = sign == Sign::plus ? m.E_plus : m.E_minus;
    if (!(E > 0.0) || !std::isfinite(E) || E >= E_limit || E > potential_energy_cap)
        throw std::domain_error("tau: E outside (0, E_limit)");

    const double limit_value = 1.0 / std::sqrt(2.0 * E * m.slope_at_zero);
    const auto integrand = [&](double theta) -> double {
        if (theta < opts.theta_cutoff)
            return limit_value;
        const double y = std::sin(theta);
        const double Ey2 = E * y * y;
        const double u = sign == Sign::plus ? invert_potential_plus(m, Ey2)
                                            : invert_potential_minus(m, Ey2);
        const double fu = eval_f(m, u);
        return y / std::abs(fu);
    };

    const double a = 0.0, b = 0.5 * pi_const;
    int panels = std::max(2, opts.initial_panels);
    std::vector<double> vals(static_cast<std::size_t>(panels) + 1);
    for (int j = 0; j <= panels; ++j)
        vals[static_cast<std::size_t>(j)] = integrand(a + j * (b - a) / panels);
    const auto simpson = [&]() -> double {
        double acc = vals.front() + vals.back();
        for (int j = 1; j < panels; ++j)
            acc += (j % 2 == 1 ? 4.0 : 2.0) * vals[static_cast<std::size_t>(j)];
        return 2.0 * std::sqrt(E) * acc * (b - a) / (3.0 * panels);
    };

    double prev = simpson();
    for (int d = 0; d < opts.max_doublings; ++d) {
        std::vector<double> refined(2 * static_cast<std::size_t>(panels) + 1);
        const double h = (b - a) / (2 * panels);
        for (int j = 0; j <= panels; ++j)
            refined[2 * static_cast<std::size_t>(j)] = vals[static_cast<std::size_t>(j)];
        for (int j = 0; j < panels; ++j)
            refined[2 * static_cast<std::size_t>(j) + 1] = integrand(a + (2 * j + 1) * h);
        vals = std::move(refined);
        panels *= 2;
        const double cur = simpson();
        const double err = std::abs(cur - prev);
        if (err <= opts.rel_tol * std::max(std::abs(cur), 1e-12))
            return {cur, err, panels};
        prev = cur;
    }
    throw numerical_error("tau: quadrature did not converge within max doublings", prev);
}

inline TimeMapSample sample_time_map(const NonlinearityModel &m, double E,
                                     const TauOptions &opts = {}) {
    const TauResult p = tau(m, Sign::plus, E, opts);
    const TauResult q = tau(m, Sign::minus, E, opts);
    return {E, p.value, q.value, std::max(p.error_estimate, q.error_estimate)};
}

struct MonotoneReport {
    bool monotone = true;
    // index i of the first pair (E_i, E_{i+1}) violating strict increase
    std::optional<std::size_t> first_violation;
    std::vector<TauResult> samples;
};

/// Strict increase of tau along an increasing energy grid, with the
/// quadrature error estimates of both neighbours as the comparison margin.
inline MonotoneReport check_monotone(const NonlinearityModel &m, Sign sign,
                                     const std::vector<double> &E_grid,
                                     const TauOptions &opts = {}) {
    for (std::size_t i = 0; i + 1 < E_grid.size(); ++i)
        if (!(E_grid[i] < E_grid[i + 1]))
            throw std::domain_error("check_monotone: grid must be strictly increasing");
    MonotoneReport rep;
    rep.samples.reserve(E_grid.size());
    for (double E : E_grid)
        rep.samples.push_back(tau(m, sign, E, opts));
    for (std::size_t i = 0; i + 1 < rep.samples.size(); ++i) {
        const double margin = rep.samples[i].error_estimate + rep.samples[i + 1].error_estimate;
        if (!(rep.samples[i].value < rep.samples[i + 1].value - margin)) {
            rep.monotone = false;
            rep.first_violation = i;
            break;
        }
    }
    return rep;
}

enum class BranchKind { plus, minus, even };

inline const char *branch_kind_name(BranchKind k) {
    switch (k) {
    case BranchKind::plus: return "plus";
    case BranchKind::minus: return "minus";
    case BranchKind::even: return "even";
    }
    return "?";
}

struct BranchSolution {
    int n = 0;
    BranchKind kind = BranchKind::plus;
    double E_value = 0.0;
    double residual = 0.0; // h(E_value) - 1/sqrt(2)
};

inline constexpr double branch_root_tol = 1e-10;

namespace detail {

struct BranchEquation {
    int weight_plus = 0;
    int weight_minus = 0;

    static BranchEquation make(int n, BranchKind kind) {
        if (n < 1)
            throw std::domain_error("solve_branch: n must be >= 1");
        if (n % 2 == 1) {
            const int k = (n + 1) / 2;
            if (kind == BranchKind::plus)
                return {k, k - 1};
            if (kind == BranchKind::minus)
                return {k - 1, k};
            throw std::domain_error("solve_branch: odd n requires kind plus or minus");
        }
        if (kind != BranchKind::even)
            throw std::domain_error("solve_branch: even n requires kind even");
        const int k = n / 2;
        return {k, k};
    }
};

} // namespace detail

/// Solves the branch equation h(E) = 1/sqrt(2) for the energy of the n-th
/// equilibrium pair, where h combines k tau_+ and (k-1) tau_- (odd n) or
/// k (tau_+ + tau_-) (even n). Returns nothing when f'(0) < n^2 pi^2, hits
/// E = 0 exactly at equality, and otherwise brackets the unique root using
/// h's known limits: h -> n pi / sqrt(2 f'(0)) < 1/sqrt(2) at E -> 0+ and
/// h -> infinity at the domain edge.
inline std::optional<BranchSolution> solve_branch(const NonlinearityModel &m, int n,
                                                  BranchKind kind) {
    const auto eq = detail::BranchEquation::make(n, kind);
    if (!(m.slope_at_zero > 0.0) || !std::isfinite(m.slope_at_zero))
        throw std::domain_error("solve_branch: model needs finite positive f'(0)");
    const double lambda_n = static_cast<double>(n) * n * pi_const * pi_const;
    const double slope = m.slope_at_zero;
    if (slope < lambda_n * (1.0 - 1e-12))
        return std::nullopt;
    if (slope <= lambda_n * (1.0 + 1e-12))
        return BranchSolution{n, kind, 0.0, 0.0};

    TauOptions tight;
    tight.rel_tol = 1e-12;
    tight.max_doublings = 24;
    const auto h = [&](double E) -> double {
        double v = 0.0;
        if (eq.weight_plus > 0)
            v += eq.weight_plus * tau(m, Sign::plus, E, tight).value;
        if (eq.weight_minus > 0)
            v += eq.weight_minus * tau(m, Sign::minus, E, tight).value;
        return v;
    };
    const double target = 1.0 / std::sqrt(2.0);

    double E_sup = potential_energy_cap;
    if (eq.weight_plus > 0)
        E_sup = std::min(E_sup, m.E_plus);
    if (eq.weight_minus > 0)
        E_sup = std::min(E_sup, m.E_minus);

    double lo = std::min(1e-8, E_sup / 4.0);
    double h_lo = h(lo);
    int guard = 0;
    while (h_lo >= target) {
        lo *= 1e-4;
        if (lo < 1e-250 || ++guard > 80)
            throw numerical_error("solve_branch: no lower bracket above E = 0", lo);
        h_lo = h(lo);
    }

    double hi = std::max(2.0 * lo, 1e-6);
    double h_hi = h(hi);
    guard = 0;
    while (h_hi <= target) {
        hi = std::isfinite(E_sup) && E_sup < potential_energy_cap
                 ? hi + 0.5 * (E_sup - hi)
                 : hi * 2.0;
        if (hi > potential_energy_cap || ++guard > 2000)
            throw numerical_error("solve_branch: no bracket below the energy cap", hi);
        h_hi = h(hi);
    }

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = h(mid) - target;
        if (std::abs(r) <= branch_root_tol)
            return BranchSolution{n, kind, mid, r};
        if (r + target < h_lo - 1e-8 || r + target > h_hi + 1e-8)
            throw numerical_error("solve_branch: monotonicity violation during bisection", mid);
        if (r < 0.0) {
            lo = mid;
            h_lo = r + target;
        } else {
            hi = mid;
            h_hi = r + target;
        }
    }
    throw numerical_error("solve_branch: bisection did not reach root tolerance",
                          0.5 * (lo + hi));
}

/// 2n+1 fixed points, n the largest integer with n^2 pi^2 < f'(0).
inline int count_equilibria(const NonlinearityModel &m) {
    if (!(m.slope_at_zero >= 0.0) || !std::isfinite(m.slope_at_zero))
        throw std::domain_error("count_equilibria: needs finite nonnegative f'(0)");
    int n = static_cast<int>(std::floor(std::sqrt(m.slope_at_zero) / pi_const));
    while (static_cast<double>(n) * n * pi_const * pi_const >= m.slope_at_zero && n > 0)
        --n;
    while (static_cast<double>(n + 1) * (n + 1) * pi_const * pi_const < m.slope_at_zero)
        ++n;
    return 2 * n + 1;
}

/// Largest n with n^2 pi^2 < f'(0); 0 when only the zero equilibrium exists.
inline int max_branch_index(const NonlinearityModel &m) {
    return (count_equilibria(m) - 1) / 2;
}

} // namespace morseflow
