#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "morseflow/errors.hpp"

namespace morseflow {

enum class ModelKind { linear_oracle, saturating_concave, heaviside_approx };

/// A reaction term f together with the derived quantities used everywhere
/// else: the potential F(s) = int_0^s f, the slope f'(0), the sign-change
/// thresholds a-, a+ and the potential limits E-, E+.
///
/// Three built-in families:
///   linear_oracle       f(u) = lambda u          (quadrature oracle; not concave)
///   saturating_concave  f(u) = lambda u/(1+|u|)
///   heaviside_approx    f(u) = tanh(u/eps^2)
struct NonlinearityModel {
    ModelKind kind = ModelKind::saturating_concave;
    double lambda = 1.0; // slope parameter of the linear / saturating kinds
    double eps = 0.0;    // heaviside_approx parameter, in (0,1]

    double slope_at_zero = 1.0;
    double a_minus = -std::numeric_limits<double>::infinity();
    double a_plus = std::numeric_limits<double>::infinity();
    double E_minus = std::numeric_limits<double>::infinity();
    double E_plus = std::numeric_limits<double>::infinity();

    /// f(u) = lambda u. lambda = 0 is allowed as the pure heat-equation
    /// oracle; every time-map operation rejects it via slope_at_zero.
    static NonlinearityModel linear(double lambda) {
        if (!(lambda >= 0.0) || !std::isfinite(lambda))
            throw std::domain_error("linear model: lambda must be finite and >= 0");
        NonlinearityModel m;
        m.kind = ModelKind::linear_oracle;
        m.lambda = lambda;
        m.slope_at_zero = lambda;
        return m;
    }

    static NonlinearityModel saturating(double lambda) {
        if (!(lambda > 0.0) || !std::isfinite(lambda))
            throw std::domain_error("saturating model: lambda must be finite and > 0");
        NonlinearityModel m;
        m.kind = ModelKind::saturating_concave;
        m.lambda = lambda;
        m.slope_at_zero = lambda;
        return m;
    }

    static NonlinearityModel heaviside(double eps) {
        if (!(eps > 0.0 && eps <= 1.0))
            throw std::domain_error("heaviside model: eps must be in (0,1]");
        NonlinearityModel m;
        m.kind = ModelKind::heaviside_approx;
        m.eps = eps;
        m.slope_at_zero = 1.0 / (eps * eps);
        return m;
    }

    /// Spec string round-trip: "linear:lambda=2", "sat:lambda=50",
    /// "heaviside:eps=0.2".
    std::string spec_string() const {
        std::ostringstream os;
        switch (kind) {
        case ModelKind::linear_oracle: os << "linear:lambda=" << lambda; break;
        case ModelKind::saturating_concave: os << "sat:lambda=" << lambda; break;
        case ModelKind::heaviside_approx: os << "heaviside:eps=" << eps; break;
        }
        return os.str();
    }
};

inline NonlinearityModel parse_model_spec(const std::string &spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::domain_error("model spec: expected '<kind>:<param>=<value>' in '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    const auto eq = rest.find('=');
    if (eq == std::string::npos)
        throw std::domain_error("model spec: missing '=' in '" + spec + "'");
    const std::string param = rest.substr(0, eq);
    double value = 0.0;
    try {
        std::size_t used = 0;
        value = std::stod(rest.substr(eq + 1), &used);
        if (used != rest.size() - eq - 1)
            throw std::invalid_argument("trailing characters");
    } catch (const std::exception &) {
        throw std::domain_error("model spec: bad numeric value in '" + spec + "'");
    }
    if (kind == "linear" && param == "lambda")
        return NonlinearityModel::linear(value);
    if (kind == "sat" && param == "lambda")
        return NonlinearityModel::saturating(value);
    if (kind == "heaviside" && param == "eps")
        return NonlinearityModel::heaviside(value);
    throw std::domain_error("model spec: unknown kind/parameter in '" + spec + "'");
}

namespace detail {

/// log(cosh(z)) without overflow; series near zero to dodge the
/// cancellation in |z| + log1p(e^{-2|z|}) - log 2.
inline double log_cosh(double z) {
    const double az = std::abs(z);
    if (az < 1e-2) {
        const double z2 = az * az;
        return z2 * (0.5 + z2 * (-1.0 / 12.0 + z2 * (1.0 / 45.0)));
    }
    return az + std::log1p(std::exp(-2.0 * az)) - 0.6931471805599453094;
}

/// |s| - log1p(|s|), stable for tiny |s|.
inline double abs_minus_log1p(double s) {
    const double a = std::abs(s);
    if (a < 1e-5) {
        // a - log(1+a) = a^2/2 - a^3/3 + a^4/4 - a^5/5 + O(a^6)
        return a * a * (0.5 + a * (-1.0 / 3.0 + a * (0.25 - a / 5.0)));
    }
    return a - std::log1p(a);
}

} // namespace detail

inline double eval_f(const NonlinearityModel &m, double s) {
    if (!std::isfinite(s))
        throw std::domain_error("eval_f: non-finite argument");
    if (s == 0.0)
        return 0.0;
    switch (m.kind) {
    case ModelKind::linear_oracle:
        return m.lambda * s;
    case ModelKind::saturating_concave:
        return m.lambda * s / (1.0 + std::abs(s));
    case ModelKind::heaviside_approx:
        return std::tanh(s / (m.eps * m.eps));
    }
    return 0.0;
}

inline double eval_potential(const NonlinearityModel &m, double s) {
    if (!std::isfinite(s))
        throw std::domain_error("eval_potential: non-finite argument");
    if (s == 0.0)
        return 0.0;
    switch (m.kind) {
    case ModelKind::linear_oracle:
        return 0.5 * m.lambda * s * s;
    case ModelKind::saturating_concave:
        return m.lambda * detail::abs_minus_log1p(s);
    case ModelKind::heaviside_approx: {
        const double e2 = m.eps * m.eps;
        return e2 * detail::log_cosh(s / e2);
    }
    }
    return 0.0;
}

/// Numerical ceiling for potential inversion when E+/- is infinite.
inline constexpr double potential_energy_cap = 1e6;

/// Residual acceptance bound for the inversion: 1e-12 or 100 ulps of E.
inline double inversion_abs_tol(double E) {
    return std::max(1e-12, 100.0 * std::numeric_limits<double>::epsilon() * std::abs(E));
}

namespace detail {

inline double invert_potential_branch(const NonlinearityModel &m, double E, bool plus) {
    const double E_limit = plus ? m.E_plus : m.E_minus;
    if (!(E >= 0.0) || !std::isfinite(E) || E >= E_limit || E > potential_energy_cap)
        throw std::domain_error("invert_potential: E outside [0, E_limit)");
    if (E == 0.0)
        return 0.0;
    if (!(m.slope_at_zero > 0.0))
        throw std::domain_error("invert_potential: model has no increasing potential branch");

    const auto F = [&](double u) { return eval_potential(m, plus ? u : -u); };
    const auto dF = [&](double u) { return std::abs(eval_f(m, plus ? u : -u)); };

    // Bracket on the strictly monotone branch, then converge by bisection
    // steps safeguarded around Newton corrections. The contract only needs
    // |F(u)-E| <= inversion_abs_tol(E); driving the root to the rounding
    // floor keeps downstream quadratures clean at tiny E.
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (F(hi) < E) {
        hi *= 2.0;
        if (++guard > 1100)
            throw numerical_error("invert_potential: bracket expansion failed", hi);
    }
    double u = std::min(hi, std::sqrt(2.0 * E / m.slope_at_zero)); // exact in the F ~ f'(0)u^2/2 regime
    if (!(u > lo && u < hi))
        u = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double Fu = F(u);
        if (Fu < E)
            lo = u;
        else
            hi = u;
        const double g = dF(u);
        double next = g > 0.0 && std::isfinite(g) ? u - (Fu - E) / g : 0.5 * (lo + hi);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (next == u || next == lo || next == hi)
            break;
        u = next;
    }
    return plus ? u : -u;
}

} // namespace detail

/// U+(E): the unique u in [0, a+) with F(u) = E.
inline double invert_potential_plus(const NonlinearityModel &m, double E) {
    return detail::invert_potential_branch(m, E, true);
}

/// U-(E): the unique u in (a-, 0] with F(u) = E.
inline double invert_potential_minus(const NonlinearityModel &m, double E) {
    return detail::invert_potential_branch(m, E, false);
}

struct SamplingSpec {
    double inner_half_width = 2.0; // dense symmetric grid for local conditions
    int points = 4001;             // points on the dense grid (>= 1000)
    double outer_width = 1000.0;   // where the dissipation ratio is probed
};

struct ConditionCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ConditionReport {
    std::vector<ConditionCheck> checks;

    bool passed(const std::string &name) const {
        for (const auto &c : checks)
            if (c.name == name)
                return c.pass;
        return false;
    }
    /// (A1)-(A6) with the p=2 dissipation branch.
    bool base_ok() const {
        for (const char *n : {"A1", "A2", "A3", "A4", "A5", "A6b", "sign"})
            if (!passed(n))
                return false;
        return true;
    }
    /// (~A1)-(~A5), the approximating-family conditions.
    bool approx_ok() const {
        for (const char *n : {"~A1", "~A2", "~A3", "~A4", "~A5"})
            if (!passed(n))
                return false;
        return true;
    }
};

/// Samples the model and reports pass/fail per structural condition.
/// Failures are report entries, never exceptions.
inline ConditionReport validate_conditions(const NonlinearityModel &m,
                                           const SamplingSpec &spec = {}) {
    if (spec.points < 1000)
        throw std::domain_error("validate_conditions: need >= 1000 sample points");
    ConditionReport rep;
    auto add = [&rep](const std::string &name, bool pass, const std::string &detail) {
        rep.checks.push_back({name, pass, detail});
    };

    const int n = spec.points | 1; // odd, so 0 is a sample
    const double W = spec.inner_half_width;
    std::vector<double> s(static_cast<std::size_t>(n)), fs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        s[static_cast<std::size_t>(i)] = -W + 2.0 * W * i / (n - 1);
        fs[static_cast<std::size_t>(i)] = eval_f(m, s[static_cast<std::size_t>(i)]);
    }
    const double fscale = [&] {
        double v = 0.0;
        for (double x : fs)
            v = std::max(v, std::abs(x));
        return std::max(v, 1e-30);
    }();

    // A1: continuity probed as finiteness plus no sampled jumps beyond the
    // local slope scale.
    {
        bool ok = true;
        const double h = 2.0 * W / (n - 1);
        const double jump_cap = 10.0 * std::max(m.slope_at_zero, 1.0) * h + 1e-12;
        for (int i = 0; ok && i < n; ++i)
            ok = std::isfinite(fs[static_cast<std::size_t>(i)]);
        for (int i = 0; ok && i + 1 < n; ++i)
            ok = std::abs(fs[static_cast<std::size_t>(i + 1)] - fs[static_cast<std::size_t>(i)]) <= jump_cap;
        add("A1", ok, "finite values, no sampled jumps");
    }

    add("~A2", eval_f(m, 0.0) == 0.0, "f(0) == 0 exactly");
    add("A2", eval_f(m, 0.0) == 0.0, "f(0) == 0 exactly");

    // A3 / ~A3: finite positive slope at 0, consistent with a centered
    // difference at a scale where every built-in kind is still linear.
    {
        const double h = (m.kind == ModelKind::heaviside_approx) ? 1e-7 * m.eps * m.eps : 1e-9;
        const double num = (eval_f(m, h) - eval_f(m, -h)) / (2.0 * h);
        const bool ok = std::isfinite(m.slope_at_zero) && m.slope_at_zero > 0.0 &&
                        std::abs(num - m.slope_at_zero) <= 1e-4 * m.slope_at_zero;
        std::ostringstream d;
        d << "f'(0)=" << m.slope_at_zero << ", sampled " << num;
        add("A3", ok, d.str());
        add("~A3", ok, d.str());
    }

    // sign structure: sgn f(u) = sgn u strictly between the thresholds.
    {
        bool ok = true;
        for (int i = 0; ok && i < n; ++i) {
            const double u = s[static_cast<std::size_t>(i)];
            if (u > 0.0 && u < m.a_plus)
                ok = fs[static_cast<std::size_t>(i)] > 0.0;
            else if (u < 0.0 && u > m.a_minus)
                ok = fs[static_cast<std::size_t>(i)] < 0.0;
        }
        add("sign", ok, "f > 0 on (0,a+), f < 0 on (a-,0)");
    }

    // ~A1: non-decreasing on the sampled grid.
    {
        bool ok = true;
        for (int i = 0; ok && i + 1 < n; ++i)
            ok = fs[static_cast<std::size_t>(i + 1)] >= fs[static_cast<std::size_t>(i)] - 1e-13 * fscale;
        add("~A1", ok, "sampled monotone non-decreasing");
    }

    // potential structure: F(0) = 0, strictly increasing toward a+, strictly
    // decreasing toward a-
    {
        bool ok = eval_potential(m, 0.0) == 0.0;
        double prev = 0.0;
        for (int i = (n + 1) / 2; ok && i < n; ++i) {
            const double u = s[static_cast<std::size_t>(i)];
            if (!(u > 0.0) || u >= m.a_plus)
                break;
            const double F = eval_potential(m, u);
            ok = F > prev;
            prev = F;
        }
        prev = 0.0;
        for (int i = (n - 1) / 2; ok && i >= 0; --i) {
            const double u = s[static_cast<std::size_t>(i)];
            if (!(u < 0.0) || u <= m.a_minus)
                break;
            const double F = eval_potential(m, u);
            ok = F > prev;
            prev = F;
        }
        add("F", ok, "F(0) = 0, strictly monotone toward the thresholds");
    }

    // A4 / ~A4: strict concavity for u > 0 and convexity for u < 0, via
    // second differences. Strictness asks for at least one clearly curved
    // sample; saturated tails where the curvature underflows are tolerated.
    {
        const double flat_tol = 1e-11 * fscale;
        bool no_wrong_curvature = true;
        bool strict_seen_pos = false, strict_seen_neg = false;
        for (int i = 1; i + 1 < n; ++i) {
            const double u = s[static_cast<std::size_t>(i)];
            const double d2 = fs[static_cast<std::size_t>(i + 1)] - 2.0 * fs[static_cast<std::size_t>(i)] +
                              fs[static_cast<std::size_t>(i - 1)];
            if (u > 0.0) {
                if (d2 > flat_tol)
                    no_wrong_curvature = false;
                if (d2 < -flat_tol)
                    strict_seen_pos = true;
            } else if (u < 0.0) {
                if (d2 < -flat_tol)
                    no_wrong_curvature = false;
                if (d2 > flat_tol)
                    strict_seen_neg = true;
            }
        }
        const bool ok = no_wrong_curvature && strict_seen_pos && strict_seen_neg;
        add("A4", ok, "second differences: concave (u>0), convex (u<0), strictly somewhere");
        add("~A4", ok, "second differences: concave (u>0), convex (u<0), strictly somewhere");
    }

    // A5 with p=2: |f(u)| <= C1 + C2 |u| on the sampled range.
    {
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(fs[static_cast<std::size_t>(i)]) /
                                        (1.0 + std::abs(s[static_cast<std::size_t>(i)])));
        const double outer = std::abs(eval_f(m, spec.outer_width)) / (1.0 + spec.outer_width);
        worst = std::max(worst, outer);
        const bool ok = worst <= 10.0 * std::max(m.slope_at_zero, 1.0);
        std::ostringstream d;
        d << "max |f(u)|/(1+|u|) = " << worst;
        add("A5", ok, d.str());
    }

    // A6b: limsup f(u)/u <= 0, probed as a small and still-decreasing ratio
    // at the outer sample points.
    {
        const double W2 = spec.outer_width;
        const double rp = eval_f(m, W2) / W2;
        const double rp_half = eval_f(m, W2 / 2.0) / (W2 / 2.0);
        const double rm = eval_f(m, -W2) / (-W2);
        const double rm_half = eval_f(m, -W2 / 2.0) / (-W2 / 2.0);
        const double tol = 0.01 * std::max(m.slope_at_zero, 1e-12);
        const bool ok = rp <= tol && rm <= tol && rp < rp_half + 1e-15 && rm < rm_half + 1e-15 &&
                        !(rp == rp_half && rm == rm_half);
        std::ostringstream d;
        d << "f(u)/u at |u|=" << W2 << ": " << rp << " / " << rm;
        add("A6b", ok, d.str());
    }

    // ~A5: |f| < 1 everywhere and |f(s) - sign(s)| < eps off (-eps,eps).
    // Saturated tails round to exactly 1.0 in doubles, so the bound is
    // checked as <= 1 on the grid with strictness witnessed at an
    // unsaturated point.
    {
        bool bounded = true, close = true;
        const double eps = m.kind == ModelKind::heaviside_approx ? m.eps : 0.0;
        for (int i = 0; i < n; ++i) {
            const double u = s[static_cast<std::size_t>(i)];
            const double v = fs[static_cast<std::size_t>(i)];
            if (std::abs(v) > 1.0)
                bounded = false;
            if (eps > 0.0 && std::abs(u) > eps && std::abs(v - (u > 0.0 ? 1.0 : -1.0)) >= eps)
                close = false;
        }
        if (std::abs(eval_f(m, spec.outer_width)) > 1.0)
            bounded = false;
        if (eps > 0.0 && std::abs(eval_f(m, 2.0 * eps * eps)) >= 1.0)
            bounded = false;
        const bool ok = m.kind == ModelKind::heaviside_approx && bounded && close;
        add("~A5", ok,
            m.kind == ModelKind::heaviside_approx ? "|f|<1 and Heaviside proximity off (-eps,eps)"
                                                  : "not an approximating-family member");
    }

    return rep;
}

} // namespace morseflow
