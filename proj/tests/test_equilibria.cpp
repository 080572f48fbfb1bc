#include <catch2/catch.hpp>

#include <cmath>

#include "morseflow/equilibria.hpp"

using namespace morseflow;

namespace {

// max over interior stencils of |second difference / dx^2 + f(u)|
double interior_residual(const EquilibriumProfile &p, const NonlinearityModel &m) {
    double worst = 0.0;
    for (int i = 1; i <= p.interior_points; ++i) {
        const double d2 = (p.values[static_cast<std::size_t>(i) - 1] -
                           2.0 * p.values[static_cast<std::size_t>(i)] +
                           p.values[static_cast<std::size_t>(i) + 1]) /
                          (p.dx * p.dx);
        worst = std::max(worst, std::abs(d2 + eval_f(m, p.values[static_cast<std::size_t>(i)])));
    }
    return worst;
}

} // namespace

TEST_CASE("limit profiles of the inclusion", "[equilibria]") {
    const int N = 1023;
    SECTION("n=1 plus is x(1-x)/2") {
        const auto p = limit_profile(1, ProfileKind::plus, N);
        CHECK(p.values[512] == Approx(0.125).margin(1e-12)); // max 1/8 at x = 1/2
        for (int i = 1; i <= N; ++i) {
            const double x = i * p.dx;
            CHECK(p.values[static_cast<std::size_t>(i)] == Approx(x * (1.0 - x) / 2.0).margin(1e-14));
        }
        CHECK(p.zeros == 2);
        CHECK(p.energy == Approx(0.125));
    }
    SECTION("n=1 minus is the mirror image") {
        const auto plus = limit_profile(1, ProfileKind::plus, N);
        const auto minus = limit_profile(1, ProfileKind::minus, N);
        for (std::size_t i = 0; i < plus.values.size(); ++i)
            CHECK(minus.values[i] == Approx(-plus.values[i]).margin(1e-15));
    }
    SECTION("closed-form norms: h10^2 = 1/12, l2^2 = 1/120") {
        const auto p = limit_profile(1, ProfileKind::plus, N);
        CHECK(p.h10 * p.h10 == Approx(1.0 / 12.0).margin(1e-6));
        CHECK(p.l2 * p.l2 == Approx(1.0 / 120.0).margin(1e-6));
    }
    SECTION("discrete norms converge to the closed forms as N grows") {
        const double err_small =
            std::abs(limit_profile(1, ProfileKind::plus, 255).h10 - std::sqrt(1.0 / 12.0));
        const double err_large =
            std::abs(limit_profile(1, ProfileKind::plus, 1023).h10 - std::sqrt(1.0 / 12.0));
        CHECK(err_large < err_small);
    }
    SECTION("n arches solve u'' = -sigma_q away from the kinks") {
        const auto p = limit_profile(3, ProfileKind::plus, N);
        CHECK(p.zeros == 4);
        for (int i = 2; i < N; ++i) {
            const double x = i * p.dx;
            const int q = std::min(static_cast<int>(std::floor(x * 3)), 2);
            // skip stencils straddling an arch boundary
            const double lo = q / 3.0, hi = (q + 1) / 3.0;
            if (x - p.dx <= lo + 1e-12 || x + p.dx >= hi - 1e-12)
                continue;
            const double d2 = (p.values[static_cast<std::size_t>(i) - 1] -
                               2.0 * p.values[static_cast<std::size_t>(i)] +
                               p.values[static_cast<std::size_t>(i) + 1]) /
                              (p.dx * p.dx);
            const double sigma = q % 2 == 0 ? 1.0 : -1.0;
            CHECK(d2 == Approx(-sigma).margin(1e-8));
        }
    }
    SECTION("argument validation") {
        CHECK_THROWS_AS(limit_profile(0, ProfileKind::plus, N), std::domain_error);
        CHECK_THROWS_AS(limit_profile(1, ProfileKind::zero, N), std::domain_error);
    }
}

TEST_CASE("shooting the first branch of heaviside(0.2)", "[equilibria]") {
    const auto m = NonlinearityModel::heaviside(0.2);
    const auto b = solve_branch(m, 1, BranchKind::plus);
    REQUIRE(b.has_value());
    CHECK(b->E_value == Approx(0.092663299256035).margin(1e-9)); // regression baseline

    const auto p = shoot_profile(m, *b, 1023);
    SECTION("structure") {
        CHECK(p.zeros == 2);
        CHECK(p.boundary_residual < 1e-6);
        CHECK(p.values.front() == 0.0);
        CHECK(p.values.back() == 0.0);
        for (int i = 1; i <= p.interior_points; ++i)
            CHECK(p.values[static_cast<std::size_t>(i)] > 0.0);
    }
    SECTION("energy conservation along the shoot") {
        CHECK(p.hamiltonian_drift < 1e-6);
    }
    SECTION("regression baselines") {
        CHECK(p.h10 == Approx(0.274975506612828).margin(1e-9));
        CHECK(p.l2 == Approx(0.087241393400678).margin(1e-9));
        CHECK(p.values[512] == Approx(0.120291590625153).margin(1e-9));
    }
    SECTION("odd symmetry: the minus profile is the negative") {
        const auto bm = solve_branch(m, 1, BranchKind::minus);
        REQUIRE(bm.has_value());
        const auto q = shoot_profile(m, *bm, 1023);
        for (std::size_t i = 0; i < p.values.size(); ++i)
            CHECK(q.values[i] == Approx(-p.values[i]).margin(1e-8));
    }
}

TEST_CASE("shooting the richer heaviside(0.1) spectrum", "[equilibria]") {
    const auto m = NonlinearityModel::heaviside(0.1); // f'(0) = 100, branches 1..3
    for (int n = 1; n <= 3; ++n) {
        const BranchKind bk = n % 2 == 1 ? BranchKind::plus : BranchKind::even;
        const auto b = solve_branch(m, n, bk);
        REQUIRE(b.has_value());
        const auto p = shoot_profile(m, *b, 511, ProfileKind::plus);
        CHECK(p.zeros == n + 1);
        CHECK(p.boundary_residual < 1e-6);
        CHECK(p.hamiltonian_drift < 1e-6);

        // sign pattern: (-1)^q v > 0 between consecutive zeros
        int q = 0;
        int last_sign = 0;
        for (int i = 1; i <= p.interior_points; ++i) {
            const double v = p.values[static_cast<std::size_t>(i)];
            if (std::abs(v) <= 1e-9)
                continue;
            const int s = v > 0.0 ? 1 : -1;
            if (last_sign != 0 && s != last_sign)
                ++q;
            CHECK(s == (q % 2 == 0 ? 1 : -1));
            last_sign = s;
        }
        CHECK(q == n - 1);
    }
}

TEST_CASE("zero branch and error paths", "[equilibria]") {
    SECTION("zero branch gives the identically-zero profile") {
        const auto m = NonlinearityModel::heaviside(0.2);
        BranchSolution zero{0, BranchKind::plus, 0.0, 0.0};
        const auto p = shoot_profile(m, zero, 255, ProfileKind::plus);
        for (double v : p.values)
            CHECK(v == 0.0);
        CHECK(p.branch_kind == ProfileKind::zero);
    }
    SECTION("grid floor") {
        const auto m = NonlinearityModel::heaviside(0.2);
        const auto b = solve_branch(m, 1, BranchKind::plus);
        CHECK_THROWS_AS(shoot_profile(m, *b, 100), std::domain_error);
    }
    SECTION("even branches need an explicit profile sign") {
        const auto m = NonlinearityModel::heaviside(0.1);
        const auto b = solve_branch(m, 2, BranchKind::even);
        REQUIRE(b.has_value());
        CHECK_THROWS_AS(shoot_profile(m, *b, 511), std::domain_error);
        CHECK_NOTHROW(shoot_profile(m, *b, 511, ProfileKind::minus));
    }
    SECTION("a badly wrong branch energy is a shooting mismatch") {
        const auto m = NonlinearityModel::heaviside(0.2);
        auto b = solve_branch(m, 1, BranchKind::plus);
        REQUIRE(b.has_value());
        b->E_value *= 8.0; // far outside what one Newton correction can repair
        CHECK_THROWS(shoot_profile(m, *b, 255));
    }
}

TEST_CASE("stationary residual shrinks at second order", "[equilibria]") {
    const auto m = NonlinearityModel::heaviside(0.2);
    const auto b = solve_branch(m, 1, BranchKind::plus);
    REQUIRE(b.has_value());
    const double r_coarse = interior_residual(shoot_profile(m, *b, 255), m);
    const double r_fine = interior_residual(shoot_profile(m, *b, 511), m);
    CHECK(r_coarse < 1e-2);
    const double ratio = r_coarse / r_fine;
    CHECK(ratio > 2.5); // O(dx^2): halving the mesh shrinks it ~4x
    CHECK(ratio < 6.5);
}

TEST_CASE("epsilon convergence sweep", "[equilibria]") {
    SECTION("standard sweep toward x(1-x)/2") {
        const auto sweep = convergence_sweep({0.3, 0.2, 0.1, 0.05}, 1, ProfileKind::plus, 1023);
        REQUIRE(sweep.rows.size() == 4);
        CHECK(sweep.final_ok);
        CHECK(sweep.trend_ok);
        // regression baselines from the recorded run
        CHECK(sweep.rows[0].dist_h10 == Approx(0.145250258839969).margin(1e-9));
        CHECK(sweep.rows[1].dist_h10 == Approx(0.017845168683132).margin(1e-9));
        CHECK(sweep.rows[2].dist_h10 == Approx(0.001651733777931).margin(1e-9));
        CHECK(sweep.rows[3].dist_h10 == Approx(0.000195960803887).margin(1e-9));
        for (std::size_t i = 0; i + 1 < sweep.rows.size(); ++i)
            CHECK(sweep.rows[i + 1].dist_h10 < sweep.rows[i].dist_h10);
        // the profiles do not collapse to zero
        for (const auto &row : sweep.rows)
            CHECK(row.dist_h10_to_zero > 0.1);
    }
    SECTION("single-entry sweep is trivially consistent") {
        const auto sweep = convergence_sweep({0.2}, 1, ProfileKind::plus, 511);
        CHECK(sweep.rows.size() == 1);
        CHECK(sweep.trend_ok);
    }
    SECTION("missing branch is a domain error naming the offender") {
        CHECK_THROWS_WITH(convergence_sweep({0.2, 0.9}, 1, ProfileKind::plus, 511),
                          Catch::Contains("0.9"));
    }
    SECTION("jobs > 1 reproduces the sequential result") {
        const auto seq = convergence_sweep({0.3, 0.2}, 1, ProfileKind::plus, 511, 0.05, 0.0, 1);
        const auto par = convergence_sweep({0.3, 0.2}, 1, ProfileKind::plus, 511, 0.05, 0.0, 4);
        REQUIRE(par.rows.size() == seq.rows.size());
        for (std::size_t i = 0; i < seq.rows.size(); ++i)
            CHECK(par.rows[i].dist_h10 == seq.rows[i].dist_h10);
    }
}
