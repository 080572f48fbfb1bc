#include <catch2/catch.hpp>

#include <cmath>

#include "morseflow/timemap.hpp"

using namespace morseflow;

namespace {

// Independent oracle for the time map: Gauss-Chebyshev quadrature of the
// y-form tau_+(E) = 2 sqrt(E) int_0^1 (1-y^2)^{-1/2} y / f(U(E y^2)) dy.
// The (1-y^2)^{-1/2} weight is absorbed by the Chebyshev nodes, a genuinely
// different discretization from the production theta-substitution Simpson.
double tau_chebyshev(const NonlinearityModel &m, Sign sign, double E, int nodes = 4000) {
    double acc = 0.0;
    for (int k = 1; k <= nodes; ++k) {
        const double y = std::abs(std::cos((2.0 * k - 1.0) * pi_const / (2.0 * 2.0 * nodes)));
        const double u = sign == Sign::plus ? invert_potential_plus(m, E * y * y)
                                            : invert_potential_minus(m, E * y * y);
        const double fu = std::abs(eval_f(m, u));
        acc += fu > 0.0 ? y / fu : 1.0 / std::sqrt(2.0 * E * m.slope_at_zero);
    }
    // int_{-1}^{1} w(y) g(|y|) dy = 2 int_0^1, with w-weighted node sum pi/(2 nodes)
    return 2.0 * std::sqrt(E) * acc * pi_const / (2.0 * nodes);
}

} // namespace

TEST_CASE("linear model time map is the closed form pi/sqrt(2 lambda)", "[timemap]") {
    const auto m = NonlinearityModel::linear(2.0);
    // int_0^U (E - lambda u^2/2)^{-1/2} du with U = sqrt(2E/lambda) is an
    // arcsin antiderivative: pi/sqrt(2 lambda), independent of E.
    const double expected = pi_const / 2.0;
    for (double E : {0.01, 0.5, 10.0}) {
        const TauResult r = tau(m, Sign::plus, E);
        CHECK(std::abs(r.value - expected) < 1e-8);
    }
    SECTION("minus side agrees") {
        CHECK(tau(m, Sign::minus, 0.5).value == Approx(expected).margin(1e-9));
    }
}

TEST_CASE("limit of tau at E -> 0+", "[timemap]") {
    SECTION("formula values") {
        NonlinearityModel m = NonlinearityModel::linear(2.0);
        CHECK(tau_limit_at_zero(m) == Approx(pi_const / 2.0));
        m = NonlinearityModel::saturating(pi_const * pi_const / 2.0);
        CHECK(tau_limit_at_zero(m) == Approx(1.0));
        m = NonlinearityModel::saturating(50.0);
        CHECK(tau_limit_at_zero(m) == Approx(pi_const / 10.0));
    }
    SECTION("tau approaches the limit from above with shrinking error") {
        const auto m = NonlinearityModel::saturating(50.0);
        const double limit = pi_const / 10.0;
        double prev_err = std::numeric_limits<double>::infinity();
        for (double E : {1e-6, 1e-7, 1e-8}) {
            const double err = std::abs(tau(m, Sign::plus, E).value - limit);
            CHECK(err < prev_err);
            prev_err = err;
        }
        CHECK(prev_err < 1e-3);
    }
    SECTION("lower bound across the domain") {
        const auto m = NonlinearityModel::heaviside(0.2);
        const double limit = tau_limit_at_zero(m);
        for (double E : {1e-6, 1e-3, 0.1, 1.0, 10.0})
            CHECK(tau(m, Sign::plus, E).value > limit - 1e-9);
    }
}

TEST_CASE("time map against the Chebyshev oracle", "[timemap]") {
    for (const auto &m : {NonlinearityModel::saturating(50.0), NonlinearityModel::heaviside(0.2)}) {
        for (double E : {1e-3, 0.05, 0.5, 3.0}) {
            const double production = tau(m, Sign::plus, E).value;
            const double oracle = tau_chebyshev(m, Sign::plus, E);
            CHECK(production == Approx(oracle).epsilon(5e-7));
        }
    }
}

TEST_CASE("odd models have symmetric time maps", "[timemap]") {
    for (const auto &m : {NonlinearityModel::saturating(30.0), NonlinearityModel::heaviside(0.25)}) {
        for (double E : {1e-4, 0.02, 1.0}) {
            const double tp = tau(m, Sign::plus, E).value;
            const double tm = tau(m, Sign::minus, E).value;
            CHECK(std::abs(tp - tm) < 1e-10);
        }
    }
}

TEST_CASE("tau rejects bad input", "[timemap]") {
    const auto m = NonlinearityModel::saturating(10.0);
    CHECK_THROWS_AS(tau(m, Sign::plus, 0.0), std::domain_error);
    CHECK_THROWS_AS(tau(m, Sign::plus, -1.0), std::domain_error);
    CHECK_THROWS_AS(tau(m, Sign::plus, 2e6), std::domain_error);
    CHECK_THROWS_AS(tau(NonlinearityModel::linear(0.0), Sign::plus, 1.0), std::domain_error);
}

TEST_CASE("exhausted quadrature budget carries the last estimate", "[timemap]") {
    const auto m = NonlinearityModel::heaviside(0.2);
    TauOptions opts;
    opts.rel_tol = 1e-30; // unreachable: forces the doubling budget to run out
    opts.max_doublings = 2;
    try {
        tau(m, Sign::plus, 0.5, opts);
        FAIL("expected numerical_error");
    } catch (const numerical_error &e) {
        const double reference = tau(m, Sign::plus, 0.5).value;
        CHECK(e.last_estimate() == Approx(reference).epsilon(1e-6));
    }
}

TEST_CASE("monotonicity check", "[timemap]") {
    SECTION("saturating model is strictly increasing on a log grid") {
        const auto m = NonlinearityModel::saturating(50.0);
        std::vector<double> grid;
        for (int i = 0; i < 20; ++i)
            grid.push_back(1e-6 * std::pow(10.0, 7.0 * i / 19.0));
        const auto rep = check_monotone(m, Sign::plus, grid);
        CHECK(rep.monotone);
        CHECK_FALSE(rep.first_violation.has_value());
    }
    SECTION("linear oracle is constant, so the check fails immediately") {
        const auto m = NonlinearityModel::linear(2.0);
        const auto rep = check_monotone(m, Sign::plus, {0.1, 0.5, 2.0});
        CHECK_FALSE(rep.monotone);
        REQUIRE(rep.first_violation.has_value());
        CHECK(*rep.first_violation == 0);
    }
    SECTION("single-point grid is vacuously monotone") {
        const auto rep = check_monotone(NonlinearityModel::saturating(50.0), Sign::plus, {0.5});
        CHECK(rep.monotone);
    }
    SECTION("grids must increase") {
        CHECK_THROWS_AS(check_monotone(NonlinearityModel::saturating(50.0), Sign::plus, {1.0, 0.5}),
                        std::domain_error);
    }
}

TEST_CASE("branch equation solutions", "[timemap]") {
    SECTION("heaviside(0.2): first branch exists, h(E) hits 1/sqrt(2)") {
        const auto m = NonlinearityModel::heaviside(0.2); // f'(0) = 25 > pi^2
        const auto b = solve_branch(m, 1, BranchKind::plus);
        REQUIRE(b.has_value());
        CHECK(b->E_value > 0.0);
        CHECK(std::abs(b->residual) < 1e-10);
        // oracle: the plus time map itself must equal 1/sqrt(2) there
        const double oracle = tau_chebyshev(m, Sign::plus, b->E_value, 8000);
        CHECK(oracle == Approx(1.0 / std::sqrt(2.0)).margin(5e-6));
    }
    SECTION("heaviside(0.2): second branch outside the Theorem domain") {
        const auto m = NonlinearityModel::heaviside(0.2); // 25 < 4 pi^2
        CHECK_FALSE(solve_branch(m, 2, BranchKind::even).has_value());
    }
    SECTION("exact bifurcation value gives E = 0") {
        const auto m = NonlinearityModel::saturating(pi_const * pi_const);
        const auto b = solve_branch(m, 1, BranchKind::plus);
        REQUIRE(b.has_value());
        CHECK(b->E_value == 0.0);
        CHECK(b->residual == 0.0);
    }
    SECTION("odd models: plus and minus branches share the energy") {
        const auto m = NonlinearityModel::heaviside(0.15);
        const auto bp = solve_branch(m, 1, BranchKind::plus);
        const auto bm = solve_branch(m, 1, BranchKind::minus);
        REQUIRE(bp.has_value());
        REQUIRE(bm.has_value());
        CHECK(bp->E_value == Approx(bm->E_value).epsilon(1e-8));
    }
    SECTION("kind / parity mismatches are rejected") {
        const auto m = NonlinearityModel::saturating(50.0);
        CHECK_THROWS_AS(solve_branch(m, 1, BranchKind::even), std::domain_error);
        CHECK_THROWS_AS(solve_branch(m, 2, BranchKind::plus), std::domain_error);
        CHECK_THROWS_AS(solve_branch(m, 0, BranchKind::plus), std::domain_error);
    }
    SECTION("constant time maps never bracket: numerical error below the cap") {
        // the linear oracle has h(E) = pi/sqrt(2 lambda) for every E, so no
        // root exists even though f'(0) > pi^2
        CHECK_THROWS_AS(solve_branch(NonlinearityModel::linear(50.0), 1, BranchKind::plus),
                        numerical_error);
        CHECK_FALSE(solve_branch(NonlinearityModel::linear(2.0), 1, BranchKind::plus).has_value());
    }
}

TEST_CASE("equilibrium count", "[timemap]") {
    CHECK(count_equilibria(NonlinearityModel::saturating(5.0)) == 1);
    CHECK(count_equilibria(NonlinearityModel::saturating(25.0)) == 3);
    CHECK(count_equilibria(NonlinearityModel::saturating(100.0)) == 7);

    SECTION("consistency with branch availability") {
        const auto m = NonlinearityModel::saturating(100.0);
        const int n_max = max_branch_index(m);
        CHECK(n_max == 3);
        int profiles = 0; // each solved branch index carries a +/- profile pair
        for (int n = 1; n <= n_max + 1; ++n) {
            if (n % 2 == 1) {
                const auto bp = solve_branch(m, n, BranchKind::plus);
                const auto bm = solve_branch(m, n, BranchKind::minus);
                CHECK(bp.has_value() == bm.has_value());
                if (bp && bm)
                    profiles += 2;
                if (n > n_max)
                    CHECK_FALSE(bp.has_value());
            } else {
                const auto be = solve_branch(m, n, BranchKind::even);
                if (be)
                    profiles += 2;
                if (n > n_max)
                    CHECK_FALSE(be.has_value());
            }
        }
        CHECK(profiles == count_equilibria(m) - 1);
    }
}

TEST_CASE("branch energies are increasing in f'(0) headroom", "[timemap]") {
    // regression guard: the first-branch energy for heaviside(0.2), frozen
    // from the bisection itself, documents the bifurcation scale
    const auto m = NonlinearityModel::heaviside(0.2);
    const auto b = solve_branch(m, 1, BranchKind::plus);
    REQUIRE(b.has_value());
    CHECK(b->E_value > 1e-4);
    CHECK(b->E_value < 1.0);
}
