#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace morseflow {

// Grid functions live on a uniform partition of [0,1] with N interior points,
// N+2 values in total and dx = 1/(N+1). Boundary entries are the Dirichlet
// values and stay at exactly 0.

inline double grid_dx(int interior_points) {
    if (interior_points < 1)
        throw std::domain_error("grid: need at least one interior point");
    return 1.0 / (interior_points + 1);
}

inline std::vector<double> grid_coordinates(int interior_points) {
    const double dx = grid_dx(interior_points);
    std::vector<double> x(static_cast<std::size_t>(interior_points) + 2);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = static_cast<double>(i) * dx;
    x.back() = 1.0;
    return x;
}

/// Trapezoid-rule L2 norm. With zero boundary values this reduces to
/// sqrt(dx * sum of interior squares).
inline double l2_norm(const std::vector<double> &u, double dx) {
    double s = 0.5 * (u.front() * u.front() + u.back() * u.back());
    for (std::size_t i = 1; i + 1 < u.size(); ++i)
        s += u[i] * u[i];
    return std::sqrt(dx * s);
}

/// Forward-difference H^1_0 seminorm: sqrt(sum (u_{i+1}-u_i)^2 / dx).
inline double h10_norm(const std::vector<double> &u, double dx) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double d = u[i + 1] - u[i];
        s += d * d;
    }
    return std::sqrt(s / dx);
}

inline void check_same_grid(const std::vector<double> &a, const std::vector<double> &b) {
    if (a.size() != b.size())
        throw std::domain_error("grid: size mismatch between grid functions");
}

inline double l2_distance(const std::vector<double> &a, const std::vector<double> &b, double dx) {
    check_same_grid(a, b);
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    const double d0 = a.front() - b.front(), d1 = a.back() - b.back();
    s += 0.5 * (d0 * d0 + d1 * d1);
    return std::sqrt(dx * s);
}

inline double h10_distance(const std::vector<double> &a, const std::vector<double> &b, double dx) {
    check_same_grid(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        const double d = (a[i + 1] - b[i + 1]) - (a[i] - b[i]);
        s += d * d;
    }
    return std::sqrt(s / dx);
}

inline double trapezoid(const std::vector<double> &u, double dx) {
    double s = 0.5 * (u.front() + u.back());
    for (std::size_t i = 1; i + 1 < u.size(); ++i)
        s += u[i];
    return dx * s;
}

/// amp * sin(k pi x) sampled on the grid, boundaries exactly zero.
inline std::vector<double> sine_field(int interior_points, int mode, double amp) {
    const double dx = grid_dx(interior_points);
    std::vector<double> u(static_cast<std::size_t>(interior_points) + 2, 0.0);
    const double pi = 3.14159265358979323846;
    for (int i = 1; i <= interior_points; ++i)
        u[static_cast<std::size_t>(i)] = amp * std::sin(mode * pi * i * dx);
    return u;
}

/// Runs fn(i) for i in [0, count) on at most `jobs` threads. Results are
/// written by index, so output order never depends on scheduling.
template <typename Fn>
void parallel_for_index(std::size_t count, int jobs, Fn &&fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error;
    std::mutex guard;
    std::size_t next = 0;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i;
                {
                    std::lock_guard<std::mutex> lock(guard);
                    if (next >= count || first_error)
                        return;
                    i = next++;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(guard);
                    if (!first_error)
                        first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto &t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace morseflow
