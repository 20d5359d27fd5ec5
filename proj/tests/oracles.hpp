#pragma once

// Test-only reference implementations. Nothing here calls into the engine or
// the duality integrators; each oracle recomputes its quantity from the
// textbook definition.

#include "srm/curves.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace srm::testing {

/// Integer citations in [min_cit, max_cit] for between min_p and max_p papers.
inline std::vector<double> random_counts(std::mt19937_64& rng, std::size_t min_p, std::size_t max_p,
                                         int min_cit, int max_cit) {
    std::uniform_int_distribution<std::size_t> len(min_p, max_p);
    std::uniform_int_distribution<int> cit(min_cit, max_cit);
    std::vector<double> v(len(rng));
    for (double& x : v) {
        x = cit(rng);
    }
    return v;
}

/// Heavy-tailed integer curve: x_i ~ round(q / i^b) with jitter, values >= 1.
inline std::vector<double> random_power_counts(std::mt19937_64& rng, std::size_t max_p,
                                               int max_cit) {
    std::uniform_int_distribution<std::size_t> len(1, max_p);
    std::uniform_real_distribution<double> b(0.3, 2.5);
    std::uniform_real_distribution<double> jitter(0.7, 1.3);
    std::uniform_int_distribution<int> top(1, max_cit);
    const std::size_t p = len(rng);
    const double beta = b(rng);
    const double q = top(rng);
    std::vector<double> v(p);
    for (std::size_t i = 0; i < p; ++i) {
        v[i] = std::clamp(std::round(q * jitter(rng) / std::pow(i + 1.0, beta)), 1.0,
                          static_cast<double>(max_cit));
    }
    return v;
}

inline std::vector<double> sorted_desc(std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

/// Largest integer level q such that x_i >= threshold(q, i) for every rank
/// i = 1..q (ranks past the list carry 0). Scans q upward from 0 without
/// assuming the feasible set is an interval, up to `limit`.
inline double scan_integer_levels(const std::vector<double>& desc, std::size_t limit,
                                  const std::function<double(double q, double i)>& threshold,
                                  bool width_is_level = true) {
    double best = 0.0;
    for (std::size_t q = 1; q <= limit; ++q) {
        const std::size_t width = width_is_level ? q : 1;
        bool ok = true;
        for (std::size_t i = 1; i <= width && ok; ++i) {
            const double x = i <= desc.size() ? desc[i - 1] : 0.0;
            ok = x >= threshold(static_cast<double>(q), static_cast<double>(i));
        }
        if (ok) {
            best = static_cast<double>(q);
        }
    }
    return best;
}

/// sup over a grid of real levels of the rank-dominance predicate for the
/// h curves q * 1_(0,q]: every rank i <= q needs x_i >= q.
inline double dense_grid_h_real(const std::vector<double>& desc, double step = 1e-4) {
    if (desc.empty()) {
        return 0.0;
    }
    const double top = std::max(1.0, desc.front()) + 1.0;
    double best = 0.0;
    for (double q = step; q <= top; q += step) {
        bool ok = true;
        for (std::size_t i = 1; static_cast<double>(i) <= q && ok; ++i) {
            ok = (i <= desc.size() ? desc[i - 1] : 0.0) >= q;
        }
        if (ok) {
            best = q;
        }
    }
    return best;
}

/// Midpoint Riemann sum of (1/N) * integral_0^N z(x) f(x) dx over `cells`
/// equal cells, accumulated in long double.
inline double riemann_expectation(const std::function<double(double)>& z,
                                  const std::function<double(double)>& f, double extent,
                                  std::size_t cells = 1'000'000) {
    const long double h = static_cast<long double>(extent) / cells;
    long double sum = 0.0L;
    for (std::size_t k = 0; k < cells; ++k) {
        const double x = static_cast<double>((k + 0.5L) * h);
        sum += static_cast<long double>(z(x)) * f(x);
    }
    return static_cast<double>(sum * h / extent);
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least squares from the raw normal equations solved by Cramer's rule in
/// long double, no centering.
inline LineFit normal_equations(const std::vector<double>& xs, const std::vector<double>& ys) {
    long double n = xs.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sx += xs[k];
        sy += ys[k];
        sxx += static_cast<long double>(xs[k]) * xs[k];
        sxy += static_cast<long double>(xs[k]) * ys[k];
    }
    const long double det = n * sxx - sx * sx;
    return {static_cast<double>((n * sxy - sx * sy) / det),
            static_cast<double>((sxx * sy - sx * sxy) / det)};
}

} // namespace srm::testing
