#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace srm {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Citations per publication as a nonincreasing step function of rank.
///
/// Rank i (1-based) carries values()[i-1] on the interval (i-1, i]; every
/// rank past the stored entries carries tail(). Entries equal to the tail are
/// folded into it, so publications() is the number of entries strictly above
/// the tail.
class CitationCurve {
public:
    /// The zero curve.
    CitationCurve() = default;

    /// Sorts `raw` nonincreasing and folds trailing entries equal to `tail`.
    /// Throws ValidationError on negative or non-finite input, or when an
    /// entry lies below the tail.
    static CitationCurve from_values(std::vector<double> raw, double tail = 0.0);

    std::span<const double> values() const noexcept { return values_; }
    double tail() const noexcept { return tail_; }
    std::size_t publications() const noexcept { return values_.size(); }
    bool is_zero() const noexcept { return values_.empty() && tail_ == 0.0; }

    /// X(i) for an integer rank i >= 1.
    double at_rank(std::size_t rank) const noexcept;
    /// X(x) for real x; 0 for x <= 0.
    double operator()(double x) const noexcept;
    /// X(1), the largest value of the curve.
    double peak() const noexcept { return at_rank(1); }

    bool operator==(const CitationCurve&) const = default;

private:
    std::vector<double> values_;
    double tail_ = 0.0;
};

/// Convenience wrapper for CitationCurve::from_values.
CitationCurve construct_curve(std::vector<double> raw, double tail = 0.0);

/// (X + m)(x) = X(x) + m on positive reals.
CitationCurve shift_citations(const CitationCurve& curve, double m);

/// Adds one publication with a single citation at rank p + 1.
/// Requires a zero tail.
CitationCurve append_publication(const CitationCurve& curve);

/// Pointwise lambda * a + (1 - lambda) * b.
CitationCurve mix(const CitationCurve& a, const CitationCurve& b, double lambda);

std::string to_string(const CitationCurve& curve);

// ---------------------------------------------------------------------------
// Performance families
// ---------------------------------------------------------------------------

enum class LevelKind { integers, reals };

enum class DominanceDomain { all_positive_ranks, author_support_only };

enum class Shape { rectangle, staircase_line, power };

/// Height of a rectangle curve as a function of the level q.
enum class HeightRule { unit, level, level_squared, scaled_level };

/// Width of a rectangle curve as a function of the level q.
enum class WidthRule { unit, level };

/// A family {f_q} of theoretical citation curves, nondecreasing in q.
///
/// Built-in shapes:
///   rectangle        g(q) * 1_(0, w(q)]
///   staircase_line   (q + 1 - x) * 1_(0, q]
///   power            q / x^beta on (0, cap]   (cap = +inf by default)
class PerformanceFamily {
public:
    static PerformanceFamily c_max();
    static PerformanceFamily publications();
    static PerformanceFamily h_index();
    static PerformanceFamily h_squared();
    static PerformanceFamily h_alpha(double alpha);
    static PerformanceFamily w_index();
    /// h-index curves with real levels.
    static PerformanceFamily h_real();
    static PerformanceFamily power(double beta);
    static PerformanceFamily rectangle(HeightRule height, WidthRule width, LevelKind levels,
                                       double alpha = 1.0);

    Shape shape() const noexcept { return shape_; }
    HeightRule height_rule() const noexcept { return height_; }
    WidthRule width_rule() const noexcept { return width_; }
    LevelKind levels() const noexcept { return levels_; }
    DominanceDomain domain() const noexcept { return domain_; }
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double support_cap() const noexcept { return cap_; }
    const std::string& name() const noexcept { return name_; }

    PerformanceFamily with_levels(LevelKind levels) const;
    PerformanceFamily with_domain(DominanceDomain domain) const;
    /// Restricts every curve to (0, cap].
    PerformanceFamily with_support_cap(double cap) const;

    /// f_q(x).
    double operator()(double q, double x) const;
    /// sup of the support of f_q; +inf for an uncapped power family.
    double support_bound(double q) const;
    bool has_bounded_support() const noexcept;
    /// value >= f_q(rank). The power shape compares value * rank^beta >= q so
    /// that the closed form min_i x_i i^beta is reproduced bit for bit.
    bool rank_satisfied(double q, std::size_t rank, double value) const;

    /// Height of a rectangle curve at level q.
    double height(double q) const;
    /// Width of a rectangle curve at level q (before the support cap).
    double width(double q) const;

private:
    PerformanceFamily() = default;

    Shape shape_ = Shape::rectangle;
    HeightRule height_ = HeightRule::level;
    WidthRule width_ = WidthRule::level;
    LevelKind levels_ = LevelKind::integers;
    DominanceDomain domain_ = DominanceDomain::all_positive_ranks;
    double alpha_ = 1.0;
    double beta_ = 1.0;
    double cap_ = kInfinity;
    std::string name_;
};

inline double evaluate_family(const PerformanceFamily& family, double q, double x) {
    return family(q, x);
}

enum class SlopeClass { slowly, fast, linear, neither };

std::string to_string(SlopeClass c);

/// Grid refutation test of f_{q+m}(x) - f_q(x) against m.
///
/// Returns the strongest class consistent with every sampled point. Passing
/// the check does not prove the class; a single failing point refutes it.
SlopeClass family_slope_class(const PerformanceFamily& family, std::span<const double> q_grid,
                              std::span<const double> m_grid, std::span<const double> x_grid,
                              double tolerance = 1e-12);

/// Exact class of a built-in family when curves are read at integer ranks,
/// the evaluation the engine uses for dominance.
SlopeClass known_slope_class(const PerformanceFamily& family);

/// f_q(x) - f_{q - eps}(x) for each eps in `eps_sequence`.
std::vector<double> left_continuity_check(const PerformanceFamily& family, double q, double x,
                                          std::span<const double> eps_sequence);

/// Result of a sup-level computation. `level` may be +inf.
struct SrmValue {
    double level = 0.0;
    bool attained = true;

    bool operator==(const SrmValue&) const = default;
};

} // namespace srm
