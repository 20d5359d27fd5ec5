#include "srm/curves.hpp"

#include "srm/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace srm {

namespace {

std::string format_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void require_finite_nonnegative(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError(std::string(what) + " must be finite and nonnegative, got " +
                              format_param(v));
    }
}

} // namespace

// ---------------------------------------------------------------------------
// CitationCurve
// ---------------------------------------------------------------------------

CitationCurve CitationCurve::from_values(std::vector<double> raw, double tail) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!std::isfinite(raw[i]) || raw[i] < 0.0) {
            throw ValidationError("citation entry at position " + std::to_string(i) +
                                  " must be finite and nonnegative, got " +
                                  format_param(raw[i]));
        }
    }
    require_finite_nonnegative(tail, "tail");

    std::sort(raw.begin(), raw.end(), std::greater<>());
    if (!raw.empty() && raw.back() < tail) {
        throw ValidationError("entry " + format_param(raw.back()) + " lies below the tail " +
                              format_param(tail));
    }
    while (!raw.empty() && raw.back() == tail) {
        raw.pop_back();
    }

    CitationCurve curve;
    curve.values_ = std::move(raw);
    curve.tail_ = tail;
    return curve;
}

double CitationCurve::at_rank(std::size_t rank) const noexcept {
    if (rank == 0) {
        return 0.0;
    }
    return rank <= values_.size() ? values_[rank - 1] : tail_;
}

double CitationCurve::operator()(double x) const noexcept {
    if (!(x > 0.0)) {
        return 0.0;
    }
    if (x > static_cast<double>(values_.size())) {
        return tail_;
    }
    return values_[static_cast<std::size_t>(std::ceil(x)) - 1];
}

CitationCurve construct_curve(std::vector<double> raw, double tail) {
    return CitationCurve::from_values(std::move(raw), tail);
}

CitationCurve shift_citations(const CitationCurve& curve, double m) {
    require_finite_nonnegative(m, "shift");
    std::vector<double> values(curve.values().begin(), curve.values().end());
    for (double& v : values) {
        v += m;
    }
    return CitationCurve::from_values(std::move(values), curve.tail() + m);
}

CitationCurve append_publication(const CitationCurve& curve) {
    if (curve.tail() > 0.0) {
        throw UnsupportedError("append_publication requires a curve with finite support (tail 0)");
    }
    std::vector<double> values(curve.values().begin(), curve.values().end());
    values.push_back(1.0);
    return CitationCurve::from_values(std::move(values), 0.0);
}

CitationCurve mix(const CitationCurve& a, const CitationCurve& b, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw ValidationError("mixing weight must lie in [0, 1], got " + format_param(lambda));
    }
    const double tail = lambda * a.tail() + (1.0 - lambda) * b.tail();
    const std::size_t n = std::max(a.publications(), b.publications());
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = lambda * a.at_rank(i + 1) + (1.0 - lambda) * b.at_rank(i + 1);
        values[i] = std::max(v, tail);
    }
    return CitationCurve::from_values(std::move(values), tail);
}

std::string to_string(const CitationCurve& curve) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < curve.publications(); ++i) {
        os << (i ? ", " : "") << format_param(curve.values()[i]);
    }
    os << ']';
    if (curve.tail() > 0.0) {
        os << " tail " << format_param(curve.tail());
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// PerformanceFamily
// ---------------------------------------------------------------------------

PerformanceFamily PerformanceFamily::rectangle(HeightRule height, WidthRule width,
                                               LevelKind levels, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ValidationError("alpha must be positive, got " + format_param(alpha));
    }
    PerformanceFamily f;
    f.shape_ = Shape::rectangle;
    f.height_ = height;
    f.width_ = width;
    f.levels_ = levels;
    f.alpha_ = height == HeightRule::scaled_level ? alpha : 1.0;
    f.name_ = "rectangle";
    return f;
}

PerformanceFamily PerformanceFamily::c_max() {
    auto f = rectangle(HeightRule::level, WidthRule::unit, LevelKind::reals);
    f.name_ = "c_max";
    return f;
}

PerformanceFamily PerformanceFamily::publications() {
    auto f = rectangle(HeightRule::unit, WidthRule::level, LevelKind::integers);
    f.name_ = "pubs";
    return f;
}

PerformanceFamily PerformanceFamily::h_index() {
    auto f = rectangle(HeightRule::level, WidthRule::level, LevelKind::integers);
    f.name_ = "h";
    return f;
}

PerformanceFamily PerformanceFamily::h_squared() {
    auto f = rectangle(HeightRule::level_squared, WidthRule::level, LevelKind::integers);
    f.name_ = "h2";
    return f;
}

PerformanceFamily PerformanceFamily::h_alpha(double alpha) {
    auto f = rectangle(HeightRule::scaled_level, WidthRule::level, LevelKind::integers, alpha);
    f.name_ = "h-alpha:" + format_param(alpha);
    return f;
}

PerformanceFamily PerformanceFamily::w_index() {
    PerformanceFamily f;
    f.shape_ = Shape::staircase_line;
    f.levels_ = LevelKind::integers;
    f.name_ = "w";
    return f;
}

PerformanceFamily PerformanceFamily::h_real() {
    auto f = rectangle(HeightRule::level, WidthRule::level, LevelKind::reals);
    f.name_ = "h_r";
    return f;
}

PerformanceFamily PerformanceFamily::power(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ValidationError("beta must be positive, got " + format_param(beta));
    }
    PerformanceFamily f;
    f.shape_ = Shape::power;
    f.levels_ = LevelKind::reals;
    f.domain_ = DominanceDomain::author_support_only;
    f.beta_ = beta;
    f.name_ = "phi:" + format_param(beta);
    return f;
}

PerformanceFamily PerformanceFamily::with_levels(LevelKind levels) const {
    PerformanceFamily f = *this;
    f.levels_ = levels;
    return f;
}

PerformanceFamily PerformanceFamily::with_domain(DominanceDomain domain) const {
    PerformanceFamily f = *this;
    f.domain_ = domain;
    return f;
}

PerformanceFamily PerformanceFamily::with_support_cap(double cap) const {
    if (!(cap >= 0.0)) {
        throw ValidationError("support cap must be nonnegative");
    }
    PerformanceFamily f = *this;
    f.cap_ = std::min(cap_, cap);
    return f;
}

double PerformanceFamily::height(double q) const {
    switch (height_) {
    case HeightRule::unit: return 1.0;
    case HeightRule::level: return q;
    case HeightRule::level_squared: return q * q;
    case HeightRule::scaled_level: return alpha_ * q;
    }
    return 0.0;
}

double PerformanceFamily::width(double q) const {
    return width_ == WidthRule::unit ? 1.0 : q;
}

double PerformanceFamily::support_bound(double q) const {
    if (!(q > 0.0)) {
        return 0.0;
    }
    switch (shape_) {
    case Shape::rectangle: return std::min(width(q), cap_);
    case Shape::staircase_line: return std::min(q, cap_);
    case Shape::power: return cap_;
    }
    return 0.0;
}

bool PerformanceFamily::has_bounded_support() const noexcept {
    return shape_ != Shape::power || std::isfinite(cap_);
}

double PerformanceFamily::operator()(double q, double x) const {
    if (!(q > 0.0) || !(x > 0.0) || x > support_bound(q)) {
        return 0.0;
    }
    switch (shape_) {
    case Shape::rectangle: return height(q);
    case Shape::staircase_line: return q + 1.0 - x;
    case Shape::power: return q / std::pow(x, beta_);
    }
    return 0.0;
}

bool PerformanceFamily::rank_satisfied(double q, std::size_t rank, double value) const {
    if (!(q > 0.0)) {
        return true;
    }
    const double x = static_cast<double>(rank);
    if (shape_ == Shape::power) {
        return x > cap_ || value * std::pow(x, beta_) >= q;
    }
    return value >= (*this)(q, x);
}

// ---------------------------------------------------------------------------
// Slope classification
// ---------------------------------------------------------------------------

std::string to_string(SlopeClass c) {
    switch (c) {
    case SlopeClass::slowly: return "slowly";
    case SlopeClass::fast: return "fast";
    case SlopeClass::linear: return "linear";
    case SlopeClass::neither: return "neither";
    }
    return "?";
}

SlopeClass family_slope_class(const PerformanceFamily& family, std::span<const double> q_grid,
                              std::span<const double> m_grid, std::span<const double> x_grid,
                              double tolerance) {
    bool slow = true;
    bool fast = true;
    for (double q : q_grid) {
        for (double m : m_grid) {
            for (double x : x_grid) {
                const double d = family(q + m, x) - family(q, x) - m;
                slow = slow && d <= tolerance;
                fast = fast && d >= -tolerance;
            }
        }
    }
    if (slow && fast) {
        return SlopeClass::linear;
    }
    if (slow) {
        return SlopeClass::slowly;
    }
    return fast ? SlopeClass::fast : SlopeClass::neither;
}

SlopeClass known_slope_class(const PerformanceFamily& family) {
    const bool integer_levels = family.levels() == LevelKind::integers;
    switch (family.shape()) {
    case Shape::power:
        // m / i^beta <= m at every rank i >= 1.
        return SlopeClass::slowly;
    case Shape::staircase_line:
        return integer_levels ? SlopeClass::slowly : SlopeClass::neither;
    case Shape::rectangle:
        break;
    }
    if (family.width_rule() == WidthRule::unit) {
        // Only rank 1 moves.
        switch (family.height_rule()) {
        case HeightRule::unit:
        case HeightRule::level: return SlopeClass::slowly;
        case HeightRule::scaled_level:
            return family.alpha() <= 1.0 ? SlopeClass::slowly : SlopeClass::neither;
        case HeightRule::level_squared: return SlopeClass::neither;
        }
    }
    if (family.height_rule() == HeightRule::unit) {
        // Ranks in (q, q + m] jump by 1, which is <= m only for integer steps.
        return integer_levels ? SlopeClass::slowly : SlopeClass::neither;
    }
    return SlopeClass::neither;
}

std::vector<double> left_continuity_check(const PerformanceFamily& family, double q, double x,
                                          std::span<const double> eps_sequence) {
    std::vector<double> residuals;
    residuals.reserve(eps_sequence.size());
    const double at_q = family(q, x);
    for (double eps : eps_sequence) {
        residuals.push_back(at_q - family(q - eps, x));
    }
    return residuals;
}

} // namespace srm
