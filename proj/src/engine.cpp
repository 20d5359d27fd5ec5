#include "srm/engine.hpp"

#include "srm/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace srm {

namespace {

std::string format_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

double parse_param(std::string_view text, std::string_view index) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v) || v <= 0.0) {
        throw LookupError("index '" + std::string(index) + "' needs a positive parameter, got '" +
                          std::string(text) + "'");
    }
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

// Largest q with g(q) <= value for a rectangle height rule.
double invert_height(const PerformanceFamily& family, double value) {
    switch (family.height_rule()) {
    case HeightRule::unit: return value >= 1.0 ? kInfinity : 0.0;
    case HeightRule::level: return value;
    case HeightRule::level_squared: return std::sqrt(value);
    case HeightRule::scaled_level: return value / family.alpha();
    }
    return 0.0;
}

std::size_t last_checked_rank(const CitationCurve& curve, const PerformanceFamily& family,
                              double q, DominanceDomain domain) {
    const std::size_t p = curve.publications();
    // f_q is nonincreasing in x and X is constant past p, so rank p + 1
    // stands for every rank beyond the stored entries.
    const std::size_t horizon = domain == DominanceDomain::author_support_only ? p : p + 1;
    const double s = std::floor(family.support_bound(q));
    if (!(s < static_cast<double>(horizon))) {
        return horizon;
    }
    return static_cast<std::size_t>(s);
}

} // namespace

// ---------------------------------------------------------------------------
// IndexSpec
// ---------------------------------------------------------------------------

IndexSpec IndexSpec::parse(std::string_view text) {
    text = trim(text);
    std::string_view base = text;
    std::string_view param;
    bool has_param = false;
    if (auto colon = text.find(':'); colon != std::string_view::npos) {
        base = trim(text.substr(0, colon));
        param = trim(text.substr(colon + 1));
        has_param = true;
    }

    auto plain = [&](IndexKind kind) {
        if (has_param) {
            throw LookupError("index '" + std::string(base) + "' takes no parameter");
        }
        return IndexSpec{kind, 0.0};
    };

    if (base == "c_max" || base == "cmax") return plain(IndexKind::c_max);
    if (base == "pubs") return plain(IndexKind::pubs);
    if (base == "h") return plain(IndexKind::h);
    if (base == "h2") return plain(IndexKind::h2);
    if (base == "w") return plain(IndexKind::w);
    if (base == "h_r" || base == "hr") return plain(IndexKind::h_r);
    if (base == "h-alpha" || base == "phi") {
        if (!has_param) {
            throw LookupError("index '" + std::string(base) + "' requires a parameter, e.g. '" +
                              std::string(base) + ":2'");
        }
        const auto kind = base == "phi" ? IndexKind::phi : IndexKind::h_alpha;
        return IndexSpec{kind, parse_param(param, base)};
    }
    throw LookupError("unknown index '" + std::string(text) + "'");
}

std::string IndexSpec::name() const {
    switch (kind) {
    case IndexKind::c_max: return "c_max";
    case IndexKind::pubs: return "pubs";
    case IndexKind::h: return "h";
    case IndexKind::h2: return "h2";
    case IndexKind::h_alpha: return "h-alpha:" + format_param(param);
    case IndexKind::w: return "w";
    case IndexKind::h_r: return "h_r";
    case IndexKind::phi: return "phi:" + format_param(param);
    }
    return "?";
}

PerformanceFamily IndexSpec::family() const {
    switch (kind) {
    case IndexKind::c_max: return PerformanceFamily::c_max();
    case IndexKind::pubs: return PerformanceFamily::publications();
    case IndexKind::h: return PerformanceFamily::h_index();
    case IndexKind::h2: return PerformanceFamily::h_squared();
    case IndexKind::h_alpha: return PerformanceFamily::h_alpha(param);
    case IndexKind::w: return PerformanceFamily::w_index();
    case IndexKind::h_r: return PerformanceFamily::h_real();
    case IndexKind::phi: return PerformanceFamily::power(param);
    }
    throw LookupError("unknown index kind");
}

std::vector<IndexSpec> standard_catalog() {
    return {
        {IndexKind::c_max, 0.0},   {IndexKind::pubs, 0.0},    {IndexKind::h, 0.0},
        {IndexKind::h2, 0.0},      {IndexKind::h_alpha, 0.5}, {IndexKind::h_alpha, 1.0},
        {IndexKind::h_alpha, 2.0}, {IndexKind::h_alpha, 3.0}, {IndexKind::w, 0.0},
        {IndexKind::h_r, 0.0},     {IndexKind::phi, 0.8},     {IndexKind::phi, 1.62},
        {IndexKind::phi, 2.5},
    };
}

// ---------------------------------------------------------------------------
// Dominance and search
// ---------------------------------------------------------------------------

DominancePolicy DominancePolicy::for_family(const PerformanceFamily& family) {
    return DominancePolicy{family.domain(), 1e-9};
}

bool dominates(const CitationCurve& curve, const PerformanceFamily& family, double q,
               const DominancePolicy& policy) {
    if (policy.domain == DominanceDomain::all_positive_ranks && !family.has_bounded_support()) {
        throw UnsupportedError("family '" + family.name() +
                               "' has unbounded support; use the author-support-only domain");
    }
    if (!(q > 0.0)) {
        return true;
    }
    const std::size_t last = last_checked_rank(curve, family, q, policy.domain);
    for (std::size_t i = 1; i <= last; ++i) {
        if (!family.rank_satisfied(q, i, curve.at_rank(i))) {
            return false;
        }
    }
    return true;
}

bool dominates(const CitationCurve& curve, const PerformanceFamily& family, double q) {
    return dominates(curve, family, q, DominancePolicy::for_family(family));
}

double level_ceiling(const CitationCurve& curve, const PerformanceFamily& family,
                     const DominancePolicy& policy) {
    if (curve.is_zero()) {
        return 0.0;
    }
    const bool support_only = policy.domain == DominanceDomain::author_support_only;
    const std::size_t p = curve.publications();
    if (support_only && p == 0) {
        return 0.0;
    }
    const bool integer_levels = family.levels() == LevelKind::integers;
    const double top = curve.peak();
    if (family.support_cap() < 1.0) {
        return kInfinity;
    }

    switch (family.shape()) {
    case Shape::power:
        return top;
    case Shape::staircase_line:
        return integer_levels ? std::floor(top) : std::max(1.0, top);
    case Shape::rectangle:
        break;
    }

    if (family.width_rule() == WidthRule::unit) {
        const double u = invert_height(family, top);
        return integer_levels ? std::floor(u) : u;
    }

    if (family.height_rule() == HeightRule::unit) {
        // Count the leading ranks with at least one citation.
        std::size_t covered = 0;
        while (covered < p && curve.at_rank(covered + 1) >= 1.0) {
            ++covered;
        }
        const bool all_covered =
            support_only ? covered == p : (covered == p && curve.tail() >= 1.0);
        if (all_covered || std::floor(family.support_cap()) <= static_cast<double>(covered)) {
            return kInfinity;
        }
        return integer_levels ? static_cast<double>(covered) : static_cast<double>(covered + 1);
    }

    const double u = invert_height(family, top);
    return integer_levels ? std::floor(u) : std::max(1.0, u);
}

double level_ceiling(const CitationCurve& curve, const PerformanceFamily& family) {
    return level_ceiling(curve, family, DominancePolicy::for_family(family));
}

SrmValue srm_generic(const CitationCurve& curve, const PerformanceFamily& family,
                     const DominancePolicy& policy) {
    if (policy.domain == DominanceDomain::all_positive_ranks && !family.has_bounded_support()) {
        throw UnsupportedError("family '" + family.name() +
                               "' has unbounded support; use the author-support-only domain");
    }
    const double ceiling = level_ceiling(curve, family, policy);
    if (ceiling == 0.0) {
        return {0.0, true};
    }
    if (std::isinf(ceiling)) {
        return {kInfinity, false};
    }
    auto feasible = [&](double q) { return dominates(curve, family, q, policy); };

    if (family.levels() == LevelKind::integers) {
        double lo = 0.0;
        double hi = std::floor(ceiling);
        if (feasible(hi)) {
            return {hi, true};
        }
        while (hi - lo > 1.0) {
            const double mid = std::floor(lo + (hi - lo) / 2.0);
            (feasible(mid) ? lo : hi) = mid;
        }
        return {lo, true};
    }

    if (feasible(ceiling)) {
        return {ceiling, true};
    }
    double lo = 0.0;
    double hi = ceiling;
    while (hi - lo > policy.tolerance) {
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) {
            break;
        }
        (feasible(mid) ? lo : hi) = mid;
    }
    return {lo, true};
}

SrmValue srm_generic(const CitationCurve& curve, const PerformanceFamily& family) {
    return srm_generic(curve, family, DominancePolicy::for_family(family));
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

std::size_t h_index(const CitationCurve& curve) {
    const auto x = curve.values();
    std::size_t h = 0;
    while (h < x.size() && x[h] >= static_cast<double>(h + 1)) {
        ++h;
    }
    return h;
}

SrmValue srm_closed_form(const CitationCurve& curve, const IndexSpec& index) {
    if (curve.tail() > 0.0) {
        return srm_generic(curve, index.family());
    }
    const auto x = curve.values();
    const std::size_t p = x.size();

    // Largest count k such that the first k entries pass `ok(i, x_i)`; the
    // entries are nonincreasing so the passing ranks form a prefix.
    auto leading = [&](auto ok) {
        std::size_t k = 0;
        while (k < p && ok(static_cast<double>(k + 1), x[k])) {
            ++k;
        }
        return static_cast<double>(k);
    };

    switch (index.kind) {
    case IndexKind::c_max:
        return {p ? x[0] : 0.0, true};
    case IndexKind::pubs:
        return {leading([](double, double v) { return v >= 1.0; }), true};
    case IndexKind::h:
        return {leading([](double i, double v) { return v >= i; }), true};
    case IndexKind::h2:
        return {leading([](double i, double v) { return v >= i * i; }), true};
    case IndexKind::h_alpha: {
        const double alpha = index.param;
        return {leading([alpha](double i, double v) { return v >= alpha * i; }), true};
    }
    case IndexKind::w: {
        std::size_t best = 0;
        for (std::size_t q = 1; q <= p; ++q) {
            bool ok = true;
            for (std::size_t i = 1; i <= q && ok; ++i) {
                ok = x[i - 1] >= static_cast<double>(q) + 1.0 - static_cast<double>(i);
            }
            if (ok) {
                best = q;
            }
        }
        return {static_cast<double>(best), true};
    }
    case IndexKind::h_r: {
        if (p == 0) {
            return {0.0, true};
        }
        const std::size_t h = h_index(curve);
        if (h == 0) {
            // Every q in (0, 1) checks no rank; q = 1 needs x_1 >= 1.
            return {1.0, false};
        }
        const double next = static_cast<double>(h + 1);
        const double xh = x[h - 1];
        return xh < next ? SrmValue{xh, true} : SrmValue{next, false};
    }
    case IndexKind::phi: {
        if (p == 0) {
            return {0.0, true};
        }
        double best = kInfinity;
        for (std::size_t i = 0; i < p; ++i) {
            best = std::min(best, x[i] * std::pow(static_cast<double>(i + 1), index.param));
        }
        return {best, true};
    }
    }
    throw LookupError("unknown index kind");
}

} // namespace srm
