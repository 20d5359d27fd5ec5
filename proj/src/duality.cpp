#include "srm/duality.hpp"

#include "srm/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace srm {

namespace {

constexpr double kLevelLimit = 1152921504606846976.0; // 2^60

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string fmt_exact(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Integral of the performance curve over (a, b], a < b.
double curve_integral(const PerformanceFamily& family, double q, double a, double b,
                      CurveSampling sampling) {
    if (!(q > 0.0)) {
        return 0.0;
    }
    const double s = family.support_bound(q);

    if (sampling == CurveSampling::rank_step) {
        // f_q(ceil(x)) is nonzero exactly on (0, floor(s)].
        const double top = std::min(b, std::floor(s));
        if (top <= a) {
            return 0.0;
        }
        if (family.shape() == Shape::rectangle) {
            return family.height(q) * (top - a);
        }
        double total = 0.0;
        const auto first = static_cast<std::size_t>(std::floor(a)) + 1;
        const auto last = static_cast<std::size_t>(std::ceil(top));
        for (std::size_t i = first; i <= last; ++i) {
            const double lo = std::max(a, static_cast<double>(i - 1));
            const double hi = std::min(top, static_cast<double>(i));
            if (hi > lo) {
                total += family(q, static_cast<double>(i)) * (hi - lo);
            }
        }
        return total;
    }

    const double hi = std::min(b, s);
    if (hi <= a) {
        return 0.0;
    }
    switch (family.shape()) {
    case Shape::rectangle:
        return family.height(q) * (hi - a);
    case Shape::staircase_line:
        return (q + 1.0) * (hi - a) - (hi * hi - a * a) / 2.0;
    case Shape::power: {
        const double beta = family.beta();
        if (a == 0.0) {
            if (beta >= 1.0) {
                return kInfinity;
            }
            return q * std::pow(hi, 1.0 - beta) / (1.0 - beta);
        }
        if (beta == 1.0) {
            return q * std::log(hi / a);
        }
        return q * (std::pow(hi, 1.0 - beta) - std::pow(a, 1.0 - beta)) / (1.0 - beta);
    }
    }
    return 0.0;
}

} // namespace

// ---------------------------------------------------------------------------
// Measure and densities
// ---------------------------------------------------------------------------

ReferenceMeasure::ReferenceMeasure(double n) : extent(n) {
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw ValidationError("measure extent must be positive and finite, got " + fmt(n));
    }
}

DualDensity::DualDensity(std::vector<double> breakpoints, std::vector<double> heights)
    : breakpoints_(std::move(breakpoints)), heights_(std::move(heights)) {
    if (breakpoints_.size() < 2 || heights_.size() + 1 != breakpoints_.size()) {
        throw ValidationError("density needs k+1 breakpoints for k >= 1 cells");
    }
    if (breakpoints_.front() != 0.0) {
        throw ValidationError("density breakpoints must start at 0");
    }
    double mass = 0.0;
    for (std::size_t k = 0; k < heights_.size(); ++k) {
        const double a = breakpoints_[k];
        const double b = breakpoints_[k + 1];
        if (!(b > a) || !std::isfinite(b)) {
            throw ValidationError("density breakpoints must be finite and strictly increasing");
        }
        if (!(heights_[k] >= 0.0) || !std::isfinite(heights_[k])) {
            throw ValidationError("density height of cell " + std::to_string(k) +
                                  " must be finite and nonnegative");
        }
        mass += heights_[k] * (b - a);
    }
    mass /= extent();
    if (std::abs(mass - 1.0) > 1e-9) {
        throw ValidationError("density must have unit mass, got " + fmt(mass));
    }
}

DualDensity DualDensity::uniform(double extent) {
    return DualDensity({0.0, extent}, {1.0});
}

DualDensity DualDensity::indicator(double a, double b, double extent) {
    if (!(a >= 0.0 && a < b && b <= extent)) {
        throw ValidationError("indicator interval (" + fmt(a) + ", " + fmt(b) +
                              "] must lie inside (0, " + fmt(extent) + "]");
    }
    std::vector<double> breaks{0.0};
    std::vector<double> heights;
    if (a > 0.0) {
        breaks.push_back(a);
        heights.push_back(0.0);
    }
    breaks.push_back(b);
    heights.push_back(extent / (b - a));
    if (b < extent) {
        breaks.push_back(extent);
        heights.push_back(0.0);
    }
    return DualDensity(std::move(breaks), std::move(heights));
}

double DualDensity::operator()(double x) const noexcept {
    if (!(x > 0.0) || x > extent()) {
        return 0.0;
    }
    const auto it = std::lower_bound(breakpoints_.begin() + 1, breakpoints_.end(), x);
    return heights_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

DualDensity DualDensity::refined(const std::vector<double>& points) const {
    std::vector<double> breaks = breakpoints_;
    for (double p : points) {
        if (p > 0.0 && p < extent()) {
            breaks.push_back(p);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::vector<double> heights;
    heights.reserve(breaks.size() - 1);
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        heights.push_back((*this)(breaks[k + 1]));
    }
    return DualDensity(std::move(breaks), std::move(heights));
}

// ---------------------------------------------------------------------------
// Integrals
// ---------------------------------------------------------------------------

double expected_value(const DualDensity& z, const CitationCurve& curve,
                      const ReferenceMeasure& mu) {
    const auto& br = z.breakpoints();
    const auto& hz = z.heights();
    const double p = static_cast<double>(curve.publications());
    double total = 0.0;
    for (std::size_t k = 0; k < hz.size(); ++k) {
        if (hz[k] == 0.0) {
            continue;
        }
        const double a = br[k];
        const double b = br[k + 1];
        double integral = 0.0;
        const double ranked_top = std::min(b, p);
        if (ranked_top > a) {
            const auto first = static_cast<std::size_t>(std::floor(a)) + 1;
            const auto last = static_cast<std::size_t>(std::ceil(ranked_top));
            for (std::size_t i = first; i <= last; ++i) {
                const double lo = std::max(a, static_cast<double>(i - 1));
                const double hi = std::min(ranked_top, static_cast<double>(i));
                if (hi > lo) {
                    integral += curve.at_rank(i) * (hi - lo);
                }
            }
        }
        if (b > p && curve.tail() > 0.0) {
            integral += curve.tail() * (b - std::max(a, p));
        }
        total += hz[k] * integral;
    }
    return total / mu.extent;
}

double gamma(const DualDensity& z, double q, const PerformanceFamily& family,
             const ReferenceMeasure& mu, CurveSampling sampling) {
    const auto& br = z.breakpoints();
    const auto& hz = z.heights();
    double total = 0.0;
    for (std::size_t k = 0; k < hz.size(); ++k) {
        if (hz[k] == 0.0) {
            continue;
        }
        const double integral = curve_integral(family, q, br[k], br[k + 1], sampling);
        if (std::isinf(integral)) {
            return kInfinity;
        }
        total += hz[k] * integral;
    }
    return total / mu.extent;
}

double h_plus(const DualDensity& z, double t, const PerformanceFamily& family,
              const ReferenceMeasure& mu, CurveSampling sampling, double tolerance) {
    auto feasible = [&](double q) { return gamma(z, q, family, mu, sampling) <= t; };
    if (!feasible(0.0)) {
        return 0.0;
    }
    double lo = 0.0;
    double hi = 1.0;
    while (feasible(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > kLevelLimit) {
            return kInfinity;
        }
    }
    if (family.levels() == LevelKind::integers) {
        while (hi - lo > 1.0) {
            const double mid = std::floor(lo + (hi - lo) / 2.0);
            (feasible(mid) ? lo : hi) = mid;
        }
        return lo;
    }
    while (hi - lo > tolerance) {
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) {
            break;
        }
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

// ---------------------------------------------------------------------------
// Dual values
// ---------------------------------------------------------------------------

PerformanceFamily dual_family_for(const CitationCurve& curve, const PerformanceFamily& family) {
    if (family.domain() == DominanceDomain::author_support_only) {
        return family.with_support_cap(static_cast<double>(curve.publications()))
            .with_domain(DominanceDomain::all_positive_ranks);
    }
    return family;
}

double dual_value(const CitationCurve& curve, const PerformanceFamily& family,
                  const std::vector<DualDensity>& candidates, const ReferenceMeasure& mu,
                  CurveSampling sampling) {
    if (candidates.empty()) {
        throw ValidationError("dual_value needs at least one candidate density");
    }
    const PerformanceFamily dual = dual_family_for(curve, family);
    double best = kInfinity;
    for (const auto& z : candidates) {
        best = std::min(best, h_plus(z, expected_value(z, curve, mu), dual, mu, sampling));
    }
    return best;
}

double weak_duality_margin(const CitationCurve& curve, const PerformanceFamily& family,
                           const DualDensity& z, const ReferenceMeasure& mu) {
    const PerformanceFamily dual = dual_family_for(curve, family);
    const double upper =
        h_plus(z, expected_value(z, curve, mu), dual, mu, CurveSampling::rank_step);
    const double level = srm_generic(curve, family).level;
    if (std::isinf(upper) && std::isinf(level)) {
        return 0.0;
    }
    return upper - level;
}

DualDensity constructed_minimizer(IndexKind index, const CitationCurve& curve, double delta,
                                  const ReferenceMeasure& mu) {
    if (!(delta > 0.0)) {
        throw ValidationError("delta must be positive, got " + fmt(delta));
    }
    switch (index) {
    case IndexKind::c_max:
        return DualDensity::indicator(0.0, 1.0, mu.extent);
    case IndexKind::pubs: {
        if (curve.tail() > 0.0) {
            throw UnsupportedError("pubs minimizer requires a curve with finite support");
        }
        const double p = static_cast<double>(curve.publications());
        return DualDensity::indicator(p, p + delta, mu.extent);
    }
    case IndexKind::h: {
        const double h = static_cast<double>(h_index(curve));
        return DualDensity::indicator(h, h + delta, mu.extent);
    }
    default:
        break;
    }
    throw UnsupportedError("no constructed minimizer for this index; supported: c_max, pubs, h");
}

double minimizer_gap(IndexKind index, const CitationCurve& curve, double delta,
                     const ReferenceMeasure& mu) {
    const DualDensity z = constructed_minimizer(index, curve, delta, mu);
    const IndexSpec spec{index, 0.0};
    PerformanceFamily family = spec.family();
    if (index == IndexKind::h) {
        family = family.with_levels(LevelKind::reals);
    }
    const double upper =
        h_plus(z, expected_value(z, curve, mu), family, mu, CurveSampling::pointwise);
    return upper - srm_closed_form(curve, spec).level;
}

std::vector<DualDensity> random_densities(std::size_t count, double extent, std::uint64_t seed,
                                          std::size_t max_cells, double zero_neighbourhood) {
    if (!(zero_neighbourhood >= 0.0 && zero_neighbourhood < extent)) {
        throw ValidationError("zero neighbourhood must lie in [0, extent)");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> cell_count(1, std::max<std::size_t>(1, max_cells));
    std::uniform_real_distribution<double> cut(zero_neighbourhood, extent);
    std::exponential_distribution<double> weight(1.0);
    std::bernoulli_distribution empty_cell(0.2);

    std::vector<DualDensity> out;
    out.reserve(count);
    while (out.size() < count) {
        const std::size_t k = cell_count(rng);
        std::vector<double> breaks{0.0, extent};
        if (zero_neighbourhood > 0.0) {
            breaks.push_back(zero_neighbourhood);
        }
        for (std::size_t j = 1; j < k; ++j) {
            breaks.push_back(cut(rng));
        }
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

        std::vector<double> weights(breaks.size() - 1);
        double mass = 0.0;
        for (std::size_t j = 0; j < weights.size(); ++j) {
            const bool blocked = breaks[j + 1] <= zero_neighbourhood;
            weights[j] = blocked || empty_cell(rng) ? 0.0 : weight(rng);
            mass += weights[j] * (breaks[j + 1] - breaks[j]);
        }
        if (!(mass > 0.0)) {
            continue;
        }
        mass /= extent;
        for (double& w : weights) {
            w /= mass;
        }
        out.emplace_back(std::move(breaks), std::move(weights));
    }
    return out;
}

std::vector<DualDensity> default_candidates(const CitationCurve& curve, double extent,
                                            std::uint64_t seed, std::size_t random_count,
                                            double zero_neighbourhood) {
    const ReferenceMeasure mu(extent);
    std::vector<DualDensity> out;
    for (double i = 1.0; i <= extent; i += 1.0) {
        if (i - 1.0 >= zero_neighbourhood) {
            out.push_back(DualDensity::indicator(i - 1.0, i, extent));
        }
    }
    if (zero_neighbourhood == 0.0 && extent >= 1.0) {
        out.push_back(constructed_minimizer(IndexKind::c_max, curve, 1.0, mu));
    }
    for (IndexKind kind : {IndexKind::pubs, IndexKind::h}) {
        const double start = static_cast<double>(
            kind == IndexKind::pubs ? curve.publications() : h_index(curve));
        const double delta = std::min(1.0, extent - start);
        if (delta > 0.0 && start >= zero_neighbourhood && curve.tail() == 0.0) {
            out.push_back(constructed_minimizer(kind, curve, delta, mu));
        }
    }
    auto extra = random_densities(random_count, extent, seed, 8, zero_neighbourhood);
    out.insert(out.end(), std::make_move_iterator(extra.begin()),
               std::make_move_iterator(extra.end()));
    return out;
}

// ---------------------------------------------------------------------------
// Gamma tables and the robust dual measure
// ---------------------------------------------------------------------------

void GammaTable::set(const std::string& candidate, double beta, double gamma) {
    table_[candidate][beta] = gamma;
}

double GammaTable::at(const std::string& candidate, double beta) const {
    const auto row = table_.find(candidate);
    if (row != table_.end()) {
        const auto cell = row->second.find(beta);
        if (cell != row->second.end()) {
            return cell->second;
        }
    }
    throw LookupError("gamma table has no entry for candidate '" + candidate + "' at beta " +
                      fmt(beta));
}

bool GammaTable::contains(const std::string& candidate) const {
    return table_.count(candidate) != 0;
}

std::vector<double> GammaTable::levels() const {
    std::vector<double> out;
    for (const auto& [id, column] : table_) {
        for (const auto& [beta, g] : column) {
            out.push_back(beta);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

GammaTable GammaTable::from_csv(std::istream& in) {
    auto parse_number = [](std::string_view s, std::size_t line) {
        if (s == "inf" || s == "+inf") {
            return kInfinity;
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || std::isnan(v)) {
            throw ParseError("not a number: '" + std::string(s) + "'", line);
        }
        return v;
    };

    GammaTable table;
    std::string line;
    std::size_t number = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (!header) {
            if (line != "candidate_id,beta,gamma") {
                throw ParseError("expected header 'candidate_id,beta,gamma'", number);
            }
            header = true;
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
            throw ParseError("expected 3 fields", number);
        }
        const std::string id = line.substr(0, c1);
        if (id.empty()) {
            throw ParseError("empty candidate_id", number);
        }
        const std::string_view view(line);
        const double beta = parse_number(view.substr(c1 + 1, c2 - c1 - 1), number);
        const double g = parse_number(view.substr(c2 + 1), number);
        if (std::isinf(beta) || g < 0.0) {
            throw ParseError("beta must be finite and gamma nonnegative", number);
        }
        table.set(id, beta, g);
    }
    if (!header) {
        throw ParseError("empty gamma table");
    }
    return table;
}

void GammaTable::to_csv(std::ostream& out) const {
    out << "candidate_id,beta,gamma\n";
    for (const auto& [id, column] : table_) {
        for (const auto& [beta, g] : column) {
            out << id << ',' << fmt_exact(beta) << ',' << fmt_exact(g) << '\n';
        }
    }
}

GammaTable build_gamma_table(const PerformanceFamily& family,
                             const std::vector<NamedDensity>& candidates,
                             const std::vector<double>& levels, const ReferenceMeasure& mu,
                             CurveSampling sampling) {
    GammaTable table;
    for (const auto& c : candidates) {
        for (double beta : levels) {
            table.set(c.id, beta, gamma(c.density, beta, family, mu, sampling));
        }
    }
    return table;
}

double robust_dual_srm(const CitationCurve& curve, const GammaTable& table,
                       const std::vector<NamedDensity>& candidates, const ReferenceMeasure& mu) {
    if (candidates.empty()) {
        throw ValidationError("robust_dual_srm needs at least one candidate");
    }
    const std::vector<double> grid = table.levels();
    if (grid.empty()) {
        throw LookupError("gamma table is empty");
    }
    double result = kInfinity;
    for (const auto& c : candidates) {
        const double average = expected_value(c.density, curve, mu);
        double best = -kInfinity;
        double previous = -kInfinity;
        for (double beta : grid) {
            const double g = table.at(c.id, beta);
            if (g < previous) {
                throw ValidationError("gamma column for candidate '" + c.id +
                                      "' decreases at beta " + fmt(beta));
            }
            previous = g;
            if (average >= g) {
                best = beta;
            }
        }
        result = std::min(result, best);
    }
    return result;
}

} // namespace srm
