#pragma once

#include "srm/curves.hpp"
#include "srm/engine.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace srm {

/// Uniform probability measure on (0, extent].
struct ReferenceMeasure {
    double extent = 1.0;

    explicit ReferenceMeasure(double n);
};

/// Nonnegative piecewise-constant density with unit mass under the uniform
/// reference measure. Cell k is the half-open interval
/// (breakpoints[k], breakpoints[k+1]] with height heights[k].
class DualDensity {
public:
    /// Validates breakpoints (strictly increasing, from 0) and unit mass
    /// (relative tolerance 1e-9).
    DualDensity(std::vector<double> breakpoints, std::vector<double> heights);

    static DualDensity uniform(double extent);
    /// (extent / (b - a)) * 1_(a, b].
    static DualDensity indicator(double a, double b, double extent);

    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    const std::vector<double>& heights() const noexcept { return heights_; }
    double extent() const noexcept { return breakpoints_.back(); }
    std::size_t cells() const noexcept { return heights_.size(); }

    /// Z(x).
    double operator()(double x) const noexcept;

    /// Same function with every cell split at `points`.
    DualDensity refined(const std::vector<double>& points) const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> heights_;
};

/// A density with the identifier used by gamma tables.
struct NamedDensity {
    std::string id;
    DualDensity density;
};

/// How performance curves enter dual integrals.
///   pointwise  f_q(x) itself.
///   rank_step  f_q(ceil(x)), the curve read at integer ranks. Pointwise
///              dominance of this curve is exactly the engine's dominance
///              test, so weak duality holds against srm_generic.
enum class CurveSampling { pointwise, rank_step };

/// E[Z X] under the reference measure, integrated exactly cell by cell.
double expected_value(const DualDensity& z, const CitationCurve& curve,
                      const ReferenceMeasure& mu);

/// gamma(Z, q) = E[Z f_q], exact per-shape antiderivatives. Returns +inf when
/// the power integral diverges at 0.
double gamma(const DualDensity& z, double q, const PerformanceFamily& family,
             const ReferenceMeasure& mu, CurveSampling sampling = CurveSampling::pointwise);

/// H+(Z, t) = sup{q : gamma(Z, q) <= t} over the family's level set.
///
/// Returns 0 when even q = 0 fails (t < 0), and +inf when gamma stays below t
/// for every probed level up to 2^60.
double h_plus(const DualDensity& z, double t, const PerformanceFamily& family,
              const ReferenceMeasure& mu, CurveSampling sampling = CurveSampling::pointwise,
              double tolerance = 1e-9);

/// Family whose curves enter the dual for `curve`: author-support-only
/// families are truncated to (0, p].
PerformanceFamily dual_family_for(const CitationCurve& curve, const PerformanceFamily& family);

/// min over candidates of H+(Z, E[Z X]); an upper bound on the true infimum.
double dual_value(const CitationCurve& curve, const PerformanceFamily& family,
                  const std::vector<DualDensity>& candidates, const ReferenceMeasure& mu,
                  CurveSampling sampling = CurveSampling::rank_step);

/// H+(Z, E[Z X]) - srm_generic(X). Uses rank-step sampling, so it is
/// nonnegative up to the search tolerance for every family.
double weak_duality_margin(const CitationCurve& curve, const PerformanceFamily& family,
                           const DualDensity& z, const ReferenceMeasure& mu);

/// Densities that attain (c_max, pubs) or approach (h) the dual infimum:
///   c_max  N * 1_(0,1]
///   pubs   (N / delta) * 1_(p, p + delta]
///   h      (N / delta) * 1_(h, h + delta]
DualDensity constructed_minimizer(IndexKind index, const CitationCurve& curve, double delta,
                                  const ReferenceMeasure& mu);

/// Gap between the dual value at the constructed minimizer and the index.
/// The h gap is evaluated on the h curves with real levels, read pointwise,
/// which shrinks with delta.
double minimizer_gap(IndexKind index, const CitationCurve& curve, double delta,
                     const ReferenceMeasure& mu);

/// Random unit-mass densities on (0, extent] with between 1 and max_cells
/// cells. Deterministic for a given seed.
std::vector<DualDensity> random_densities(std::size_t count, double extent, std::uint64_t seed,
                                          std::size_t max_cells = 8,
                                          double zero_neighbourhood = 0.0);

/// Integer-cell indicators, the constructed minimizers for `curve` that fit
/// in the measure, and `random_count` seeded random densities. With
/// zero_neighbourhood > 0 every candidate vanishes on (0, zero_neighbourhood].
std::vector<DualDensity> default_candidates(const CitationCurve& curve, double extent,
                                            std::uint64_t seed, std::size_t random_count = 32,
                                            double zero_neighbourhood = 0.0);

/// gamma_beta(Q) values keyed by candidate id and level beta.
class GammaTable {
public:
    void set(const std::string& candidate, double beta, double gamma);
    /// Throws LookupError naming (candidate, beta) when absent.
    double at(const std::string& candidate, double beta) const;
    bool contains(const std::string& candidate) const;
    /// Union of all levels present, increasing.
    std::vector<double> levels() const;
    const std::map<std::string, std::map<double, double>>& entries() const noexcept {
        return table_;
    }

    /// Rows `candidate_id,beta,gamma` with that header; gamma may be `inf`.
    static GammaTable from_csv(std::istream& in);
    void to_csv(std::ostream& out) const;

private:
    std::map<std::string, std::map<double, double>> table_;
};

/// gamma table computed from a family for each candidate and level.
GammaTable build_gamma_table(const PerformanceFamily& family,
                             const std::vector<NamedDensity>& candidates,
                             const std::vector<double>& levels, const ReferenceMeasure& mu,
                             CurveSampling sampling = CurveSampling::pointwise);

/// min over candidates Q of sup{beta : E_Q[X] >= gamma_beta(Q)}, -inf when some
/// candidate admits no level. Throws LookupError on a table gap and
/// ValidationError on a column that decreases in beta.
double robust_dual_srm(const CitationCurve& curve, const GammaTable& table,
                       const std::vector<NamedDensity>& candidates, const ReferenceMeasure& mu);

} // namespace srm
