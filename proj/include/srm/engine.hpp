#pragma once

#include "srm/curves.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace srm {

/// Indices with a closed form.
enum class IndexKind { c_max, pubs, h, h2, h_alpha, w, h_r, phi };

/// A catalog index together with its parameter (alpha for h-alpha, beta for
/// phi). Text form: `c_max`, `pubs`, `h`, `h2`, `h-alpha:2`, `w`, `h_r`,
/// `phi:1.62`.
struct IndexSpec {
    IndexKind kind = IndexKind::h;
    double param = 0.0;

    static IndexSpec parse(std::string_view text);
    std::string name() const;
    PerformanceFamily family() const;

    bool operator==(const IndexSpec&) const = default;
};

/// The catalog exercised by the property suites.
std::vector<IndexSpec> standard_catalog();

struct DominancePolicy {
    DominanceDomain domain = DominanceDomain::all_positive_ranks;
    double tolerance = 1e-9;

    /// The domain the family asks for, default tolerance.
    static DominancePolicy for_family(const PerformanceFamily& family);
};

/// X(i) >= f_q(i) at every integer rank of the policy domain.
///
/// All-positive-ranks checks i = 1..ceil(s(q)) reading X beyond p as the
/// tail; author-support-only checks i = 1..p. Throws UnsupportedError for
/// an unbounded family under all-positive-ranks.
bool dominates(const CitationCurve& curve, const PerformanceFamily& family, double q,
               const DominancePolicy& policy);
bool dominates(const CitationCurve& curve, const PerformanceFamily& family, double q);

/// A level U with dominates(q) false for every q > U (+inf when every level
/// is feasible). The zero curve has ceiling 0.
double level_ceiling(const CitationCurve& curve, const PerformanceFamily& family,
                     const DominancePolicy& policy);
double level_ceiling(const CitationCurve& curve, const PerformanceFamily& family);

/// sup{q : dominates(curve, family, q)} by monotone search.
///
/// Integer levels use binary search over [0, floor(U)]; real levels bisect
/// [0, U] until the bracket is narrower than the policy tolerance or the
/// endpoints are adjacent doubles, returning the feasible end.
SrmValue srm_generic(const CitationCurve& curve, const PerformanceFamily& family,
                     const DominancePolicy& policy);
SrmValue srm_generic(const CitationCurve& curve, const PerformanceFamily& family);

/// Closed-form value of a catalog index; falls back to srm_generic when the
/// curve has a positive tail.
SrmValue srm_closed_form(const CitationCurve& curve, const IndexSpec& index);

/// max{i : x_i >= i}.
std::size_t h_index(const CitationCurve& curve);

} // namespace srm
