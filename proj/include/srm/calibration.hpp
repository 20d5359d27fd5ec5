#pragma once

#include "srm/curves.hpp"

#include <map>
#include <string>
#include <vector>

namespace srm {

/// Published cohort-average exponent for one research area. A reference
/// value only; the underlying data is not available.
inline constexpr double kReportedBetaBar = 1.62;

/// Log-log least-squares fit ln x_i = ln q_hat - beta_hat ln i.
struct CalibrationFit {
    std::string author_id;
    double beta_hat = 0.0;
    double q_hat = 0.0;
    double r2 = 0.0;
    std::size_t n_points = 0;
    /// Publications with 0 < x_i < 1, left out of the fit.
    std::size_t excluded = 0;
};

enum class BetaWeighting { unweighted, by_points };

struct CohortProfile {
    double beta_bar = 0.0;
    std::vector<CalibrationFit> fits;
    /// Authors whose curve could not be fitted, with the reason.
    std::vector<std::pair<std::string, std::string>> skipped;
    std::map<std::string, std::string> metadata;

    std::size_t cohort_size() const noexcept { return fits.size(); }
};

/// Throws InsufficientDataError with fewer than two ranks carrying x_i >= 1.
CalibrationFit fit_author(const CitationCurve& curve, const std::string& author_id = {});

/// Throws ValidationError on an empty list.
CohortProfile aggregate_beta(std::vector<CalibrationFit> fits,
                             BetaWeighting weighting = BetaWeighting::unweighted);

/// min_{i=1..p} x_i * i^beta_bar; 0 for a curve without publications.
SrmValue phi_index(const CitationCurve& curve, double beta_bar);

/// Fits every author that has enough data and averages the exponents.
/// Throws InsufficientDataError when no author can be fitted.
CohortProfile calibrate_cohort(const std::vector<CitationCurve>& curves,
                               const std::vector<std::string>& ids,
                               BetaWeighting weighting = BetaWeighting::unweighted);

/// Versioned JSON document. Doubles are written with round-trip precision.
std::string profile_to_json(const CohortProfile& profile);
CohortProfile profile_from_json(const std::string& text);

} // namespace srm
