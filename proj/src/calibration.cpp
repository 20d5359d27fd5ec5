#include "srm/calibration.hpp"

#include "srm/engine.hpp"
#include "srm/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace srm {

namespace {

constexpr const char* kProfileFormat = "srm-cohort-profile";
constexpr int kProfileVersion = 1;

} // namespace

CalibrationFit fit_author(const CitationCurve& curve, const std::string& author_id) {
    CalibrationFit fit;
    fit.author_id = author_id;

    std::vector<double> lx;
    std::vector<double> ly;
    const auto values = curve.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= 1.0) {
            lx.push_back(std::log(static_cast<double>(i + 1)));
            ly.push_back(std::log(values[i]));
        } else {
            ++fit.excluded;
        }
    }
    fit.n_points = lx.size();
    if (fit.n_points < 2) {
        throw InsufficientDataError("author '" + author_id + "' has " +
                                    std::to_string(fit.n_points) +
                                    " publications with at least one citation; need 2");
    }

    const double n = static_cast<double>(fit.n_points);
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= n;
    my /= n;

    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        const double dx = lx[k] - mx;
        const double dy = ly[k] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    fit.beta_hat = -slope;
    fit.q_hat = std::exp(intercept);

    double ss_res = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        const double r = ly[k] - (intercept + slope * lx[k]);
        ss_res += r * r;
    }
    // Constant data leaves only rounding noise in syy.
    if (syy <= 1e-24 * n * (1.0 + my * my) || ss_res == 0.0) {
        fit.r2 = 1.0;
    } else {
        fit.r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    }
    return fit;
}

CohortProfile aggregate_beta(std::vector<CalibrationFit> fits, BetaWeighting weighting) {
    if (fits.empty()) {
        throw ValidationError("cannot aggregate an empty list of fits");
    }
    double num = 0.0;
    double den = 0.0;
    for (const auto& f : fits) {
        const double w =
            weighting == BetaWeighting::by_points ? static_cast<double>(f.n_points) : 1.0;
        num += w * f.beta_hat;
        den += w;
    }
    CohortProfile profile;
    profile.beta_bar = num / den;
    profile.fits = std::move(fits);
    profile.metadata["weighting"] =
        weighting == BetaWeighting::by_points ? "by_points" : "unweighted";
    return profile;
}

SrmValue phi_index(const CitationCurve& curve, double beta_bar) {
    if (!(beta_bar > 0.0) || !std::isfinite(beta_bar)) {
        throw ValidationError("beta_bar must be positive");
    }
    double best = kInfinity;
    const auto x = curve.values();
    if (x.empty()) {
        return {0.0, true};
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        best = std::min(best, x[i] * std::pow(static_cast<double>(i + 1), beta_bar));
    }
    return {best, true};
}

CohortProfile calibrate_cohort(const std::vector<CitationCurve>& curves,
                               const std::vector<std::string>& ids, BetaWeighting weighting) {
    if (curves.size() != ids.size()) {
        throw ValidationError("curves and ids must have the same length");
    }
    if (curves.empty()) {
        throw ValidationError("cohort is empty");
    }
    std::vector<CalibrationFit> fits;
    std::vector<std::pair<std::string, std::string>> skipped;
    for (std::size_t k = 0; k < curves.size(); ++k) {
        try {
            fits.push_back(fit_author(curves[k], ids[k]));
        } catch (const InsufficientDataError& e) {
            skipped.emplace_back(ids[k], e.what());
        }
    }
    if (fits.empty()) {
        throw InsufficientDataError("no author in the cohort has enough data to fit");
    }
    CohortProfile profile = aggregate_beta(std::move(fits), weighting);
    profile.skipped = std::move(skipped);
    return profile;
}

std::string profile_to_json(const CohortProfile& profile) {
    nlohmann::ordered_json doc;
    doc["format"] = kProfileFormat;
    doc["version"] = kProfileVersion;
    doc["beta_bar"] = profile.beta_bar;
    doc["M"] = profile.cohort_size();
    auto& fits = doc["fits"] = nlohmann::ordered_json::array();
    for (const auto& f : profile.fits) {
        fits.push_back({{"author_id", f.author_id},
                        {"beta_hat", f.beta_hat},
                        {"q_hat", f.q_hat},
                        {"r2", f.r2},
                        {"n_points", f.n_points},
                        {"excluded", f.excluded}});
    }
    auto& skipped = doc["skipped"] = nlohmann::ordered_json::array();
    for (const auto& [id, reason] : profile.skipped) {
        skipped.push_back({{"author_id", id}, {"reason", reason}});
    }
    doc["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : profile.metadata) {
        doc["metadata"][k] = v;
    }
    return doc.dump(2) + "\n";
}

CohortProfile profile_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("profile: ") + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != kProfileFormat) {
            throw ParseError("profile: unexpected format tag");
        }
        if (doc.at("version").get<int>() != kProfileVersion) {
            throw ParseError("profile: unsupported version " +
                             std::to_string(doc.at("version").get<int>()));
        }
        CohortProfile profile;
        profile.beta_bar = doc.at("beta_bar").get<double>();
        for (const auto& f : doc.at("fits")) {
            CalibrationFit fit;
            fit.author_id = f.at("author_id").get<std::string>();
            fit.beta_hat = f.at("beta_hat").get<double>();
            fit.q_hat = f.at("q_hat").get<double>();
            fit.r2 = f.at("r2").get<double>();
            fit.n_points = f.at("n_points").get<std::size_t>();
            fit.excluded = f.value("excluded", std::size_t{0});
            profile.fits.push_back(std::move(fit));
        }
        if (doc.contains("skipped")) {
            for (const auto& s : doc.at("skipped")) {
                profile.skipped.emplace_back(s.at("author_id").get<std::string>(),
                                             s.at("reason").get<std::string>());
            }
        }
        if (doc.contains("metadata")) {
            for (const auto& [k, v] : doc.at("metadata").items()) {
                profile.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
            }
        }
        if (doc.at("M").get<std::size_t>() != profile.fits.size()) {
            throw ParseError("profile: M does not match the number of fits");
        }
        return profile;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("profile: ") + e.what());
    }
}

} // namespace srm
