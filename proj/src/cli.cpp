#include "srm/cli.hpp"

#include "srm/calibration.hpp"
#include "srm/cohort.hpp"
#include "srm/duality.hpp"
#include "srm/engine.hpp"
#include "srm/error.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace srm::cli {

namespace {

using ojson = nlohmann::ordered_json;

struct ConfigFileError : Error {
    using Error::Error;
};

ojson number(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return ojson::parse(format_value(v));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Writes to a sibling temporary file and renames it over `path`.
void write_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw ParseError("cannot write '" + path + "'");
        }
        file << content;
        if (!file.flush()) {
            std::filesystem::remove(tmp);
            throw ParseError("cannot write '" + path + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

// Expands `--config FILE` into flags that the command line does not set.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) {
            path = args[k + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(k),
                       args.begin() + static_cast<std::ptrdiff_t>(k + 2));
            break;
        }
        if (args[k].rfind("--config=", 0) == 0) {
            path = args[k].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(k));
            break;
        }
    }
    if (path.empty()) {
        return args;
    }
    std::ifstream in(path);
    if (!in) {
        throw ConfigFileError("cannot open config file '" + path + "'");
    }
    auto given = [&](const std::string& flag) {
        return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
    };
    auto strip = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r\"");
        const auto e = s.find_last_not_of(" \t\r\"");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string trimmed = strip(line);
        if (trimmed.empty() || trimmed[0] == '#' || trimmed[0] == '[') {
            continue;
        }
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw ConfigFileError(path + ":" + std::to_string(number) + ": expected key=value");
        }
        std::string key = strip(trimmed.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        const std::string flag = "--" + key;
        if (!given(flag)) {
            args.push_back(flag + "=" + strip(trimmed.substr(eq + 1)));
        }
    }
    return args;
}

DataFormat output_format(const RunConfig& cfg) {
    if (cfg.format == "json") return DataFormat::json;
    if (cfg.format == "csv") return DataFormat::csv;
    return cfg.output.empty() ? DataFormat::csv : format_for_path(cfg.output);
}

std::vector<IndexSpec> resolve_indices(const std::vector<std::string>& names,
                                       const std::string& profile_path) {
    std::vector<IndexSpec> out;
    for (const auto& name : names) {
        if (name == "phi") {
            if (profile_path.empty()) {
                throw LookupError("index 'phi' without a parameter requires --profile");
            }
            const auto profile = profile_from_json(read_file(profile_path));
            out.push_back({IndexKind::phi, profile.beta_bar});
        } else {
            out.push_back(IndexSpec::parse(name));
        }
    }
    return out;
}

void cmd_compute(const RunConfig& cfg, std::ostream& out) {
    const auto records = ingest_file(cfg.input);
    const auto table = compute_table(records, resolve_indices(cfg.indices, cfg.profile));
    std::ostringstream ss;
    export_table(table, ss, output_format(cfg));
    write_output(cfg.output, ss.str(), out);
}

void cmd_calibrate(const RunConfig& cfg, const std::string& weighting,
                   const std::vector<std::string>& meta, std::ostream& out) {
    const auto records = ingest_file(cfg.input);
    std::vector<CitationCurve> curves;
    std::vector<std::string> ids;
    for (const auto& r : records) {
        curves.push_back(r.curve);
        ids.push_back(r.id);
    }
    auto profile = calibrate_cohort(
        curves, ids, weighting == "by_points" ? BetaWeighting::by_points : BetaWeighting::unweighted);
    for (const auto& kv : meta) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("--meta expects key=value, got '" + kv + "'");
        }
        profile.metadata[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    write_output(cfg.profile, profile_to_json(profile), out);
}

void cmd_rank(const RunConfig& cfg, std::ostream& out) {
    const auto records = ingest_file(cfg.input);
    const auto specs = resolve_indices(cfg.indices, cfg.profile);
    const auto table = compute_table(records, specs);
    const auto ranking = rank_authors(table, specs.front().name());
    const auto classes = classify_merit(ranking, cfg.cutoffs);

    std::ostringstream ss;
    if (output_format(cfg) == DataFormat::csv) {
        ss << "author_id,value,rank,class\n";
        for (std::size_t k = 0; k < ranking.size(); ++k) {
            ss << ranking[k].author << ',' << format_value(ranking[k].value) << ','
               << ranking[k].rank << ',' << classes.assignment[k].second << '\n';
        }
    } else {
        ojson doc;
        doc["index"] = specs.front().name();
        doc["cutoffs"] = ojson::array();
        for (double c : classes.cutoffs) {
            doc["cutoffs"].push_back(number(c));
        }
        doc["labels"] = classes.labels;
        auto& rows = doc["ranking"] = ojson::array();
        for (std::size_t k = 0; k < ranking.size(); ++k) {
            rows.push_back({{"author_id", ranking[k].author},
                            {"value", number(ranking[k].value)},
                            {"rank", ranking[k].rank},
                            {"class", classes.assignment[k].second}});
        }
        ss << doc.dump(2) << '\n';
    }
    write_output(cfg.output, ss.str(), out);
}

void cmd_dual_check(const RunConfig& cfg, std::ostream& out) {
    const auto records = ingest_file(cfg.input);
    const IndexSpec spec = resolve_indices(cfg.indices, cfg.profile).front();
    const PerformanceFamily family = spec.family();
    const bool has_minimizer = spec.kind == IndexKind::c_max || spec.kind == IndexKind::pubs ||
                               spec.kind == IndexKind::h;

    double max_delta = 0.0;
    for (double d : cfg.deltas) {
        if (!(d > 0.0)) {
            throw ValidationError("deltas must be positive");
        }
        max_delta = std::max(max_delta, d);
    }
    double longest = 1.0;
    for (const auto& r : records) {
        longest = std::max(longest, static_cast<double>(r.curve.publications()));
    }
    const double extent = cfg.extent ? *cfg.extent : std::ceil(longest + max_delta) + 1.0;
    const ReferenceMeasure mu(extent);
    const auto densities = random_densities(cfg.samples, extent, *cfg.seed);

    ojson doc;
    doc["index"] = spec.name();
    doc["extent"] = number(extent);
    doc["samples"] = cfg.samples;
    doc["seed"] = *cfg.seed;
    doc["deltas"] = ojson::array();
    for (double d : cfg.deltas) {
        doc["deltas"].push_back(number(d));
    }
    auto& authors = doc["authors"] = ojson::array();
    double worst_margin = kInfinity;
    double worst_gap = 0.0;
    std::size_t violations = 0;
    for (const auto& r : records) {
        ojson row;
        row["author_id"] = r.id;
        row["srm"] = number(srm_generic(r.curve, family).level);
        double min_margin = kInfinity;
        std::size_t bad = 0;
        for (const auto& z : densities) {
            const double m = weak_duality_margin(r.curve, family, z, mu);
            min_margin = std::min(min_margin, m);
            bad += m < -1e-9 ? 1 : 0;
        }
        row["min_margin"] = number(min_margin);
        row["violations"] = bad;
        worst_margin = std::min(worst_margin, min_margin);
        violations += bad;
        if (has_minimizer) {
            auto& gaps = row["minimizer_gaps"] = ojson::array();
            for (double d : cfg.deltas) {
                const double gap = minimizer_gap(spec.kind, r.curve, d, mu);
                worst_gap = std::max(worst_gap, std::abs(gap));
                gaps.push_back({{"delta", number(d)}, {"gap", number(gap)}});
            }
        }
        authors.push_back(std::move(row));
    }
    doc["summary"] = {{"min_margin", number(worst_margin)},
                      {"violations", violations},
                      {"max_abs_minimizer_gap", has_minimizer ? number(worst_gap) : ojson()}};
    write_output(cfg.output, doc.dump(2) + "\n", out);
}

} // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    std::string index;
    std::string weighting = "unweighted";
    std::vector<std::string> meta;

    CLI::App app{"Citation-based research performance measures", "srm"};
    app.require_subcommand(1);

    auto* compute = app.add_subcommand("compute", "Compute an index table for a cohort");
    compute->add_option("--input", cfg.input, "Cohort file (.csv or .json)")->required();
    compute->add_option("--indices", cfg.indices, "Comma-separated index names, e.g. h,w,phi:1.62")
        ->required()
        ->delimiter(',');
    compute->add_option("--output", cfg.output, "Output file (stdout when omitted)");
    compute->add_option("--format", cfg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    compute->add_option("--profile", cfg.profile, "Cohort profile supplying beta for 'phi'");

    auto* calibrate = app.add_subcommand("calibrate", "Fit the cohort power-law profile");
    calibrate->add_option("--input", cfg.input, "Cohort file (.csv or .json)")->required();
    calibrate->add_option("--profile", cfg.profile, "Profile JSON to write")->required();
    calibrate->add_option("--weighting", weighting, "unweighted (default) or by_points")
        ->check(CLI::IsMember({"unweighted", "by_points"}));
    calibrate->add_option("--meta", meta, "Profile metadata as key=value (repeatable)");

    auto* rank = app.add_subcommand("rank", "Rank a cohort and assign merit classes");
    rank->add_option("--input", cfg.input, "Cohort file (.csv or .json)")->required();
    rank->add_option("--index", index, "Index to rank by")->required();
    rank->add_option("--profile", cfg.profile, "Cohort profile supplying beta for 'phi'");
    rank->add_option("--classes", cfg.cutoffs, "Class cutoffs as fractions, e.g. 0.1,0.3")
        ->delimiter(',');
    rank->add_option("--output", cfg.output, "Output file (stdout when omitted)");
    rank->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* dual = app.add_subcommand("dual-check", "Check weak duality and constructed minimizers");
    dual->add_option("--input", cfg.input, "Cohort file (.csv or .json)")->required();
    dual->add_option("--index", index, "Index to check")->required();
    dual->add_option("--deltas", cfg.deltas, "Minimizer widths, e.g. 1,0.1,0.01")
        ->required()
        ->delimiter(',');
    dual->add_option("--samples", cfg.samples, "Random densities per author")->required();
    dual->add_option("--seed", cfg.seed, "Random seed")->required();
    dual->add_option("--extent", cfg.extent, "Reference measure extent N");
    dual->add_option("--profile", cfg.profile, "Cohort profile supplying beta for 'phi'");
    dual->add_option("--output", cfg.output, "Output file (stdout when omitted)");

    try {
        std::vector<std::string> args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        for (auto* sub : app.get_subcommands()) {
            out << sub->help();
        }
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "srm: " << e.what() << "\n" << "Run with --help for usage.\n";
        return kExitUsage;
    } catch (const ConfigFileError& e) {
        err << "srm: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (rank->parsed() || dual->parsed()) {
            cfg.indices = {index};
        }
        if (compute->parsed()) {
            cfg.subcommand = "compute";
            cmd_compute(cfg, out);
        } else if (calibrate->parsed()) {
            cfg.subcommand = "calibrate";
            cmd_calibrate(cfg, weighting, meta, out);
        } else if (rank->parsed()) {
            cfg.subcommand = "rank";
            if (cfg.cutoffs.empty()) {
                cfg.cutoffs = kDefaultCutoffs;
            }
            cmd_rank(cfg, out);
        } else if (dual->parsed()) {
            cfg.subcommand = "dual-check";
            cmd_dual_check(cfg, out);
        }
    } catch (const LookupError& e) {
        err << "srm: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "srm: " << e.what() << "\n";
        return kExitDataError;
    }
    return kExitOk;
}

} // namespace srm::cli
