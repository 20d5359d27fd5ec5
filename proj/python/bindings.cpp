#include "srm/calibration.hpp"
#include "srm/cli.hpp"
#include "srm/cohort.hpp"
#include "srm/duality.hpp"
#include "srm/engine.hpp"
#include "srm/error.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace srm;

namespace {

IndexSpec spec_of(const std::string& name) { return IndexSpec::parse(name); }

PerformanceFamily family_of(const std::string& name) { return spec_of(name).family(); }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sup-level performance indices over citation curves";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_ValueError);
    py::register_exception<InsufficientDataError>(m, "InsufficientDataError", PyExc_ValueError);
    py::register_exception<LookupError>(m, "LookupError", PyExc_KeyError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    m.attr("REPORTED_BETA_BAR") = kReportedBetaBar;

    py::class_<SrmValue>(m, "SrmValue")
        .def_readonly("level", &SrmValue::level)
        .def_readonly("attained", &SrmValue::attained)
        .def("__float__", [](const SrmValue& v) { return v.level; })
        .def("__repr__", [](const SrmValue& v) {
            std::ostringstream ss;
            ss << "SrmValue(level=" << v.level << ", attained=" << (v.attained ? "True" : "False")
               << ")";
            return ss.str();
        });

    py::class_<CitationCurve>(m, "CitationCurve")
        .def(py::init<>())
        .def_property_readonly("values", [](const CitationCurve& c) {
            return std::vector<double>(c.values().begin(), c.values().end());
        })
        .def_property_readonly("tail", &CitationCurve::tail)
        .def_property_readonly("publications", &CitationCurve::publications)
        .def("at_rank", &CitationCurve::at_rank)
        .def("__call__", &CitationCurve::operator())
        .def("__eq__", [](const CitationCurve& a, const CitationCurve& b) { return a == b; })
        .def("__repr__", [](const CitationCurve& c) { return "CitationCurve(" + to_string(c) + ")"; });

    py::class_<PerformanceFamily>(m, "PerformanceFamily")
        .def_static("from_index", &family_of, py::arg("name"))
        .def_property_readonly("name", &PerformanceFamily::name)
        .def("__call__", &PerformanceFamily::operator(), py::arg("q"), py::arg("x"));

    py::class_<DualDensity>(m, "DualDensity")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("breakpoints"),
             py::arg("heights"))
        .def_static("uniform", &DualDensity::uniform)
        .def_static("indicator", &DualDensity::indicator, py::arg("a"), py::arg("b"),
                    py::arg("extent"))
        .def_property_readonly("breakpoints", &DualDensity::breakpoints)
        .def_property_readonly("heights", &DualDensity::heights)
        .def("__call__", &DualDensity::operator());

    py::class_<CalibrationFit>(m, "CalibrationFit")
        .def_readonly("author_id", &CalibrationFit::author_id)
        .def_readonly("beta_hat", &CalibrationFit::beta_hat)
        .def_readonly("q_hat", &CalibrationFit::q_hat)
        .def_readonly("r2", &CalibrationFit::r2)
        .def_readonly("n_points", &CalibrationFit::n_points)
        .def_readonly("excluded", &CalibrationFit::excluded);

    py::class_<CohortProfile>(m, "CohortProfile")
        .def_readonly("beta_bar", &CohortProfile::beta_bar)
        .def_readonly("fits", &CohortProfile::fits)
        .def_readonly("skipped", &CohortProfile::skipped)
        .def_readwrite("metadata", &CohortProfile::metadata)
        .def("to_json", &profile_to_json)
        .def_static("from_json", &profile_from_json);

    m.def("construct_curve", &construct_curve, py::arg("values"), py::arg("tail") = 0.0);
    m.def("shift_citations", &shift_citations, py::arg("curve"), py::arg("m"));
    m.def("append_publication", &append_publication, py::arg("curve"));
    m.def("mix", &mix, py::arg("a"), py::arg("b"), py::arg("lam"));

    m.def("standard_catalog", [] {
        std::vector<std::string> names;
        for (const auto& s : standard_catalog()) {
            names.push_back(s.name());
        }
        return names;
    });
    m.def(
        "compute_index",
        [](const CitationCurve& c, const std::string& index) { return srm_closed_form(c, spec_of(index)); },
        py::arg("curve"), py::arg("index"), "Closed-form value of a catalog index, e.g. 'h' or 'phi:1.62'.");
    m.def(
        "srm_generic",
        [](const CitationCurve& c, const std::string& index) {
            return srm_generic(c, family_of(index));
        },
        py::arg("curve"), py::arg("index"));
    m.def("phi_index", &phi_index, py::arg("curve"), py::arg("beta_bar") = kReportedBetaBar);

    m.def(
        "expected_value",
        [](const DualDensity& z, const CitationCurve& c) {
            return expected_value(z, c, ReferenceMeasure(z.extent()));
        },
        py::arg("z"), py::arg("curve"));
    m.def(
        "gamma",
        [](const DualDensity& z, double q, const std::string& index) {
            return gamma(z, q, family_of(index), ReferenceMeasure(z.extent()));
        },
        py::arg("z"), py::arg("q"), py::arg("index"));
    m.def(
        "h_plus",
        [](const DualDensity& z, double t, const std::string& index) {
            return h_plus(z, t, family_of(index), ReferenceMeasure(z.extent()));
        },
        py::arg("z"), py::arg("t"), py::arg("index"));
    m.def(
        "dual_value",
        [](const CitationCurve& c, const std::string& index, const std::vector<DualDensity>& zs) {
            if (zs.empty()) {
                throw ValidationError("at least one density is required");
            }
            return dual_value(c, family_of(index), zs, ReferenceMeasure(zs.front().extent()));
        },
        py::arg("curve"), py::arg("index"), py::arg("candidates"));
    m.def(
        "weak_duality_margin",
        [](const CitationCurve& c, const std::string& index, const DualDensity& z) {
            return weak_duality_margin(c, family_of(index), z, ReferenceMeasure(z.extent()));
        },
        py::arg("curve"), py::arg("index"), py::arg("z"));
    m.def(
        "minimizer_gap",
        [](const std::string& index, const CitationCurve& c, double delta, double extent) {
            return minimizer_gap(spec_of(index).kind, c, delta, ReferenceMeasure(extent));
        },
        py::arg("index"), py::arg("curve"), py::arg("delta"), py::arg("extent"));

    m.def("fit_author", &fit_author, py::arg("curve"), py::arg("author_id") = "");
    m.def(
        "calibrate_cohort",
        [](const std::vector<CitationCurve>& curves, const std::vector<std::string>& ids) {
            return calibrate_cohort(curves, ids);
        },
        py::arg("curves"), py::arg("ids"));

    m.def(
        "rank_authors",
        [](const std::map<std::string, CitationCurve>& cohort, const std::string& index) {
            std::vector<AuthorRecord> records;
            for (const auto& [id, curve] : cohort) {
                records.push_back({id, curve, {}});
            }
            const auto spec = spec_of(index);
            const auto table = compute_table(records, {spec});
            std::vector<std::tuple<std::string, double, std::size_t>> out;
            for (const auto& e : rank_authors(table, spec.name())) {
                out.emplace_back(e.author, e.value, e.rank);
            }
            return out;
        },
        py::arg("cohort"), py::arg("index"),
        "(author, value, rank) triples, best first, competition ranking on ties.");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line front end in process: (exit code, stdout, stderr).");
}
