#include "abstat/config.hpp"
#include "abstat/corpus.hpp"
#include "abstat/engine.hpp"
#include "abstat/invariants.hpp"
#include "abstat/io.hpp"
#include "abstat/montecarlo.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace abstat;

namespace {

// configs cross the boundary as JSON text; results come back as plain dicts
nlohmann::json fromJsonText(const std::string& text) { return nlohmann::json::parse(text); }

py::dict pointDict(const SeriesPoint& pt) {
    py::dict d;
    d["n"] = pt.n;
    d["alpha"] = pt.lo.get_str();
    d["beta"] = pt.hi.get_str();
    d["width"] = pt.width.get_str();
    if (pt.count) d["count"] = pt.count->get_str();
    d["density"] = pt.density;
    if (pt.cesaroLo) d["cesaro_lo"] = *pt.cesaroLo;
    if (pt.cesaroHi) d["cesaro_hi"] = *pt.cesaroHi;
    d["backend"] = toString(pt.backend);
    return d;
}

py::dict seriesDict(const DiagnosticSeries& s) {
    py::dict d;
    d["mode"] = toString(s.mode);
    if (s.candidate) d["candidate"] = *s.candidate;
    if (s.gridX) d["x"] = *s.gridX;
    py::list pts;
    for (const auto& pt : s.points) pts.append(pointDict(pt));
    d["points"] = pts;
    d["csv"] = seriesCsv(s);
    return d;
}

py::dict verdictDict(const Verdict& v) {
    py::dict d;
    d["mode"] = toString(v.mode);
    d["decision"] = toString(v.decision);
    if (v.candidate) d["candidate"] = *v.candidate;
    d["tailMax"] = v.tailMax;
    d["tailMin"] = v.tailMin;
    d["trend"] = toString(v.trend);
    d["slope"] = v.slope;
    d["horizonUsed"] = v.horizonUsed;
    return d;
}

struct PyRun {
    RunConfig cfg;
};

OrderParams paramsFromDict(const py::dict& d, OrderParams base = {}) {
    if (d.contains("gamma")) base.gamma = d["gamma"].cast<double>();
    if (d.contains("epsilon")) base.epsilon = ratFromString(py::str(d["epsilon"]));
    if (d.contains("delta")) base.delta = ratFromString(py::str(d["delta"]));
    if (d.contains("p")) base.p = d["p"].cast<double>();
    if (d.contains("r")) base.r = ratFromString(py::str(d["r"]));
    base.check();
    return base;
}

}  // namespace

PYBIND11_MODULE(_abstat, m) {
    m.doc() = "window-scheme statistical convergence diagnostics";

    py::class_<WindowScheme, std::shared_ptr<WindowScheme>>(m, "WindowScheme")
        .def_property_readonly("horizon", &WindowScheme::horizon)
        .def("alpha", [](const WindowScheme& s, long n) { return s.alpha(n).get_str(); })
        .def("beta", [](const WindowScheme& s, long n) { return s.beta(n).get_str(); })
        .def("width", [](const WindowScheme& s, long n) { return s.window(n).width.get_str(); });

    py::class_<RVSequenceModel, std::shared_ptr<RVSequenceModel>>(m, "RVSequenceModel")
        .def("exceedance_prob",
             [](const RVSequenceModel& mdl, const std::string& k, const std::string& eps) {
                 return mdl.exceedanceProb(BigInt(k), ratFromString(eps));
             })
        .def("abs_moment",
             [](const RVSequenceModel& mdl, const std::string& k, const std::string& r) {
                 return mdl.absMoment(BigInt(k), ratFromString(r));
             })
        .def("cdf",
             [](const RVSequenceModel& mdl, const std::string& k, const std::string& x) {
                 return mdl.cdfAt(BigInt(k), ratFromString(x)).get_d();
             })
        .def("limit_cdf", [](const RVSequenceModel& mdl, const std::string& x) {
            return mdl.limitCdf(ratFromString(x)).get_d();
        });

    m.def("make_scheme", [](const std::string& configJson) {
        auto scheme = schemeFromConfig(fromJsonText(configJson));
        return std::const_pointer_cast<WindowScheme>(scheme);
    });
    m.def("make_model", [](const std::string& configJson) {
        auto model = modelFromConfig(fromJsonText(configJson));
        return std::const_pointer_cast<RVSequenceModel>(model);
    });
    m.def("corpus_ids", &corpusIds);
    m.def("corpus_model", [](const std::string& id, const std::string& variant) {
        return std::const_pointer_cast<RVSequenceModel>(
            std::shared_ptr<const RVSequenceModel>(buildCorpusEntry(id).models.at(variant)));
    }, py::arg("id"), py::arg("variant") = "default");
    m.def("corpus_scheme", [](const std::string& id, const std::string& schemeId) {
        return std::const_pointer_cast<WindowScheme>(
            std::shared_ptr<const WindowScheme>(buildCorpusEntry(id).schemes.at(schemeId)));
    });

    m.def(
        "density_series",
        [](const RVSequenceModel& mdl, const WindowScheme& sch, const py::dict& params,
           long nFrom, long nTo, long enumLimit) {
            EngineKnobs knobs;
            if (enumLimit > 0) knobs.enumLimit = enumLimit;
            auto s = densitySeries(mdl, sch, paramsFromDict(params), nFrom, nTo, knobs);
            return seriesDict(s);
        },
        py::arg("model"), py::arg("scheme"), py::arg("params"), py::arg("n_from"),
        py::arg("n_to"), py::arg("enum_limit") = 0);

    m.def(
        "cesaro_series",
        [](const RVSequenceModel& mdl, const WindowScheme& sch, const py::dict& params,
           long nFrom, long nTo, long enumLimit) {
            EngineKnobs knobs;
            if (enumLimit > 0) knobs.enumLimit = enumLimit;
            return seriesDict(cesaroSeries(mdl, sch, paramsFromDict(params), nFrom, nTo, knobs));
        },
        py::arg("model"), py::arg("scheme"), py::arg("params"), py::arg("n_from"),
        py::arg("n_to"), py::arg("enum_limit") = 0);

    m.def(
        "moment_series",
        [](const RVSequenceModel& mdl, const WindowScheme& sch, const py::dict& params,
           long nFrom, long nTo, long enumLimit) {
            EngineKnobs knobs;
            if (enumLimit > 0) knobs.enumLimit = enumLimit;
            return seriesDict(momentSeries(mdl, sch, paramsFromDict(params), nFrom, nTo, knobs));
        },
        py::arg("model"), py::arg("scheme"), py::arg("params"), py::arg("n_from"),
        py::arg("n_to"), py::arg("enum_limit") = 0);

    m.def(
        "verdict_for",
        [](const RVSequenceModel& mdl, const WindowScheme& sch, const py::dict& params,
           const std::string& mode, long nFrom, long nTo, double tau, double tailFraction,
           long enumLimit) {
            EngineKnobs knobs;
            if (enumLimit > 0) knobs.enumLimit = enumLimit;
            VerdictKnobs vk;
            vk.tau = tau;
            vk.tailFraction = tailFraction;
            OrderParams P = paramsFromDict(params);
            DiagnosticSeries s;
            if (mode == "probability")
                s = densitySeries(mdl, sch, P, nFrom, nTo, knobs);
            else if (mode == "cesaro")
                s = cesaroSeries(mdl, sch, P, nFrom, nTo, knobs);
            else if (mode == "expectation")
                s = momentSeries(mdl, sch, P, nFrom, nTo, knobs);
            else
                throw std::invalid_argument("mode must be probability/cesaro/expectation");
            return verdictDict(verdict(s, vk));
        },
        py::arg("model"), py::arg("scheme"), py::arg("params"), py::arg("mode"),
        py::arg("n_from"), py::arg("n_to"), py::arg("tau") = 0.05,
        py::arg("tail_fraction") = 0.5, py::arg("enum_limit") = 0);

    m.def("liminf_ratio", [](const WindowScheme& sch, long nMin, long nMax) {
        auto rep = liminfRatio(sch, nMin, nMax);
        py::dict d;
        d["min_ratio"] = rep.minRatio;
        d["argmin"] = rep.argmin;
        d["trend"] = rep.trend == LiminfRatioReport::Trend::increasing   ? "increasing"
                     : rep.trend == LiminfRatioReport::Trend::decreasing ? "decreasing"
                     : rep.trend == LiminfRatioReport::Trend::flat       ? "flat"
                                                                         : "mixed";
        return d;
    });

    m.def("estimate_exceedance", [](const RVSequenceModel& mdl, const std::string& k,
                                    const std::string& eps, long samples, std::uint64_t seed,
                                    double confidence) {
        MCConfig cfg;
        cfg.samplesPerIndex = samples;
        cfg.seed = seed;
        cfg.confidence = confidence;
        auto est = estimateExceedance(mdl, BigInt(k), ratFromString(eps), cfg);
        return py::make_tuple(est.pHat, est.halfWidth);
    });

    m.def("reproduce", [](const std::string& id) {
        auto res = reproduce(buildCorpusEntry(id));
        py::dict d;
        d["ok"] = res.ok;
        d["lines"] = res.lines;
        return d;
    });

    m.def("check_invariants", [](bool quick) {
        auto rep = runInvariantSuite(quick);
        py::dict d;
        d["checks"] = rep.checksRun;
        d["violations"] = rep.violations;
        return d;
    }, py::arg("quick") = true);
}
