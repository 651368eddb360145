// abstat: diagnostics for window-scheme statistical convergence of random
// variable sequences. Subcommands: analyze, reproduce, compare-modes,
// liminf-ratio, mc-estimate, check-invariants.

#include "abstat/config.hpp"
#include "abstat/corpus.hpp"
#include "abstat/engine.hpp"
#include "abstat/invariants.hpp"
#include "abstat/io.hpp"
#include "abstat/montecarlo.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace abstat;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;   // assertion or expectation failure
constexpr int kExitConfig = 2;    // config error

void writeFile(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string outName(const std::string& base, const std::string& suffix) {
    auto dot = base.rfind('.');
    if (dot == std::string::npos) return base + suffix;
    return base.substr(0, dot) + suffix + base.substr(dot);
}

int runAnalyze(const std::string& configPath, std::string outOverride) {
    RunConfig cfg = loadRunConfig(configPath);
    if (!cfg.model) throw ConfigError("analyze needs a model (inline or corpus id)");
    std::string out = outOverride.empty() ? cfg.outputPath : outOverride;
    if (out.empty()) out = "series.csv";

    std::vector<DiagnosticSeries> all;
    switch (cfg.mode) {
        case Mode::probability:
            all.push_back(cfg.nPoints.empty()
                              ? densitySeries(*cfg.model, *cfg.scheme, cfg.params, cfg.nFrom,
                                              cfg.nTo, cfg.engineKnobs)
                              : densitySeriesAt(*cfg.model, *cfg.scheme, cfg.params, cfg.nPoints,
                                                cfg.engineKnobs));
            break;
        case Mode::cesaro:
            all.push_back(cesaroSeries(*cfg.model, *cfg.scheme, cfg.params, cfg.nFrom, cfg.nTo,
                                       cfg.engineKnobs));
            break;
        case Mode::expectation:
            all.push_back(momentSeries(*cfg.model, *cfg.scheme, cfg.params, cfg.nFrom, cfg.nTo,
                                       cfg.engineKnobs));
            break;
        case Mode::distribution: {
            auto grid = cfg.xGrid.empty() ? defaultCdfGrid(cfg.model->limit()) : cfg.xGrid;
            all = cdfDensitySeries(*cfg.model, *cfg.scheme, cfg.params, grid, cfg.nFrom, cfg.nTo,
                                   cfg.engineKnobs);
            break;
        }
        case Mode::realSequence:
            throw ConfigError("realSequence mode is a library-level operation");
    }

    nlohmann::json verdicts = nlohmann::json::array();
    for (size_t i = 0; i < all.size(); ++i) {
        const std::string path =
            all.size() == 1 ? out : outName(out, "_x" + std::to_string(i));
        writeFile(path, seriesCsv(all[i]));
        Verdict v = verdict(all[i], cfg.verdictKnobs);
        nlohmann::json vj = verdictJson(v);
        if (all[i].gridX) vj["x"] = *all[i].gridX;
        vj["csv"] = path;
        verdicts.push_back(vj);
        std::cout << toString(all[i].mode) << (all[i].gridX ? " x=" + fmt17(*all[i].gridX) : "")
                  << ": " << toString(v.decision);
        if (v.candidate && v.decision == Decision::convergesTo) std::cout << " " << *v.candidate;
        std::cout << " (tailMax " << v.tailMax << ", trend " << toString(v.trend) << ")\n";
    }
    writeFile(outName(out, "") + ".verdict.json", verdicts.dump(2) + "\n");
    return kExitOk;
}

int runReproduce(const std::string& id, const std::string& outDir) {
    CorpusEntry entry = buildCorpusEntry(id);
    ReproduceResult res = reproduce(entry);
    for (size_t i = 0; i < res.series.size(); ++i) {
        if (outDir.empty()) continue;
        writeFile(outDir + "/" + id + "_" + std::to_string(i) + ".csv", seriesCsv(res.series[i]));
    }
    for (const auto& line : res.lines) std::cout << line << "\n";
    return res.ok ? kExitOk : kExitFailure;
}

int runCompareModes(const std::string& configPath, const std::string& outPath) {
    RunConfig cfg = loadRunConfig(configPath);
    if (!cfg.model) throw ConfigError("compare-modes needs a model");
    ModeComparison cmp = compareModes(*cfg.model, *cfg.scheme, cfg.params, cfg.nFrom, cfg.nTo,
                                      cfg.engineKnobs, cfg.verdictKnobs, cfg.xGrid);
    nlohmann::json j = comparisonJson(cmp);
    if (!outPath.empty()) writeFile(outPath, j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    if (cmp.cert.checked && (!cmp.cert.markovOk || !cmp.cert.reverseOk)) return kExitFailure;
    return kExitOk;
}

int runLiminfRatio(const std::string& configPath, const std::string& schemeKind,
                   const std::string& family, long horizon, long nMin, long nMax) {
    std::shared_ptr<const WindowScheme> scheme;
    if (!configPath.empty()) {
        RunConfig cfg = loadRunConfig(configPath);
        scheme = cfg.scheme;
    } else {
        nlohmann::json j;
        j["kind"] = schemeKind;
        j["horizon"] = horizon;
        if (!family.empty()) j["params"]["family"] = family;
        scheme = schemeFromConfig(j);
    }
    if (nMax <= 0) nMax = scheme->horizon();
    LiminfRatioReport rep = liminfRatio(*scheme, nMin, nMax);
    const char* trend = rep.trend == LiminfRatioReport::Trend::increasing   ? "increasing"
                        : rep.trend == LiminfRatioReport::Trend::decreasing ? "decreasing"
                        : rep.trend == LiminfRatioReport::Trend::flat       ? "flat"
                                                                            : "mixed";
    std::cout << "min ratio " << fmt17(rep.minRatio) << " at n=" << rep.argmin << ", trend "
              << trend << " over [" << rep.nMin << "," << rep.nMax << "]\n";
    return kExitOk;
}

int runCheckInvariants(bool quick) {
    InvariantReport rep = runInvariantSuite(quick);
    std::cout << rep.checksRun << " pointwise checks";
    if (rep.ok()) {
        std::cout << ", no violations\n";
        return kExitOk;
    }
    std::cout << ", " << rep.violations.size() << " violations\n";
    for (const auto& v : rep.violations) std::cout << "VIOLATION " << v << "\n";
    return kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"window-scheme statistical convergence diagnostics"};
    app.require_subcommand(1);

    std::string configPath, outPath, corpusId, schemeKind = "classical", family;
    long horizon = 100, nMin = 1, nMax = 0;
    bool quick = false;

    auto* analyze = app.add_subcommand("analyze", "run one diagnostic series + verdict");
    analyze->add_option("--config", configPath)->required();
    analyze->add_option("--out", outPath);

    auto* repro = app.add_subcommand("reproduce", "run a corpus entry against its documented outcomes");
    repro->add_option("id", corpusId)->required();
    repro->add_option("--out", outPath);

    auto* cmp = app.add_subcommand("compare-modes", "all four verdicts plus inequality certification");
    cmp->add_option("--config", configPath)->required();
    cmp->add_option("--out", outPath);

    auto* liminf = app.add_subcommand("liminf-ratio", "scheme-level liminf of beta_n/alpha_n");
    liminf->add_option("--config", configPath);
    liminf->add_option("--scheme-kind", schemeKind);
    liminf->add_option("--family", family);
    liminf->add_option("--horizon", horizon);
    liminf->add_option("--from", nMin);
    liminf->add_option("--to", nMax);

    auto* mc = app.add_subcommand("mc-estimate", "Monte Carlo density band");
    mc->add_option("--config", configPath)->required();
    mc->add_option("--out", outPath);
    long mcSamples = 0, mcSeed = -1;
    double mcConfidence = 0.0;
    mc->add_option("--samples", mcSamples);
    mc->add_option("--seed", mcSeed);
    mc->add_option("--confidence", mcConfidence);

    auto* inv = app.add_subcommand("check-invariants", "pointwise invariant grid");
    inv->add_flag("--quick", quick);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(analyze)) return runAnalyze(configPath, outPath);
        if (app.got_subcommand(repro)) return runReproduce(corpusId, outPath);
        if (app.got_subcommand(cmp)) return runCompareModes(configPath, outPath);
        if (app.got_subcommand(liminf))
            return runLiminfRatio(configPath, schemeKind, family, horizon, nMin, nMax);
        if (app.got_subcommand(mc)) {
            RunConfig cfg = loadRunConfig(configPath);
            if (mcSamples > 0) cfg.mc.samplesPerIndex = mcSamples;
            if (mcSeed >= 0) cfg.mc.seed = static_cast<std::uint64_t>(mcSeed);
            if (mcConfidence > 0.0) cfg.mc.confidence = mcConfidence;
            if (!cfg.model) throw ConfigError("mc-estimate needs a model");
            MCSeries s = mcDensitySeries(*cfg.model, *cfg.scheme, cfg.params, cfg.mc, cfg.nFrom,
                                         cfg.nTo, cfg.engineKnobs);
            std::string out = outPath.empty() ? cfg.outputPath : outPath;
            if (out.empty()) out = "mc_series.csv";
            writeFile(out, mcSeriesCsv(s));
            std::cout << "wrote " << out << " (" << s.points.size() << " windows, halfWidth "
                      << fmt17(cfg.mc.halfWidth()) << ")\n";
            return kExitOk;
        }
        if (app.got_subcommand(inv)) return runCheckInvariants(quick);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const UnknownId& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitConfig;
}
