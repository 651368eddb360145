#pragma once

#include "abstat/engine.hpp"
#include "abstat/models.hpp"
#include "abstat/windows.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace abstat {

struct UnknownId : std::runtime_error {
    explicit UnknownId(const std::string& id) : std::runtime_error("unknown corpus id: " + id) {}
};

// One documented outcome of an entry: which model/scheme/mode at which
// parameters and horizon must reach which decision.
struct CorpusExpectation {
    std::string modelId = "default";
    std::string schemeId;
    Mode mode = Mode::probability;
    OrderParams params;
    VerdictKnobs verdictKnobs;
    EngineKnobs engineKnobs;
    long nFrom = 1, nTo = 1;
    std::vector<long> nPoints;      // non-empty: evaluate exactly these n
    std::vector<Rational> xGrid;    // distribution mode
    Decision decision = Decision::convergesTo;
    std::optional<double> candidate;
    std::string note;
};

struct CorpusEntry {
    std::string id;
    std::map<std::string, std::shared_ptr<const RVSequenceModel>> models;  // "default" + variants
    std::map<std::string, std::shared_ptr<const WindowScheme>> schemes;
    OrderParams defaultParams;
    std::vector<CorpusExpectation> expected;
    std::string notes;
    std::vector<long> chosenBlockIndices;  // thm2_7: the r(j) subsequence

    const RVSequenceModel& model(const std::string& mid = "default") const {
        return *models.at(mid);
    }
    const WindowScheme& scheme(const std::string& sid) const { return *schemes.at(sid); }
};

std::vector<std::string> corpusIds();
CorpusEntry buildCorpusEntry(const std::string& id);

// Runs every documented expectation through the engine; returns one line per
// expectation plus pass/fail, and sets ok=false on any mismatch.
struct ReproduceResult {
    bool ok = true;
    std::vector<std::string> lines;
    // per expectation: the computed series (for CSV export)
    std::vector<DiagnosticSeries> series;
};
ReproduceResult reproduce(const CorpusEntry& entry);

}  // namespace abstat
