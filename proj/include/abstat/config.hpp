#pragma once

#include "abstat/corpus.hpp"
#include "abstat/engine.hpp"
#include "abstat/models.hpp"
#include "abstat/montecarlo.hpp"
#include "abstat/windows.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>

namespace abstat {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One run = one config document. Rationals may be given as JSON numbers
// (exact dyadic) or strings like "0.3" / "1/3" (exact decimal / fraction).
struct RunConfig {
    nlohmann::json canonical;

    std::shared_ptr<const WindowScheme> scheme;
    std::shared_ptr<const RVSequenceModel> model;
    std::string corpusId;  // set when the model came from the corpus

    Mode mode = Mode::probability;
    OrderParams params;
    long nFrom = 1, nTo = 1;
    std::vector<long> nPoints;
    std::vector<Rational> xGrid;
    VerdictKnobs verdictKnobs;
    EngineKnobs engineKnobs;
    MCConfig mc;
    std::string outputPath;
};

Rational ratFromJson(const nlohmann::json& v);
std::shared_ptr<const WindowScheme> schemeFromConfig(const nlohmann::json& j);
std::shared_ptr<const RVSequenceModel> modelFromConfig(const nlohmann::json& j);

RunConfig parseRunConfig(const nlohmann::json& j);
RunConfig loadRunConfig(const std::string& path);

// canonical form: sorted keys, stable number formatting; byte-identical
// under parse -> dump round trips
std::string canonicalConfigText(const nlohmann::json& j);

}  // namespace abstat
