#include "abstat/config.hpp"

#include <fstream>

namespace abstat {

namespace {

using nlohmann::json;

BigInt bigFromJson(const json& v) {
    if (v.is_number_integer()) return BigInt(static_cast<long>(v.get<long long>()));
    if (v.is_string()) return BigInt(v.get<std::string>());
    throw ConfigError("expected integer or decimal string, got " + v.dump());
}

SchemeKind schemeKindFromString(const std::string& s) {
    if (s == "classical") return SchemeKind::classical;
    if (s == "lacunary") return SchemeKind::lacunary;
    if (s == "lambda") return SchemeKind::lambda;
    if (s == "squares") return SchemeKind::squares;
    if (s == "powerOfN") return SchemeKind::powerOfN;
    if (s == "factorialEven") return SchemeKind::factorialEven;
    if (s == "factorialOdd") return SchemeKind::factorialOdd;
    if (s == "explicitTable") return SchemeKind::explicitTable;
    if (s == "custom") return SchemeKind::custom;
    throw ConfigError("unknown scheme kind: " + s);
}

PowForm probFromJson(const json& v) {
    if (v.is_object()) {
        Rational a = v.contains("a") ? ratFromJson(v.at("a")) : Rational(0);
        Rational b = v.contains("b") ? ratFromJson(v.at("b")) : Rational(0);
        Rational s = v.contains("s") ? ratFromJson(v.at("s")) : Rational(0);
        return PowForm::power(a, b, Rational(-s));
    }
    return PowForm::constant(ratFromJson(v));
}

IndexSet indexSetFromConfig(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "none" || kind == "all") return IndexSet::all();
    if (kind == "perfectSquares") return IndexSet::perfectSquares();
    if (kind == "floorPowers") return IndexSet::floorPowers(ratFromJson(j.at("c")));
    if (kind == "selfPowers") return IndexSet::selfPowers();
    if (kind == "factorialPoints")
        return IndexSet::factorialPoints(j.value("minM", 1));
    if (kind == "blockUnion") {
        std::vector<std::pair<BigInt, BigInt>> iv;
        for (const auto& e : j.at("intervals"))
            iv.emplace_back(bigFromJson(e.at(0)), bigFromJson(e.at(1)));
        return IndexSet::blockUnion(std::move(iv));
    }
    if (kind == "firstOfEachWindow")
        return IndexSet::firstOfEachWindow(schemeFromConfig(j.at("scheme")),
                                           ratFromJson(j.at("c")));
    throw ConfigError("unknown index set kind: " + kind);
}

BranchLaw lawFromConfig(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "discrete") {
        DiscreteLaw law;
        for (const auto& a : j.at("atoms")) {
            Atom atom;
            const auto& val = a.at("value");
            if (val.is_string() && val.get<std::string>() == "k")
                atom.isIndexValue = true;
            else
                atom.value = ratFromJson(val);
            atom.prob = probFromJson(a.at("prob"));
            law.atoms.push_back(std::move(atom));
        }
        return law;
    }
    if (kind == "jointDiscrete") {
        JointLaw law;
        for (const auto& a : j.at("atoms"))
            law.atoms.push_back(
                {ratFromJson(a.at("x")), ratFromJson(a.at("limit")), probFromJson(a.at("prob"))});
        return law;
    }
    if (kind == "closedForm") {
        ClosedFormLaw law;
        const std::string fam = j.at("family").get<std::string>();
        if (fam == "constantOne")
            law.family = ClosedFormLaw::Family::constantOne;
        else if (fam == "geometricEps")
            law.family = ClosedFormLaw::Family::geometricEps;
        else
            throw ConfigError("unknown closed form family: " + fam);
        if (j.contains("scale")) law.scale = ratFromJson(j.at("scale"));
        if (j.contains("epsLo")) law.epsLo = ratFromJson(j.at("epsLo"));
        if (j.contains("epsHi")) law.epsHi = ratFromJson(j.at("epsHi"));
        return law;
    }
    throw ConfigError("unknown law kind: " + kind);
}

Mode modeFromString(const std::string& s) {
    if (s == "probability") return Mode::probability;
    if (s == "cesaro") return Mode::cesaro;
    if (s == "expectation") return Mode::expectation;
    if (s == "distribution") return Mode::distribution;
    throw ConfigError("unknown mode: " + s);
}

}  // namespace

Rational ratFromJson(const json& v) {
    try {
        if (v.is_number_integer()) return Rational(static_cast<long>(v.get<long long>()));
        if (v.is_number_float()) return ratFromDouble(v.get<double>());
        if (v.is_string()) return ratFromString(v.get<std::string>());
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad rational: ") + e.what());
    }
    throw ConfigError("expected number or rational string, got " + v.dump());
}

std::shared_ptr<const WindowScheme> schemeFromConfig(const json& j) {
    const SchemeKind kind = schemeKindFromString(j.at("kind").get<std::string>());
    const long horizon = j.at("horizon").get<long>();
    SchemeParams p;
    const json params = j.value("params", json::object());
    if (params.contains("exponent")) p.exponent = params.at("exponent").get<long>();
    if (params.contains("family")) p.family = params.at("family").get<std::string>();
    if (params.contains("cutPoints"))
        for (const auto& e : params.at("cutPoints")) p.cutPoints.push_back(bigFromJson(e));
    if (params.contains("lambdas"))
        for (const auto& e : params.at("lambdas")) p.lambdas.push_back(bigFromJson(e));
    if (params.contains("table"))
        for (const auto& e : params.at("table"))
            p.table.emplace_back(bigFromJson(e.at(0)), bigFromJson(e.at(1)));
    try {
        return std::make_shared<const WindowScheme>(makeScheme(kind, p, horizon));
    } catch (const InvalidScheme& e) {
        throw ConfigError(std::string("invalid scheme: ") + e.what());
    }
}

std::shared_ptr<const RVSequenceModel> modelFromConfig(const json& j) {
    if (j.contains("corpus")) {
        const std::string id = j.at("corpus").get<std::string>();
        CorpusEntry e = buildCorpusEntry(id);
        const std::string variant = j.value("variant", "default");
        return e.models.at(variant);
    }
    std::vector<Branch> branches;
    for (const auto& b : j.at("branches")) {
        Branch br;
        br.set = indexSetFromConfig(b.at("indexSet"));
        br.law = lawFromConfig(b.at("law"));
        branches.push_back(std::move(br));
    }
    LimitLaw lim;
    const json& lj = j.at("limit");
    if (lj.contains("point")) {
        lim = LimitLaw::pointMass(ratFromJson(lj.at("point")));
    } else {
        for (const auto& a : lj.at("atoms"))
            lim.atoms.emplace_back(ratFromJson(a.at(0)), ratFromJson(a.at(1)));
    }
    std::optional<Rational> bound;
    if (j.contains("bound")) bound = ratFromJson(j.at("bound"));
    std::optional<BigInt> maxValid;
    if (j.contains("maxValidIndex")) maxValid = bigFromJson(j.at("maxValidIndex"));
    try {
        return std::make_shared<const RVSequenceModel>(std::move(branches), std::move(lim), bound,
                                                       maxValid);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid model: ") + e.what());
    }
}

RunConfig parseRunConfig(const json& j) {
    RunConfig cfg;
    try {
        cfg.canonical = json::parse(canonicalConfigText(j));
        cfg.scheme = schemeFromConfig(j.at("scheme"));
        if (j.contains("model")) {
            cfg.model = modelFromConfig(j.at("model"));
            if (j.at("model").contains("corpus"))
                cfg.corpusId = j.at("model").at("corpus").get<std::string>();
        }
        cfg.mode = modeFromString(j.value("mode", "probability"));
        const json params = j.value("params", json::object());
        if (params.contains("gamma")) cfg.params.gamma = params.at("gamma").get<double>();
        if (params.contains("epsilon")) cfg.params.epsilon = ratFromJson(params.at("epsilon"));
        if (params.contains("delta")) cfg.params.delta = ratFromJson(params.at("delta"));
        if (params.contains("p")) cfg.params.p = params.at("p").get<double>();
        if (params.contains("r")) cfg.params.r = ratFromJson(params.at("r"));
        cfg.params.check();
        const json range = j.at("range");
        if (range.contains("points")) {
            for (const auto& e : range.at("points")) cfg.nPoints.push_back(e.get<long>());
            if (cfg.nPoints.empty()) throw ConfigError("range.points must be non-empty");
            cfg.nFrom = cfg.nPoints.front();
            cfg.nTo = cfg.nPoints.back();
        } else {
            cfg.nFrom = range.value("from", 1L);
            cfg.nTo = range.at("to").get<long>();
        }
        if (j.contains("xGrid"))
            for (const auto& e : j.at("xGrid")) cfg.xGrid.push_back(ratFromJson(e));
        const json vk = j.value("verdict", json::object());
        if (vk.contains("tau")) cfg.verdictKnobs.tau = vk.at("tau").get<double>();
        if (vk.contains("tailFraction"))
            cfg.verdictKnobs.tailFraction = vk.at("tailFraction").get<double>();
        if (vk.contains("slopeDeadband"))
            cfg.verdictKnobs.slopeDeadband = vk.at("slopeDeadband").get<double>();
        if (j.contains("enumLimit")) cfg.engineKnobs.enumLimit = bigFromJson(j.at("enumLimit"));
        const json mc = j.value("mc", json::object());
        if (mc.contains("samples")) cfg.mc.samplesPerIndex = mc.at("samples").get<long>();
        if (mc.contains("seed")) cfg.mc.seed = mc.at("seed").get<std::uint64_t>();
        if (mc.contains("confidence")) cfg.mc.confidence = mc.at("confidence").get<double>();
        cfg.outputPath = j.value("output", "");
    } catch (const ConfigError&) {
        throw;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config validation error: ") + e.what());
    }
    return cfg;
}

RunConfig loadRunConfig(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parseRunConfig(j);
}

std::string canonicalConfigText(const json& j) {
    // nlohmann::json keeps object keys sorted; dump() emits shortest
    // round-trip numbers, so dump(parse(dump(x))) is a fixed point
    return j.dump(2) + "\n";
}

}  // namespace abstat
