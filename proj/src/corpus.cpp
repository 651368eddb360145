#include "abstat/corpus.hpp"

#include <sstream>

namespace abstat {

namespace {

PowForm constProb(long num, long den) { return PowForm::constant(Rational(num, den)); }

// a + b * k^(-s)
PowForm decayProb(const Rational& a, const Rational& b, const Rational& s) {
    return PowForm::power(a, b, Rational(-s));
}

Atom constAtom(const Rational& v, const PowForm& p) {
    Atom a;
    a.value = v;
    a.prob = p;
    return a;
}

Atom indexAtom(const PowForm& p) {
    Atom a;
    a.isIndexValue = true;
    a.prob = p;
    return a;
}

DiscreteLaw twoPoint(const Rational& v0, const PowForm& p0, const Rational& v1,
                     const PowForm& p1) {
    DiscreteLaw law;
    law.atoms.push_back(constAtom(v0, p0));
    law.atoms.push_back(constAtom(v1, p1));
    return law;
}

std::shared_ptr<const WindowScheme> makeShared(SchemeKind kind, const SchemeParams& p,
                                               long horizon) {
    return std::make_shared<const WindowScheme>(makeScheme(kind, p, horizon));
}

CorpusEntry buildEx2_1() {
    CorpusEntry e;
    e.id = "ex2_1";
    std::vector<Branch> branches(2);
    branches[0].set = IndexSet::perfectSquares();
    branches[0].law = twoPoint(-1, constProb(1, 2), 1, constProb(1, 2));
    branches[1].set = IndexSet::all();
    branches[1].law = twoPoint(0, decayProb(1, -1, 1), 1, decayProb(0, 1, 1));
    e.models["default"] = std::make_shared<const RVSequenceModel>(std::move(branches),
                                                                  LimitLaw::pointMass(0));
    e.schemes["squares"] = makeShared(SchemeKind::squares, {}, 5000);
    e.schemes["classical"] = makeShared(SchemeKind::classical, {}, 10000);
    e.defaultParams = OrderParams{0.5, Rational(1, 2), Rational(1, 2), 1.0, 1};

    CorpusExpectation a;
    a.schemeId = "squares";
    a.mode = Mode::probability;
    a.params = e.defaultParams;
    a.nTo = 5000;
    a.decision = Decision::convergesTo;
    a.candidate = 0.0;
    a.note = "one square per window dominates; density 1/sqrt(2n-1)";
    e.expected.push_back(a);

    CorpusExpectation b = a;
    b.schemeId = "classical";
    b.nTo = 10000;
    b.decision = Decision::fails;
    b.note = "square density (sqrt(n)-1)/sqrt(n) stays near 1 at gamma=1/2";
    e.expected.push_back(b);

    e.notes = "two-branch spectrum: symmetric on squares, vanishing-probability spike elsewhere";
    return e;
}

CorpusEntry buildEx2_2() {
    CorpusEntry e;
    e.id = "ex2_2";
    std::vector<Branch> branches(2);
    branches[0].set = IndexSet::floorPowers(Rational(1, 2));
    ClosedFormLaw one;
    one.family = ClosedFormLaw::Family::constantOne;
    branches[0].law = one;
    ClosedFormLaw geom;
    geom.family = ClosedFormLaw::Family::geometricEps;
    geom.scale = 2;
    branches[1].set = IndexSet::all();
    branches[1].law = geom;
    e.models["default"] = std::make_shared<const RVSequenceModel>(
        std::move(branches), LimitLaw::pointMass(2), Rational(2));
    e.schemes["powerN2"] = makeShared(SchemeKind::powerOfN, {}, 2500);
    e.defaultParams = OrderParams{0.8, Rational(1, 2), Rational(1, 2), 1.0, 1};

    // the verdict threshold separating density -> 0 from density -> 1
    VerdictKnobs flip;
    flip.tau = 0.5;
    EngineKnobs fast;
    fast.enumLimit = 40000;
    for (double gamma : {0.3, 0.45, 0.5, 0.55, 0.8}) {
        CorpusExpectation x;
        x.schemeId = "powerN2";
        x.mode = Mode::probability;
        x.params = e.defaultParams;
        x.params.gamma = gamma;
        x.verdictKnobs = flip;
        x.engineKnobs = fast;
        x.nTo = 2500;
        x.decision = gamma > 0.5 ? Decision::convergesTo : Decision::fails;
        if (gamma > 0.5) x.candidate = 2.0;
        x.note = "order flips across c=1/2";
        e.expected.push_back(x);
    }
    e.notes = "uniform(0,1) on floor-power indices vs density n x^(n-1)/2^n; exceedance "
              "(1-eps/2)^n elsewhere";
    return e;
}

CorpusEntry buildEx2_3() {
    CorpusEntry e;
    e.id = "ex2_3";
    // even interiors ((2n)!, (2n+1)!) plus the pre-window stub [1,1]; the odd
    // interiors form the default branch
    std::vector<std::pair<BigInt, BigInt>> evenInteriors;
    evenInteriors.emplace_back(1, 1);
    for (unsigned long n = 1; n <= 13; ++n)
        evenInteriors.emplace_back(factorial(2 * n) + 1, factorial(2 * n + 1) - 1);
    auto mkModel = [&](long limitValue) {
        std::vector<Branch> branches(3);
        branches[0].set = IndexSet::factorialPoints(2);
        branches[0].law = twoPoint(-3, constProb(1, 2), 3, constProb(1, 2));
        branches[1].set = IndexSet::blockUnion(evenInteriors);
        branches[1].law = twoPoint(-1, decayProb(0, 1, 1), 1, decayProb(1, -1, 1));
        branches[2].set = IndexSet::all();
        branches[2].law = twoPoint(-2, decayProb(0, 1, 1), 2, decayProb(1, -1, 1));
        return std::make_shared<const RVSequenceModel>(
            std::move(branches), LimitLaw::pointMass(limitValue), Rational(3),
            BigInt(factorial(27) - 1));
    };
    e.models["default"] = mkModel(1);
    e.models["limit2"] = mkModel(2);
    e.schemes["evenFactorial"] = makeShared(SchemeKind::factorialEven, {}, 12);
    e.schemes["oddFactorial"] = makeShared(SchemeKind::factorialOdd, {}, 12);
    e.defaultParams = OrderParams{0.5, Rational(1, 2), Rational(1, 2), 1.0, 1};

    CorpusExpectation a;
    a.schemeId = "evenFactorial";
    a.mode = Mode::probability;
    a.params = e.defaultParams;
    a.nTo = 12;
    a.decision = Decision::convergesTo;
    a.candidate = 1.0;
    a.note = "two endpoint exceedances per factorial window";
    e.expected.push_back(a);

    CorpusExpectation b = a;
    b.modelId = "limit2";
    b.schemeId = "oddFactorial";
    b.candidate = 2.0;
    b.note = "same construction seen through the shifted factorial windows";
    e.expected.push_back(b);

    e.notes = "dual limits under two window schemes; endpoints carry {-3,3}";
    return e;
}

CorpusEntry buildEx2_4() {
    CorpusEntry e;
    e.id = "ex2_4";
    // P(X_n = 1) = n^(-1/(2p)) off the m^m indices; entry fixes p = 1
    std::vector<Branch> branches(2);
    branches[0].set = IndexSet::selfPowers();
    branches[0].law = twoPoint(-1, constProb(1, 2), 1, constProb(1, 2));
    branches[1].set = IndexSet::all();
    branches[1].law = twoPoint(0, decayProb(1, -1, Rational(1, 2)), 1,
                               decayProb(0, 1, Rational(1, 2)));
    e.models["default"] = std::make_shared<const RVSequenceModel>(std::move(branches),
                                                                  LimitLaw::pointMass(0));
    e.schemes["powerN2"] = makeShared(SchemeKind::powerOfN, {}, 2800);
    e.defaultParams = OrderParams{0.5, Rational(1, 2), Rational(1, 2), 1.0, 1};

    CorpusExpectation a;
    a.schemeId = "powerN2";
    a.mode = Mode::probability;
    a.params = e.defaultParams;
    a.nTo = 400;
    a.decision = Decision::convergesTo;
    a.candidate = 0.0;
    a.note = "only m^m indices and k <= 1/delta^2 are counted";
    e.expected.push_back(a);

    CorpusExpectation b = a;
    b.mode = Mode::cesaro;
    // the mean settles just above 2; the analytic backend's certified bounds
    // carry the series far enough for the tail slope to flatten out
    b.nTo = 2800;
    b.engineKnobs.enumLimit = 10000;
    b.decision = Decision::fails;
    b.candidate.reset();
    b.note = "sum 1/sqrt(k) over [1,n^2] exceeds n, so the mean stays near 2";
    e.expected.push_back(b);

    e.notes = "probability-converges but not strong p-Cesaro summable for gamma <= 1/2 (p=1)";
    return e;
}

CorpusEntry buildThm2_4() {
    CorpusEntry e;
    e.id = "thm2_4";
    std::vector<Branch> branches(2);
    branches[0].set = IndexSet::floorPowers(Rational(1, 2));
    branches[0].law = twoPoint(-1, constProb(1, 2), 1, constProb(1, 2));
    branches[1].set = IndexSet::all();
    branches[1].law = twoPoint(0, decayProb(1, -1, 2), 1, decayProb(0, 1, 2));
    e.models["default"] = std::make_shared<const RVSequenceModel>(std::move(branches),
                                                                  LimitLaw::pointMass(0));
    e.schemes["powerN2"] = makeShared(SchemeKind::powerOfN, {}, 400);
    e.defaultParams = OrderParams{0.8, Rational(1, 2), Rational(1, 2), 1.0, 1};

    CorpusExpectation a;
    a.schemeId = "powerN2";
    a.mode = Mode::cesaro;
    a.params = e.defaultParams;
    a.nTo = 400;
    a.decision = Decision::convergesTo;
    a.candidate = 0.0;
    a.note = "floor-power mass n^(2c) is negligible at gamma=0.8";
    e.expected.push_back(a);

    CorpusExpectation b = a;
    b.params.gamma = 0.3;
    b.decision = Decision::fails;
    b.candidate.reset();
    b.note = "same mass diverges at gamma=0.3 < c";
    e.expected.push_back(b);

    e.notes = "Cesaro order separation around c=1/2 with P(X_n=1)=n^(-2/p), p=1";
    return e;
}

CorpusEntry buildEx3_1() {
    CorpusEntry e;
    e.id = "ex3_1";
    // r = 1: P(X_n = n) = n^(-r) off squares; E|X_n| = 1 there, 1/2 on squares
    std::vector<Branch> branches(2);
    branches[0].set = IndexSet::perfectSquares();
    branches[0].law = twoPoint(0, constProb(1, 2), 1, constProb(1, 2));
    branches[1].set = IndexSet::all();
    DiscreteLaw generic;
    generic.atoms.push_back(constAtom(0, decayProb(1, -1, 1)));
    generic.atoms.push_back(indexAtom(decayProb(0, 1, 1)));
    branches[1].law = generic;
    e.models["default"] = std::make_shared<const RVSequenceModel>(std::move(branches),
                                                                  LimitLaw::pointMass(0));
    e.schemes["squares"] = makeShared(SchemeKind::squares, {}, 2000);
    e.defaultParams = OrderParams{0.5, Rational(1, 2), Rational(1, 2), 1.0, 1};

    CorpusExpectation a;
    a.schemeId = "squares";
    a.mode = Mode::probability;
    a.params = e.defaultParams;
    a.nTo = 2000;
    a.decision = Decision::convergesTo;
    a.candidate = 0.0;
    e.expected.push_back(a);

    CorpusExpectation b = a;
    b.mode = Mode::expectation;
    b.params.epsilon = Rational(1, 4);
    b.decision = Decision::fails;
    b.candidate.reset();
    b.note = "every index has E|X_k|^r >= 1/2, so the whole window counts";
    e.expected.push_back(b);

    e.notes = "probability-converges to 0 but r-th expectation density is the full window";
    return e;
}

CorpusEntry buildEx4_1() {
    CorpusEntry e;
    e.id = "ex4_1";
    auto squares = makeShared(SchemeKind::squares, {}, 10000);
    const Rational c(3, 10);
    std::vector<Branch> branches(2);
    branches[0].set = IndexSet::firstOfEachWindow(squares, c);
    JointLaw first;
    first.atoms.push_back({-1, 1, constProb(1, 2)});
    first.atoms.push_back({1, 0, constProb(1, 2)});
    branches[0].law = first;
    branches[1].set = IndexSet::all();
    JointLaw rest;
    rest.atoms.push_back({1, 0, constProb(1, 2)});
    rest.atoms.push_back({0, 1, constProb(1, 2)});
    branches[1].law = rest;
    LimitLaw lim;
    lim.atoms.emplace_back(0, Rational(1, 2));
    lim.atoms.emplace_back(1, Rational(1, 2));
    e.models["default"] =
        std::make_shared<const RVSequenceModel>(std::move(branches), std::move(lim));
    e.schemes["squares"] = squares;
    e.defaultParams = OrderParams{0.8, Rational(1, 2), Rational(1, 4), 1.0, 1};

    EngineKnobs analytic;
    analytic.enumLimit = 1000;

    CorpusExpectation a;
    a.schemeId = "squares";
    a.mode = Mode::distribution;
    a.params = e.defaultParams;
    a.engineKnobs = analytic;
    a.nTo = 10000;
    a.xGrid = {Rational(-1, 2), Rational(1, 2), Rational(3, 2)};
    a.decision = Decision::convergesTo;
    a.note = "CDF gap 1/2 only on the first floor(h^c) indices of each window";
    e.expected.push_back(a);

    CorpusExpectation b;
    b.schemeId = "squares";
    b.mode = Mode::probability;
    b.params = e.defaultParams;
    b.engineKnobs = analytic;
    b.nTo = 10000;
    b.decision = Decision::fails;
    b.note = "joint exceedance is identically 1, density h^(1-gamma) diverges";
    e.expected.push_back(b);

    e.notes = "distribution-converges but never probability-converges (Theorem 4.2 one-way)";
    return e;
}

CorpusEntry buildThm2_7() {
    CorpusEntry e;
    e.id = "thm2_7";
    auto scheme = [&] {
        SchemeParams p;
        p.family = "nPlusCeilSqrt";
        return makeShared(SchemeKind::custom, p, 5000);
    }();
    RatioBlocks blocks = constructSlowRatioBlocks(*scheme, 6);
    e.chosenBlockIndices = blocks.rIndices;

    std::vector<Branch> branches(2);
    branches[0].set = IndexSet::blockUnion(blocks.blocks);
    branches[0].law = twoPoint(-1, constProb(1, 2), 1, constProb(1, 2));
    branches[1].set = IndexSet::all();
    branches[1].law = twoPoint(0, decayProb(1, -1, 2), 1, decayProb(0, 1, 2));
    // the truncated construction is faithful below the earliest possible
    // next block start, beta_{r-1} >= 7 * beta_{r(6)}
    BigInt maxValid = 7 * scheme->beta(blocks.rIndices.back()) - 1;
    e.models["default"] = std::make_shared<const RVSequenceModel>(
        std::move(branches), LimitLaw::pointMass(0), Rational(1), maxValid);
    e.schemes["sqrtOffset"] = scheme;
    e.schemes["classical"] = makeShared(SchemeKind::classical, {}, 12000);
    e.defaultParams = OrderParams{0.5, Rational(1, 2), Rational(1, 2), 1.0, 1};

    EngineKnobs analytic;
    analytic.enumLimit = 1000;

    CorpusExpectation a;
    a.schemeId = "classical";
    a.mode = Mode::probability;
    a.params = e.defaultParams;
    a.params.gamma = 1.0;
    a.engineKnobs = analytic;
    a.nTo = 12000;
    a.decision = Decision::convergesTo;
    a.candidate = 0.0;
    a.note = "block mass up to n grows like sqrt(n), so the classical density dies";
    e.expected.push_back(a);

    CorpusExpectation b;
    b.schemeId = "sqrtOffset";
    b.mode = Mode::probability;
    b.params = e.defaultParams;
    b.nPoints = blocks.rIndices;
    b.nFrom = blocks.rIndices.front();
    b.nTo = blocks.rIndices.back();
    b.decision = Decision::fails;
    b.candidate = 0.0;
    b.note = "on the chosen windows the whole width exceeds, density width^(1-gamma)";
    e.expected.push_back(b);

    e.notes = "liminf beta/alpha = 1 counterexample: classical-converges, alpha-beta fails "
              "along the selected blocks";
    return e;
}

}  // namespace

std::vector<std::string> corpusIds() {
    return {"ex2_1", "ex2_2", "ex2_3", "ex2_4", "thm2_4", "ex3_1", "ex4_1", "thm2_7"};
}

CorpusEntry buildCorpusEntry(const std::string& id) {
    if (id == "ex2_1") return buildEx2_1();
    if (id == "ex2_2") return buildEx2_2();
    if (id == "ex2_3") return buildEx2_3();
    if (id == "ex2_4") return buildEx2_4();
    if (id == "thm2_4") return buildThm2_4();
    if (id == "ex3_1") return buildEx3_1();
    if (id == "ex4_1") return buildEx4_1();
    if (id == "thm2_7") return buildThm2_7();
    throw UnknownId(id);
}

ReproduceResult reproduce(const CorpusEntry& entry) {
    ReproduceResult out;
    for (const auto& x : entry.expected) {
        const RVSequenceModel& model = entry.model(x.modelId);
        const WindowScheme& scheme = entry.scheme(x.schemeId);
        Verdict v;
        switch (x.mode) {
            case Mode::probability: {
                DiagnosticSeries s =
                    x.nPoints.empty()
                        ? densitySeries(model, scheme, x.params, x.nFrom, x.nTo, x.engineKnobs)
                        : densitySeriesAt(model, scheme, x.params, x.nPoints, x.engineKnobs);
                v = verdict(s, x.verdictKnobs);
                out.series.push_back(std::move(s));
                break;
            }
            case Mode::cesaro: {
                DiagnosticSeries s =
                    cesaroSeries(model, scheme, x.params, x.nFrom, x.nTo, x.engineKnobs);
                v = verdict(s, x.verdictKnobs);
                out.series.push_back(std::move(s));
                break;
            }
            case Mode::expectation: {
                DiagnosticSeries s =
                    momentSeries(model, scheme, x.params, x.nFrom, x.nTo, x.engineKnobs);
                v = verdict(s, x.verdictKnobs);
                out.series.push_back(std::move(s));
                break;
            }
            case Mode::distribution: {
                auto grid = x.xGrid.empty() ? defaultCdfGrid(model.limit()) : x.xGrid;
                auto multi =
                    cdfDensitySeries(model, scheme, x.params, grid, x.nFrom, x.nTo, x.engineKnobs);
                std::optional<Verdict> agg;
                auto rank = [](Decision d) {
                    return d == Decision::fails ? 2 : d == Decision::inconclusive ? 1 : 0;
                };
                for (const auto& s : multi) {
                    Verdict vv = verdict(s, x.verdictKnobs);
                    if (!agg || rank(vv.decision) > rank(agg->decision)) agg = vv;
                    out.series.push_back(s);
                }
                v = *agg;
                v.candidateDesc = "F (limit law)";
                break;
            }
            case Mode::realSequence:
                throw std::logic_error("realSequence expectations are not part of the corpus");
        }
        bool pass = v.decision == x.decision;
        if (pass && x.candidate && v.decision == Decision::convergesTo) {
            pass = v.candidate && std::fabs(*v.candidate - *x.candidate) <= 1e-9;
        }
        std::ostringstream line;
        line << (pass ? "PASS " : "FAIL ") << entry.id << " " << x.schemeId << " "
             << toString(x.mode) << " gamma=" << x.params.gamma << " -> "
             << toString(v.decision);
        if (v.decision == Decision::convergesTo && v.candidate) line << " " << *v.candidate;
        if (!pass) {
            line << " (expected " << toString(x.decision);
            if (x.candidate) line << " " << *x.candidate;
            line << ")";
        }
        out.lines.push_back(line.str());
        if (!pass) out.ok = false;
    }
    return out;
}

}  // namespace abstat
