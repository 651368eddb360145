#include "abstat/invariants.hpp"

#include "abstat/corpus.hpp"
#include "abstat/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace abstat {

namespace {

struct GridScheme {
    std::string name;
    std::shared_ptr<const WindowScheme> scheme;
    long nTo;
    // refinement partner: this scheme's windows contain the partner's
    std::string contains;
};

struct Cell {
    std::string model;
    std::string scheme;
    std::string params;
};

std::string cellTag(const Cell& c, long n) {
    std::ostringstream s;
    s << c.model << "/" << c.scheme << "/" << c.params << " n=" << n;
    return s.str();
}

}  // namespace

InvariantReport runInvariantSuite(bool quick) {
    InvariantReport rep;
    auto violate = [&](const std::string& what) { rep.violations.push_back(what); };
    auto check = [&](bool ok, const std::string& what) {
        ++rep.checksRun;
        if (!ok) violate(what);
    };

    std::vector<std::string> modelIds = {"ex2_1", "ex3_1", "ex2_4", "thm2_4", "ex4_1"};
    if (quick) modelIds = {"ex2_1", "ex3_1", "ex4_1"};

    std::vector<GridScheme> schemes;
    schemes.push_back({"squares", std::make_shared<const WindowScheme>(
                                      makeScheme(SchemeKind::squares, {}, 60)),
                       60, ""});
    schemes.push_back({"classical", std::make_shared<const WindowScheme>(
                                        makeScheme(SchemeKind::classical, {}, 60)),
                       60, ""});
    {
        SchemeParams p;
        p.exponent = 2;
        schemes.push_back({"powerN2", std::make_shared<const WindowScheme>(
                                          makeScheme(SchemeKind::powerOfN, p, 40)),
                           40, "squares"});
    }
    {
        SchemeParams p;
        for (long n = 1; n <= 60; ++n) p.lambdas.emplace_back((n + 1) / 2);
        schemes.push_back({"lambda", std::make_shared<const WindowScheme>(
                                         makeScheme(SchemeKind::lambda, p, 60)),
                           60, ""});
    }
    if (!quick) {
        SchemeParams p;
        for (long r = 1; r <= 30; ++r) p.cutPoints.emplace_back(r * r * r);
        schemes.push_back({"lacunary", std::make_shared<const WindowScheme>(
                                           makeScheme(SchemeKind::lacunary, p, 30)),
                           30, ""});
    }

    struct Combo {
        OrderParams params;
        std::string tag;
    };
    std::vector<Combo> combos = {
        {{0.5, Rational(1, 2), Rational(1, 2), 1.0, 1}, "g.5 e.5 d.5 p1 r1"},
        {{0.8, Rational(1, 4), Rational(1, 3), 2.0, 2}, "g.8 e.25 d.33 p2 r2"},
        {{1.0, Rational(3, 4), Rational(1, 2), 1.0, 1}, "g1 e.75 d.5 p1 r1"},
        {{0.3, Rational(1, 2), Rational(1, 4), 0.5, 2}, "g.3 e.5 d.25 p.5 r2"},
    };
    if (quick) combos.resize(2);

    const EngineKnobs knobs;  // enumerated at these horizons

    for (const auto& mid : modelIds) {
        CorpusEntry entry = buildCorpusEntry(mid);
        const RVSequenceModel& model = entry.model();
        const bool hasMoments = mid != "ex2_2";
        const bool bounded = model.boundM().has_value();

        // per-scheme series cache for refinement cross-checks
        std::map<std::string, DiagnosticSeries> probCache;

        for (const auto& gs : schemes) {
            for (const auto& combo : combos) {
                Cell cell{mid, gs.name, combo.tag};
                const OrderParams& P = combo.params;

                // probability densities at two orders and two deltas
                OrderParams lowGamma = P;
                lowGamma.gamma = P.gamma / 2.0;
                OrderParams lowDelta = P;
                lowDelta.delta = P.delta / 2;
                DiagnosticSeries d2 = densitySeries(model, *gs.scheme, P, 1, gs.nTo, knobs);
                DiagnosticSeries d1 = densitySeries(model, *gs.scheme, lowGamma, 1, gs.nTo, knobs);
                DiagnosticSeries dd = densitySeries(model, *gs.scheme, lowDelta, 1, gs.nTo, knobs);
                if (combo.tag == combos.front().tag) probCache[gs.name] = d2;

                OrderParams q = P;
                q.p = P.p + 1.0;
                DiagnosticSeries cesP = cesaroSeries(model, *gs.scheme, P, 1, gs.nTo, knobs);
                DiagnosticSeries cesQ = cesaroSeries(model, *gs.scheme, q, 1, gs.nTo, knobs);

                std::optional<DiagnosticSeries> mom;
                if (hasMoments) {
                    // Chebyshev transfer threshold: delta * eps^r (integer r here)
                    OrderParams mt = P;
                    mt.epsilon = P.delta * ratPowUi(P.epsilon, P.r.get_num().get_ui());
                    mom = momentSeries(model, *gs.scheme, mt, 1, gs.nTo, knobs);
                }

                const double deltaP = std::pow(P.delta.get_d(), P.p);
                for (size_t i = 0; i < d2.points.size(); ++i) {
                    const long n = d2.points[i].n;
                    // gamma-monotonicity: identical counts, denominators ordered
                    check(*d1.points[i].count == *d2.points[i].count,
                          "gamma-mono count mismatch " + cellTag(cell, n));
                    check(d1.points[i].density >= d2.points[i].density,
                          "gamma-mono density " + cellTag(cell, n));
                    // delta-monotonicity, exact integers
                    check(*dd.points[i].count >= *d2.points[i].count,
                          "delta-mono " + cellTag(cell, n));
                    // p-monotonicity of the Cesaro mean (p_k <= 1)
                    const double cp = *cesP.points[i].cesaroHi;
                    const double cq = *cesQ.points[i].cesaroHi;
                    check(cq <= cp + 1e-9 * std::max(1.0, cp), "p-mono " + cellTag(cell, n));
                    // Markov bound d_n <= cesaro_n / delta^p
                    check(d2.points[i].density <= cp / deltaP + 1e-9 * std::max(1.0, cp / deltaP),
                          "markov " + cellTag(cell, n));
                    // gamma = 1 reverse bound
                    if (P.gamma == 1.0) {
                        check(cp <= deltaP + d2.points[i].density +
                                        1e-9 * std::max(1.0, d2.points[i].density),
                              "gamma1-reverse " + cellTag(cell, n));
                    }
                    // Chebyshev transfer: moment count dominates probability count
                    if (mom) {
                        check(*mom->points[i].count >= *d2.points[i].count,
                              "chebyshev-transfer " + cellTag(cell, n));
                    }
                }

                // refinement domination: this window contains the partner's
                if (!gs.contains.empty()) {
                    auto it = std::find_if(schemes.begin(), schemes.end(),
                                           [&](const GridScheme& s) { return s.name == gs.contains; });
                    const long nTo = std::min(gs.nTo, it->nTo);
                    DiagnosticSeries dSub =
                        densitySeries(model, *it->scheme, P, 1, nTo, knobs);
                    for (long n = 1; n <= nTo; ++n) {
                        Window sup = gs.scheme->window(n);
                        Window sub = it->scheme->window(n);
                        check(sub.lo >= sup.lo && sub.hi <= sup.hi,
                              "refinement containment " + cellTag(cell, n));
                        const double C = sup.hGamma(P.gamma) / sub.hGamma(P.gamma);
                        const double lhs = dSub.points[static_cast<size_t>(n - 1)].density;
                        const double rhs = C * d2.points[static_cast<size_t>(n - 1)].density;
                        check(lhs <= rhs + 1e-9 * std::max(1.0, rhs),
                              "refinement domination " + cellTag(cell, n));
                    }
                }

                // bounded-model moment bound on sampled indices of the last window
                if (bounded && hasMoments) {
                    const double M = model.boundM()->get_d();
                    Window w = gs.scheme->window(gs.nTo);
                    const double epsR = std::pow(P.epsilon.get_d(), P.r.get_d());
                    const double twoMR = std::pow(2.0 * M, P.r.get_d());
                    BigInt step = std::max(BigInt((w.hi - w.lo) / 16), BigInt(1));
                    for (BigInt k = w.lo; k <= w.hi; k += step) {
                        const double lhs = model.absMoment(k, P.r);
                        const double rhs =
                            epsR + twoMR * model.exceedanceProb(k, P.epsilon);
                        check(lhs <= rhs + 1e-9 * std::max(1.0, rhs),
                              "bounded-moment " + cellTag(cell, gs.nTo) + " k=" + k.get_str());
                    }
                }
            }
        }
    }
    return rep;
}

}  // namespace abstat
