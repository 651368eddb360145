#include "abstat/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace abstat {

const char* toString(Mode m) {
    switch (m) {
        case Mode::probability: return "probability";
        case Mode::cesaro: return "cesaro";
        case Mode::expectation: return "expectation";
        case Mode::distribution: return "distribution";
        case Mode::realSequence: return "realSequence";
    }
    return "?";
}
const char* toString(Trend t) {
    switch (t) {
        case Trend::decreasing: return "decreasing";
        case Trend::increasing: return "increasing";
        case Trend::flat: return "flat";
        case Trend::oscillating: return "oscillating";
    }
    return "?";
}
const char* toString(Decision d) {
    switch (d) {
        case Decision::convergesTo: return "convergesTo";
        case Decision::fails: return "fails";
        case Decision::inconclusive: return "inconclusive";
    }
    return "?";
}
const char* toString(Backend b) {
    return b == Backend::analytic ? "analytic" : "enumerated";
}

namespace {

constexpr size_t kOverlapCap = 1u << 17;

struct NeumaierSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double t = s + x;
        if (std::fabs(s) >= std::fabs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double get() const { return s + c; }
};

// ---- first-match effective counting -------------------------------------------

BigInt effectiveCount(const RVSequenceModel& m, size_t i, const BigInt& a, const BigInt& b);

// |S_i ∩ (union of earlier sets) ∩ [a,b]|
BigInt overlapWithEarlier(const RVSequenceModel& m, size_t i, const BigInt& a, const BigInt& b) {
    if (i == 0 || b < a) return 0;
    const IndexSet& s = m.branches()[i].set;
    if (auto mem = s.membersInRange(a, b, kOverlapCap)) {
        BigInt c = 0;
        for (const auto& k : *mem)
            for (size_t j = 0; j < i; ++j)
                if (m.branches()[j].set.member(k)) {
                    ++c;
                    break;
                }
        return c;
    }
    std::vector<BigInt> uni;
    for (size_t j = 0; j < i; ++j) {
        auto mj = m.branches()[j].set.membersInRange(a, b, kOverlapCap);
        if (!mj)
            throw AnalyticCountingUnavailable(
                "cross-branch overlap not enumerable in this window");
        uni.insert(uni.end(), mj->begin(), mj->end());
    }
    std::sort(uni.begin(), uni.end());
    uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
    BigInt c = 0;
    for (const auto& k : uni)
        if (s.member(k)) ++c;
    return c;
}

BigInt effectiveCount(const RVSequenceModel& m, size_t i, const BigInt& a, const BigInt& b) {
    if (b < a) return 0;
    if (i + 1 == m.branches().size()) {
        BigInt c = b - a + 1;
        for (size_t j = 0; j + 1 < m.branches().size(); ++j) c -= effectiveCount(m, j, a, b);
        return c;
    }
    return m.branches()[i].set.countInRange(a, b) - overlapWithEarlier(m, i, a, b);
}

// members of S_i ∩ [a,b] claimed by an earlier branch (values, for sum correction)
std::vector<BigInt> overlapMembers(const RVSequenceModel& m, size_t i, const BigInt& a,
                                   const BigInt& b) {
    std::vector<BigInt> out;
    if (i == 0 || b < a) return out;
    const IndexSet& s = m.branches()[i].set;
    std::vector<BigInt> uni;
    for (size_t j = 0; j < i; ++j) {
        auto mj = m.branches()[j].set.membersInRange(a, b, kOverlapCap);
        if (!mj)
            throw AnalyticSummationUnavailable(
                "cross-branch overlap members not enumerable in this window");
        uni.insert(uni.end(), mj->begin(), mj->end());
    }
    std::sort(uni.begin(), uni.end());
    uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
    for (const auto& k : uni)
        if (s.member(k)) out.push_back(k);
    return out;
}

// ---- counting job ---------------------------------------------------------------

struct CountJob {
    const RVSequenceModel* model = nullptr;
    // plan per branch; empty optional means "unavailable, only legal if the
    // branch has no effective members in the window"
    std::vector<std::optional<ValuePlan>> plans;
    std::vector<std::exception_ptr> planErrors;
    Rational threshold;
    double thresholdD = 0.0;
    bool absolute = false;  // count |value| >= threshold instead
};

ValuePlan negatedPlan(const ValuePlan& plan) {
    ValuePlan out;
    for (const auto& pc : plan.pieces) {
        if (!std::holds_alternative<PowForm>(pc.form)) continue;  // -q^k is never >= t > 0
        out.pieces.push_back({pc.from, pc.to, std::get<PowForm>(pc.form).negated()});
    }
    return out;
}

const ValuePlan& requirePlan(const CountJob& job, size_t i) {
    if (!job.plans[i]) std::rethrow_exception(job.planErrors[i]);
    return *job.plans[i];
}

int jobCmpAt(const CountJob& job, const ValuePlan& plan, const BigInt& k) {
    int c = plan.cmpAt(k, job.threshold, job.thresholdD);
    if (!job.absolute || c >= 0) return c;
    ValuePlan neg = negatedPlan(plan);
    if (neg.pieces.empty()) return c;
    for (const auto& pc : neg.pieces) {
        if (k < pc.from || (pc.to && k > *pc.to)) continue;
        return std::get<PowForm>(pc.form).cmpAt(k, job.threshold);
    }
    return c;
}

BigInt windowCountAnalytic(const CountJob& job, const BigInt& lo, const BigInt& hi) {
    BigInt total = 0;
    const auto& branches = job.model->branches();
    for (size_t i = 0; i < branches.size(); ++i) {
        if (!job.plans[i]) {
            if (effectiveCount(*job.model, i, lo, hi) == 0) continue;
            requirePlan(job, i);
        }
        auto addRegions = [&](const ValuePlan& plan) {
            for (const auto& [rlo, rhi] : plan.regionsGE(job.threshold)) {
                BigInt a = std::max(rlo, lo);
                BigInt b = rhi ? std::min(*rhi, hi) : hi;
                if (a <= b) total += effectiveCount(*job.model, i, a, b);
            }
        };
        addRegions(*job.plans[i]);
        if (job.absolute) addRegions(negatedPlan(*job.plans[i]));
    }
    return total;
}

// branch id per offset in [lo, hi], honoring first-match order
std::vector<uint32_t> classifyWindow(const RVSequenceModel& m, const BigInt& lo,
                                     const BigInt& hi, size_t width) {
    const size_t last = m.branches().size() - 1;
    std::vector<uint32_t> id(width, static_cast<uint32_t>(last));
    for (size_t rj = 0; rj + 1 <= last; ++rj) {
        size_t j = last - 1 - rj;  // later branches first, earlier overwrite
        const IndexSet& s = m.branches()[j].set;
        if (s.intervalDecomposable()) {
            for (const auto& [a, b] : s.intervalsInRange(lo, hi)) {
                size_t oa = mpz_get_ui(BigInt(a - lo).get_mpz_t());
                size_t ob = mpz_get_ui(BigInt(b - lo).get_mpz_t());
                for (size_t o = oa; o <= ob; ++o) id[o] = static_cast<uint32_t>(j);
            }
        } else {
            auto mem = s.membersInRange(lo, hi, width + 1);
            if (!mem) throw std::logic_error("sparse set denser than the window");
            for (const auto& k : *mem)
                id[mpz_get_ui(BigInt(k - lo).get_mpz_t())] = static_cast<uint32_t>(j);
        }
    }
    return id;
}

struct FastPiece {
    unsigned long from, to;
    bool geom = false;
    double aD = 0, bD = 0, eD = 0, qD = 0;
};

std::vector<FastPiece> fastPieces(const ValuePlan& plan, unsigned long lo, unsigned long hi) {
    std::vector<FastPiece> out;
    for (const auto& pc : plan.pieces) {
        unsigned long a = lo, b = hi;
        if (pc.from > lo) {
            if (!pc.from.fits_ulong_p()) continue;
            a = pc.from.get_ui();
        }
        if (pc.to) {
            if (!pc.to->fits_ulong_p()) continue;
            b = std::min(b, pc.to->get_ui());
        }
        if (a > b) continue;
        FastPiece fp;
        fp.from = a;
        fp.to = b;
        if (const auto* f = std::get_if<PowForm>(&pc.form)) {
            fp.aD = f->aD;
            fp.bD = f->bD;
            fp.eD = f->eD;
        } else {
            fp.geom = true;
            fp.qD = std::get<GeomForm>(pc.form).qD;
        }
        out.push_back(fp);
    }
    return out;
}

inline double fastEval(const std::vector<FastPiece>& pieces, unsigned long k) {
    for (const auto& fp : pieces) {
        if (k < fp.from || k > fp.to) continue;
        if (fp.geom) return std::pow(fp.qD, static_cast<double>(k));
        if (fp.bD == 0.0) return fp.aD;
        return fp.aD + fp.bD * std::pow(static_cast<double>(k), fp.eD);
    }
    throw std::logic_error("fastEval: uncovered k");
}

BigInt windowCountEnumerated(const CountJob& job, const BigInt& lo, const BigInt& hi) {
    const size_t width = mpz_get_ui(BigInt(hi - lo + 1).get_mpz_t());
    const auto id = classifyWindow(*job.model, lo, hi, width);
    const size_t nb = job.model->branches().size();

    BigInt count = 0;
    if (hi.fits_ulong_p()) {
        const unsigned long ulo = lo.get_ui(), uhi = hi.get_ui();
        std::vector<std::vector<FastPiece>> fast(nb);
        std::vector<char> have(nb, 0);
        for (unsigned long k = ulo; k <= uhi; ++k) {
            const size_t i = id[k - ulo];
            if (!have[i]) {
                const ValuePlan& plan = requirePlan(job, i);
                if (!plan.doubleOnly) fast[i] = fastPieces(plan, ulo, uhi);
                have[i] = 1;
            }
            const ValuePlan& plan = *job.plans[i];
            double v;
            if (plan.doubleOnly)
                v = (*plan.doubleOnly)(BigInt(k));
            else
                v = fastEval(fast[i], k);
            const double av = job.absolute ? std::fabs(v) : v;
            const double margin =
                1e-9 * std::max({1.0, std::fabs(av), std::fabs(job.thresholdD)});
            if (av > job.thresholdD + margin) {
                ++count;
            } else if (av >= job.thresholdD - margin) {
                if (jobCmpAt(job, plan, BigInt(k)) >= 0) ++count;
            }
        }
        return count;
    }
    // windows beyond 64-bit bounds (still narrow): exact but slower
    BigInt k = lo;
    for (size_t o = 0; o < width; ++o, ++k) {
        const size_t i = id[o];
        const ValuePlan& plan = requirePlan(job, i);
        double v = plan.eval(k);
        const double av = job.absolute ? std::fabs(v) : v;
        const double margin = 1e-9 * std::max({1.0, std::fabs(av), std::fabs(job.thresholdD)});
        if (av > job.thresholdD + margin) {
            ++count;
        } else if (av >= job.thresholdD - margin) {
            if (jobCmpAt(job, plan, k) >= 0) ++count;
        }
    }
    return count;
}

// ---- series scaffolding -----------------------------------------------------------

DiagnosticSeries runCountSeries(const RVSequenceModel& model, const WindowScheme& scheme,
                                const OrderParams& params, const std::vector<long>& ns,
                                const EngineKnobs& knobs, CountJob job, Mode mode) {
    DiagnosticSeries out;
    out.mode = mode;
    out.params = params;
    if (model.limit().isPointMass()) out.candidate = model.limit().pointValue().get_d();
    for (long n : ns) {
        Window w = scheme.window(n);
        SeriesPoint pt;
        pt.n = n;
        pt.lo = w.lo;
        pt.hi = w.hi;
        pt.width = w.width;
        const bool enumerate = w.width <= knobs.enumLimit;
        pt.backend = enumerate ? Backend::enumerated : Backend::analytic;
        BigInt c = enumerate ? windowCountEnumerated(job, w.lo, w.hi)
                             : windowCountAnalytic(job, w.lo, w.hi);
        pt.count = c;
        if (c == 0) {
            pt.density = 0.0;
        } else if (c.fits_ulong_p() && c.get_ui() < (1UL << 53)) {
            pt.density = static_cast<double>(c.get_ui()) / w.hGamma(params.gamma);
        } else {
            pt.density = std::exp(lnBig(c) - params.gamma * w.lnWidth);
        }
        out.points.push_back(std::move(pt));
    }
    return out;
}

std::vector<long> rangeVec(long nFrom, long nTo) {
    if (nFrom > nTo) throw EmptyWindowRange{};
    std::vector<long> ns;
    ns.reserve(static_cast<size_t>(nTo - nFrom + 1));
    for (long n = nFrom; n <= nTo; ++n) ns.push_back(n);
    return ns;
}

// ---- analytic Cesaro bounds ---------------------------------------------------

double bigPow(const BigInt& t, double e) {
    if (t == 0) return 0.0;
    if (t.fits_ulong_p() && t.get_ui() < (1UL << 53))
        return std::pow(static_cast<double>(t.get_ui()), e);
    return std::exp(e * lnBig(t));
}

struct SumBounds {
    double lo = 0.0, hi = 0.0;
};

// certified bounds for sum_{k=A}^{B} k^u via integral comparison; exact
// enumeration when the range is short
SumBounds powerSumBounds(double u, const BigInt& A, const BigInt& B) {
    if (B < A) return {};
    BigInt width = B - A + 1;
    if (width <= 4096 && B.fits_ulong_p()) {
        NeumaierSum s;
        for (unsigned long k = A.get_ui(); k <= B.get_ui(); ++k)
            s.add(std::pow(static_cast<double>(k), u));
        return {s.get(), s.get()};
    }
    if (u == 0.0) {
        double w = bigPow(width, 1.0);
        return {w, w};
    }
    auto integral = [&](const BigInt& x, const BigInt& y) {
        // int_x^y t^u dt, x >= 0
        if (u == -1.0) return lnBig(std::max(y, BigInt(1))) - lnBig(std::max(x, BigInt(1)));
        return (bigPow(y, u + 1.0) - bigPow(x, u + 1.0)) / (u + 1.0);
    };
    SumBounds out;
    if (u < 0.0) {
        out.lo = integral(A, B + 1);
        out.hi = bigPow(A, u) + integral(A, B);
    } else {
        out.lo = integral(A - 1, B);
        out.hi = integral(A, B + 1);
    }
    return out;
}

// sum_{k=A}^{B} x^k for x in (0,1), closed form in the log domain
double geomRangeSum(double lnX, const BigInt& A, const BigInt& B) {
    if (B < A) return 0.0;
    const double xA = std::exp(lnX * bigPow(A, 1.0));
    const double xB1 = std::exp(lnX * bigPow(B + 1, 1.0));
    return (xA - xB1) / (1.0 - std::exp(lnX));
}

// certified bounds for sum over effective members of branch i in [lo,hi] of
// plan(k)^p, accumulated into accLo/accHi
void analyticCesaroBranch(const RVSequenceModel& m, size_t i, const ValuePlan& plan,
                          const BigInt& lo, const BigInt& hi, double p, NeumaierSum& accLo,
                          NeumaierSum& accHi) {
    const IndexSet& set = m.branches()[i].set;
    for (const auto& pc : plan.pieces) {
        BigInt a = std::max(pc.from, lo);
        BigInt b = hi;
        if (pc.to && *pc.to < b) b = *pc.to;
        if (a > b) continue;

        if (const auto* f = std::get_if<PowForm>(&pc.form)) {
            if (f->isConstant()) {
                const double c = std::max(f->constantValue().get_d(), 0.0);
                const double cnt = bigPow(effectiveCount(m, i, a, b), 1.0);
                const double term = (p == 1.0 ? c : std::pow(c, p)) * cnt;
                accLo.add(term);
                accHi.add(term);
                continue;
            }
            const bool mixed = sgn(f->a) != 0;
            if (mixed && p != 1.0)
                throw AnalyticSummationUnavailable(
                    "mixed constant+power form not analytically summable for p != 1");
            // constant part (p == 1 only)
            if (mixed) {
                const double cnt = bigPow(effectiveCount(m, i, a, b), 1.0);
                accLo.add(f->aD * cnt);
                accHi.add(f->aD * cnt);
            }
            // power part: coeff * sum k^(e*p)
            const double coeff = p == 1.0 ? f->bD : std::pow(f->bD, p);
            if (f->bD < 0.0 && p != 1.0)
                throw AnalyticSummationUnavailable("negative power coefficient with p != 1");
            const double u = f->eD * (p == 1.0 ? 1.0 : p);
            SumBounds s;
            bool haveSum = false;
            std::vector<BigInt> removed;
            if (set.intervalDecomposable()) {
                for (const auto& [s0, e0] : set.intervalsInRange(a, b)) {
                    SumBounds sb = powerSumBounds(u, s0, e0);
                    s.lo += sb.lo;
                    s.hi += sb.hi;
                }
                removed = overlapMembers(m, i, a, b);
                haveSum = true;
            } else if (set.kind() == IndexSetKind::perfectSquares) {
                BigInt m1 = isqrt(a - 1) + 1, m2 = isqrt(b);
                SumBounds sb = powerSumBounds(2.0 * u, m1, m2);
                s = sb;
                removed = overlapMembers(m, i, a, b);
                haveSum = true;
            }
            if (haveSum) {
                for (const auto& k : removed) {
                    const double t = bigPow(k, u);
                    s.lo -= t;
                    s.hi -= t;
                }
            } else {
                // sparse set: monotone term bounds from the range endpoints
                const double cnt = bigPow(effectiveCount(m, i, a, b), 1.0);
                const double tA = bigPow(a, u), tB = bigPow(b, u);
                s.lo = cnt * std::min(tA, tB);
                s.hi = cnt * std::max(tA, tB);
            }
            if (coeff >= 0.0) {
                accLo.add(coeff * s.lo);
                accHi.add(coeff * s.hi);
            } else {
                accLo.add(coeff * s.hi);
                accHi.add(coeff * s.lo);
            }
            continue;
        }

        // geometric piece: (q^k)^p = (q^p)^k
        const auto& g = std::get<GeomForm>(pc.form);
        const double lnX = p * std::log(g.qD);
        if (set.intervalDecomposable()) {
            double sLo = 0.0, sHi = 0.0;
            for (const auto& [s0, e0] : set.intervalsInRange(a, b)) {
                double v = geomRangeSum(lnX, s0, e0);
                sLo += v;
                sHi += v;
            }
            for (const auto& k : overlapMembers(m, i, a, b)) {
                const double t = std::exp(lnX * bigPow(k, 1.0));
                sLo -= t;
                sHi -= t;
            }
            accLo.add(sLo);
            accHi.add(sHi);
        } else {
            const double cnt = bigPow(effectiveCount(m, i, a, b), 1.0);
            accLo.add(cnt * std::exp(lnX * bigPow(b, 1.0)));
            accHi.add(cnt * std::exp(lnX * bigPow(a, 1.0)));
        }
    }
}

CountJob exceedanceJob(const RVSequenceModel& model, const OrderParams& params) {
    CountJob job;
    job.model = &model;
    job.threshold = params.delta;
    job.thresholdD = params.delta.get_d();
    job.plans.resize(model.branches().size());
    job.planErrors.resize(model.branches().size());
    for (size_t i = 0; i < model.branches().size(); ++i) {
        try {
            job.plans[i] = model.exceedancePlan(i, params.epsilon);
        } catch (const EpsilonOutOfDomain&) {
            throw;
        } catch (const NonPointLimitWithoutJoint&) {
            throw;
        } catch (...) {
            job.planErrors[i] = std::current_exception();
        }
    }
    return job;
}

}  // namespace

// ---- public series ops ---------------------------------------------------------

DiagnosticSeries densitySeries(const RVSequenceModel& model, const WindowScheme& scheme,
                               const OrderParams& params, long nFrom, long nTo,
                               const EngineKnobs& knobs) {
    return densitySeriesAt(model, scheme, params, rangeVec(nFrom, nTo), knobs);
}

DiagnosticSeries densitySeriesAt(const RVSequenceModel& model, const WindowScheme& scheme,
                                 const OrderParams& params, const std::vector<long>& ns,
                                 const EngineKnobs& knobs) {
    params.check();
    return runCountSeries(model, scheme, params, ns, knobs, exceedanceJob(model, params),
                          Mode::probability);
}

DiagnosticSeries momentSeries(const RVSequenceModel& model, const WindowScheme& scheme,
                              const OrderParams& params, long nFrom, long nTo,
                              const EngineKnobs& knobs) {
    params.check();
    CountJob job;
    job.model = &model;
    job.threshold = params.epsilon;  // Def 3.1 thresholds the moment by epsilon
    job.thresholdD = params.epsilon.get_d();
    job.plans.resize(model.branches().size());
    job.planErrors.resize(model.branches().size());
    for (size_t i = 0; i < model.branches().size(); ++i) {
        try {
            job.plans[i] = model.momentPlan(i, params.r);
        } catch (...) {
            job.planErrors[i] = std::current_exception();
        }
    }
    return runCountSeries(model, scheme, params, rangeVec(nFrom, nTo), knobs, std::move(job),
                          Mode::expectation);
}

DiagnosticSeries cesaroSeries(const RVSequenceModel& model, const WindowScheme& scheme,
                              const OrderParams& params, long nFrom, long nTo,
                              const EngineKnobs& knobs) {
    params.check();
    CountJob job = exceedanceJob(model, params);
    const double p = params.p;

    DiagnosticSeries out;
    out.mode = Mode::cesaro;
    out.params = params;
    if (model.limit().isPointMass()) out.candidate = model.limit().pointValue().get_d();

    for (long n : rangeVec(nFrom, nTo)) {
        Window w = scheme.window(n);
        SeriesPoint pt;
        pt.n = n;
        pt.lo = w.lo;
        pt.hi = w.hi;
        pt.width = w.width;
        const double hg = w.hGamma(params.gamma);
        if (w.width <= knobs.enumLimit) {
            pt.backend = Backend::enumerated;
            const size_t width = mpz_get_ui(BigInt(w.width).get_mpz_t());
            const auto id = classifyWindow(model, w.lo, w.hi, width);
            NeumaierSum sum;
            if (w.hi.fits_ulong_p()) {
                const unsigned long ulo = w.lo.get_ui(), uhi = w.hi.get_ui();
                std::vector<std::vector<FastPiece>> fast(model.branches().size());
                std::vector<char> have(model.branches().size(), 0);
                for (unsigned long k = ulo; k <= uhi; ++k) {
                    const size_t i = id[k - ulo];
                    const ValuePlan& plan = requirePlan(job, i);
                    if (!have[i]) {
                        if (!plan.doubleOnly) fast[i] = fastPieces(plan, ulo, uhi);
                        have[i] = 1;
                    }
                    double v = plan.doubleOnly ? (*plan.doubleOnly)(BigInt(k))
                                               : fastEval(fast[i], k);
                    sum.add(p == 1.0 ? std::max(v, 0.0) : std::pow(std::max(v, 0.0), p));
                }
            } else {
                BigInt k = w.lo;
                for (size_t o = 0; o < width; ++o, ++k) {
                    const ValuePlan& plan = requirePlan(job, id[o]);
                    double v = plan.eval(k);
                    sum.add(p == 1.0 ? std::max(v, 0.0) : std::pow(std::max(v, 0.0), p));
                }
            }
            pt.cesaroLo = pt.cesaroHi = sum.get() / hg;
        } else {
            pt.backend = Backend::analytic;
            NeumaierSum lo, hi;
            for (size_t i = 0; i < model.branches().size(); ++i) {
                if (!job.plans[i]) {
                    if (effectiveCount(model, i, w.lo, w.hi) == 0) continue;
                    std::rethrow_exception(job.planErrors[i]);
                }
                analyticCesaroBranch(model, i, *job.plans[i], w.lo, w.hi, p, lo, hi);
            }
            pt.cesaroLo = lo.get() / hg;
            pt.cesaroHi = hi.get() / hg;
        }
        out.points.push_back(std::move(pt));
    }
    return out;
}

std::vector<DiagnosticSeries> cdfDensitySeries(const RVSequenceModel& model,
                                               const WindowScheme& scheme,
                                               const OrderParams& params,
                                               const std::vector<Rational>& xGrid, long nFrom,
                                               long nTo, const EngineKnobs& knobs) {
    params.check();
    for (const auto& x : xGrid)
        for (const auto& [v, pr] : model.limit().atoms)
            if (std::fabs(Rational(x - v).get_d()) <= 1e-9)
                throw GridHitsDiscontinuity("grid point x=" + std::to_string(x.get_d()) +
                                            " hits a jump of the limit CDF");
    std::vector<DiagnosticSeries> out;
    for (const auto& x : xGrid) {
        CountJob job;
        job.model = &model;
        job.threshold = params.delta;
        job.thresholdD = params.delta.get_d();
        job.absolute = true;
        job.plans.resize(model.branches().size());
        job.planErrors.resize(model.branches().size());
        for (size_t i = 0; i < model.branches().size(); ++i) {
            try {
                job.plans[i] = model.cdfGapPlan(i, x);
            } catch (...) {
                job.planErrors[i] = std::current_exception();
            }
        }
        auto series = runCountSeries(model, scheme, params, rangeVec(nFrom, nTo), knobs,
                                     std::move(job), Mode::distribution);
        series.candidate.reset();
        series.candidateDesc = "F (limit law)";
        series.gridX = x.get_d();
        out.push_back(std::move(series));
    }
    return out;
}

DiagnosticSeries realStatDensity(const std::function<double(const BigInt&)>& seq,
                                 const WindowScheme& scheme, double gamma, double delta,
                                 long nFrom, long nTo, const EngineKnobs& knobs) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in (0,1]");
    DiagnosticSeries out;
    out.mode = Mode::realSequence;
    out.params.gamma = gamma;
    out.params.delta = ratFromDouble(delta);
    for (long n : rangeVec(nFrom, nTo)) {
        Window w = scheme.window(n);
        if (w.width > knobs.enumLimit)
            throw AnalyticCountingUnavailable(
                "realStatDensity enumerates windows; width exceeds enumLimit at n=" +
                std::to_string(n));
        SeriesPoint pt;
        pt.n = n;
        pt.lo = w.lo;
        pt.hi = w.hi;
        pt.width = w.width;
        pt.backend = Backend::enumerated;
        BigInt c = 0;
        for (BigInt k = w.lo; k <= w.hi; ++k)
            if (seq(k) >= delta) ++c;
        pt.count = c;
        pt.density = c == 0 ? 0.0 : std::exp(lnBig(c) - gamma * w.lnWidth);
        out.points.push_back(std::move(pt));
    }
    return out;
}

// ---- statistical limsup / liminf ------------------------------------------------

namespace {

struct LevelDensities {
    std::vector<double> values;                  // sorted distinct observed values
    std::vector<std::vector<double>> geDensity;  // [window][value idx]: density of {x_k >= v}
    std::vector<std::vector<double>> leDensity;  // density of {x_k <= v}
    size_t tailStart = 0;
};

LevelDensities collectLevels(const std::function<double(const BigInt&)>& seq,
                             const WindowScheme& scheme, double gamma, long nFrom, long nTo,
                             double tailFraction) {
    if (nFrom > nTo) throw EmptyWindowRange{};
    std::set<double> distinct;
    for (long n = nFrom; n <= nTo; ++n) {
        Window w = scheme.window(n);
        for (BigInt k = w.lo; k <= w.hi; ++k) {
            distinct.insert(seq(k));
            if (distinct.size() > 4096)
                throw EngineError("statLimSup/Inf: too many distinct sequence values");
        }
    }
    LevelDensities out;
    out.values.assign(distinct.begin(), distinct.end());
    const size_t m = out.values.size();
    for (long n = nFrom; n <= nTo; ++n) {
        Window w = scheme.window(n);
        std::vector<double> histo(m, 0.0);
        for (BigInt k = w.lo; k <= w.hi; ++k) {
            double v = seq(k);
            size_t idx = static_cast<size_t>(
                std::upper_bound(out.values.begin(), out.values.end(), v) - out.values.begin());
            histo[idx - 1] += 1.0;  // v equals values[idx-1]
        }
        const double hg = w.hGamma(gamma);
        std::vector<double> ge(m), le(m);
        double acc = 0.0;
        for (size_t i = m; i-- > 0;) {
            acc += histo[i];
            ge[i] = acc / hg;
        }
        acc = 0.0;
        for (size_t i = 0; i < m; ++i) {
            acc += histo[i];
            le[i] = acc / hg;
        }
        out.geDensity.push_back(std::move(ge));
        out.leDensity.push_back(std::move(le));
    }
    const size_t wins = out.geDensity.size();
    const size_t tailLen = std::max<size_t>(
        1, static_cast<size_t>(std::ceil(tailFraction * static_cast<double>(wins))));
    out.tailStart = wins - tailLen;
    return out;
}

}  // namespace

double statLimSup(const std::function<double(const BigInt&)>& seq, const WindowScheme& scheme,
                  double gamma, double eta, long nFrom, long nTo, double tailFraction) {
    auto lv = collectLevels(seq, scheme, gamma, nFrom, nTo, tailFraction);
    double best = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < lv.values.size(); ++i) {
        double tailMax = 0.0;
        for (size_t wn = lv.tailStart; wn < lv.geDensity.size(); ++wn)
            tailMax = std::max(tailMax, lv.geDensity[wn][i]);
        if (tailMax >= eta) best = std::max(best, lv.values[i]);
    }
    return best;
}

double statLimInf(const std::function<double(const BigInt&)>& seq, const WindowScheme& scheme,
                  double gamma, double eta, long nFrom, long nTo, double tailFraction) {
    auto lv = collectLevels(seq, scheme, gamma, nFrom, nTo, tailFraction);
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < lv.values.size(); ++i) {
        double tailMax = 0.0;
        for (size_t wn = lv.tailStart; wn < lv.leDensity.size(); ++wn)
            tailMax = std::max(tailMax, lv.leDensity[wn][i]);
        if (tailMax >= eta) best = std::min(best, lv.values[i]);
    }
    return best;
}

// ---- verdict ---------------------------------------------------------------------

Verdict verdict(const DiagnosticSeries& series, const VerdictKnobs& knobs) {
    if (series.points.empty()) throw EmptyWindowRange{};
    if (!(knobs.tau > 0.0)) throw std::invalid_argument("tau must be > 0");
    if (!(knobs.tailFraction > 0.0 && knobs.tailFraction <= 1.0))
        throw std::invalid_argument("tailFraction must be in (0,1]");

    const size_t n = series.points.size();
    const size_t tailLen = std::max<size_t>(
        1, static_cast<size_t>(std::ceil(knobs.tailFraction * static_cast<double>(n))));
    const size_t start = n - tailLen;

    auto valLo = [&](const SeriesPoint& pt) {
        return pt.cesaroLo ? *pt.cesaroLo : pt.density;
    };
    auto valHi = [&](const SeriesPoint& pt) {
        return pt.cesaroHi ? *pt.cesaroHi : pt.density;
    };

    Verdict v;
    v.mode = series.mode;
    v.candidate = series.candidate;
    v.candidateDesc = series.candidateDesc;
    v.knobs = knobs;
    v.horizonUsed = series.points.back().n;
    v.tailStartN = series.points[start].n;

    double mx = -std::numeric_limits<double>::infinity();
    double mn = std::numeric_limits<double>::infinity();
    // least-squares slope of the tail midpoints against n
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = static_cast<double>(tailLen);
    for (size_t i = start; i < n; ++i) {
        const SeriesPoint& pt = series.points[i];
        mx = std::max(mx, valHi(pt));
        mn = std::min(mn, valLo(pt));
        const double x = static_cast<double>(pt.n);
        const double y = 0.5 * (valLo(pt) + valHi(pt));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    v.tailMax = mx;
    v.tailMin = mn;
    const double denom = cnt * sxx - sx * sx;
    v.slope = denom > 0.0 ? (cnt * sxy - sx * sy) / denom : 0.0;

    if (v.slope > knobs.slopeDeadband)
        v.trend = Trend::increasing;
    else if (v.slope < -knobs.slopeDeadband)
        v.trend = Trend::decreasing;
    else if (mx - mn > knobs.tau)
        v.trend = Trend::oscillating;
    else
        v.trend = Trend::flat;

    if (mx < knobs.tau && (v.trend == Trend::decreasing || v.trend == Trend::flat))
        v.decision = Decision::convergesTo;
    else if (mn > knobs.tau && v.trend != Trend::decreasing)
        v.decision = Decision::fails;
    else
        v.decision = Decision::inconclusive;
    return v;
}

// ---- compareModes -----------------------------------------------------------------

std::vector<Rational> defaultCdfGrid(const LimitLaw& limit) {
    std::vector<Rational> atoms;
    for (const auto& [v, p] : limit.atoms) atoms.push_back(v);
    std::sort(atoms.begin(), atoms.end());
    std::vector<Rational> grid;
    if (atoms.empty()) return grid;
    grid.push_back(atoms.front() - 1);
    for (size_t i = 0; i + 1 < atoms.size(); ++i)
        grid.push_back((atoms[i] + atoms[i + 1]) / 2);
    grid.push_back(atoms.back() + 1);
    return grid;
}

ModeComparison compareModes(const RVSequenceModel& model, const WindowScheme& scheme,
                            const OrderParams& params, long nFrom, long nTo,
                            const EngineKnobs& knobs, const VerdictKnobs& vk,
                            const std::vector<Rational>& xGrid) {
    ModeComparison out;
    try {
        out.probability = densitySeries(model, scheme, params, nFrom, nTo, knobs);
        out.probabilityVerdict = verdict(*out.probability, vk);
    } catch (const std::exception& e) {
        out.skipped.push_back(std::string("probability: ") + e.what());
    }
    try {
        out.cesaro = cesaroSeries(model, scheme, params, nFrom, nTo, knobs);
        out.cesaroVerdict = verdict(*out.cesaro, vk);
    } catch (const std::exception& e) {
        out.skipped.push_back(std::string("cesaro: ") + e.what());
    }
    try {
        out.expectation = momentSeries(model, scheme, params, nFrom, nTo, knobs);
        out.expectationVerdict = verdict(*out.expectation, vk);
    } catch (const std::exception& e) {
        out.skipped.push_back(std::string("expectation: ") + e.what());
    }
    try {
        auto grid = xGrid.empty() ? defaultCdfGrid(model.limit()) : xGrid;
        out.distribution = cdfDensitySeries(model, scheme, params, grid, nFrom, nTo, knobs);
        std::optional<Verdict> agg;
        for (const auto& s : out.distribution) {
            Verdict v = verdict(s, vk);
            if (!agg) {
                agg = v;
            } else {
                auto rank = [](Decision d) {
                    return d == Decision::fails ? 2 : d == Decision::inconclusive ? 1 : 0;
                };
                if (rank(v.decision) > rank(agg->decision)) agg = v;
            }
        }
        if (agg) {
            agg->candidateDesc = "F (limit law)";
            out.distributionVerdict = agg;
        }
    } catch (const std::exception& e) {
        out.skipped.push_back(std::string("distribution: ") + e.what());
    }

    // pointwise Markov certification on windows where both series enumerated
    if (out.probability && out.cesaro) {
        out.cert.checked = true;
        const double dp = std::pow(params.delta.get_d(), params.p);
        for (size_t i = 0; i < out.probability->points.size(); ++i) {
            const auto& a = out.probability->points[i];
            const auto& c = out.cesaro->points[i];
            if (a.backend != Backend::enumerated || c.backend != Backend::enumerated) continue;
            const double tol = 1e-9 * std::max(1.0, *c.cesaroHi);
            if (a.density > *c.cesaroHi / dp + tol) {
                out.cert.markovOk = false;
                out.cert.markovViolationN = a.n;
                break;
            }
            if (params.gamma == 1.0) {
                out.cert.reverseChecked = true;
                if (*c.cesaroHi > dp + a.density + tol) {
                    out.cert.reverseOk = false;
                    out.cert.reverseViolationN = a.n;
                    break;
                }
            }
        }
    }
    return out;
}

}  // namespace abstat
