#include "abstat/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace abstat {

// ---- ValuePlan ---------------------------------------------------------------

ValuePlan ValuePlan::constant(const Rational& c) {
    ValuePlan p;
    p.pieces.push_back({BigInt(1), std::nullopt, PowForm::constant(c)});
    return p;
}

namespace {
const ValuePlan::Piece& pieceFor(const ValuePlan& plan, const BigInt& k) {
    for (const auto& pc : plan.pieces)
        if (k >= pc.from && (!pc.to || k <= *pc.to)) return pc;
    throw std::logic_error("ValuePlan: no piece covers k");
}
}  // namespace

double ValuePlan::eval(const BigInt& k) const {
    if (doubleOnly) return (*doubleOnly)(k);
    const auto& pc = pieceFor(*this, k);
    if (std::holds_alternative<PowForm>(pc.form)) return std::get<PowForm>(pc.form).eval(k);
    return std::get<GeomForm>(pc.form).eval(k);
}

double ValuePlan::evalU64(unsigned long k) const { return eval(BigInt(k)); }

int ValuePlan::cmpAt(const BigInt& k, const Rational& t, double tD) const {
    if (doubleOnly) {
        double v = (*doubleOnly)(k);
        double margin = 1e-9 * std::max({1.0, std::fabs(v), std::fabs(tD)});
        if (v > tD + margin) return 1;
        if (v < tD - margin) return -1;
        throw std::runtime_error("ValuePlan: comparison too close to resolve in double precision");
    }
    const auto& pc = pieceFor(*this, k);
    if (std::holds_alternative<PowForm>(pc.form)) {
        const auto& f = std::get<PowForm>(pc.form);
        // fast double path, exact only near the threshold
        double v = f.eval(k);
        double margin = 1e-9 * std::max({1.0, std::fabs(v), std::fabs(tD)});
        if (v > tD + margin) return 1;
        if (v < tD - margin) return -1;
        return f.cmpAt(k, t);
    }
    return std::get<GeomForm>(pc.form).cmpAt(k, t);
}

std::vector<std::pair<BigInt, std::optional<BigInt>>> ValuePlan::regionsGE(const Rational& t) const {
    if (doubleOnly)
        throw std::runtime_error("ValuePlan: analytic region inversion unavailable for this branch");
    std::vector<std::pair<BigInt, std::optional<BigInt>>> out;
    auto clip = [&](const BigInt& lo, const std::optional<BigInt>& hi, const ValuePlan::Piece& pc) {
        BigInt a = std::max(lo, pc.from);
        std::optional<BigInt> b = hi;
        if (pc.to && (!b || *pc.to < *b)) b = pc.to;
        if (!b || a <= *b) out.emplace_back(a, b);
    };
    for (const auto& pc : pieces) {
        if (std::holds_alternative<PowForm>(pc.form)) {
            auto reg = std::get<PowForm>(pc.form).regionGE(t);
            using K = PowForm::Region::Kind;
            switch (reg.kind) {
                case K::all: clip(pc.from, pc.to, pc); break;
                case K::none: break;
                case K::atMost:
                    if (reg.bound >= pc.from) clip(pc.from, std::optional<BigInt>(reg.bound), pc);
                    break;
                case K::atLeast: clip(std::max(reg.bound, pc.from), pc.to, pc); break;
            }
        } else {
            auto kMax = std::get<GeomForm>(pc.form).maxKGE(t);
            if (!kMax) {
                clip(pc.from, pc.to, pc);
            } else if (*kMax >= pc.from) {
                clip(pc.from, std::optional<BigInt>(*kMax), pc);
            }
        }
    }
    return out;
}

// ---- model helpers -----------------------------------------------------------

namespace {

// Exceedance of one discrete branch against a point limit x0 at threshold
// eps, as a piecewise power form. At most one index-valued atom per branch.
ValuePlan discreteExceedancePlan(const DiscreteLaw& law, const Rational& x0, const Rational& eps) {
    // constant-value atoms: indicator |v - x0| >= eps is k-independent
    Rational constA = 0, constB = 0;
    Rational powExp = 0;
    bool havePow = false;
    const Atom* indexAtom = nullptr;
    for (const auto& at : law.atoms) {
        if (at.isIndexValue) {
            if (indexAtom) throw std::runtime_error("at most one index-valued atom per branch");
            indexAtom = &at;
            continue;
        }
        if (abs(Rational(at.value - x0)) >= eps) {
            // include this atom's probability
            if (at.prob.isConstant()) {
                constA += at.prob.constantValue();
            } else {
                if (havePow && powExp != at.prob.e)
                    throw std::runtime_error("mixed decay exponents in one branch");
                havePow = true;
                powExp = at.prob.e;
                constA += at.prob.a;
                constB += at.prob.b;
            }
        }
    }
    auto makeForm = [&](bool includeIndexAtom) -> PowForm {
        Rational a = constA, b = constB;
        Rational e = powExp;
        bool hp = havePow;
        if (includeIndexAtom) {
            const PowForm& p = indexAtom->prob;
            if (p.isConstant()) {
                a += p.constantValue();
            } else {
                if (hp && e != p.e) throw std::runtime_error("mixed decay exponents in one branch");
                hp = true;
                e = p.e;
                a += p.a;
                b += p.b;
            }
        }
        return hp ? PowForm::power(a, b, e) : PowForm::constant(a);
    };

    ValuePlan plan;
    if (!indexAtom) {
        plan.pieces.push_back({BigInt(1), std::nullopt, makeForm(false)});
        return plan;
    }
    // indicator |k - x0| >= eps: true for k <= floor(x0 - eps) and
    // k >= ceil(x0 + eps)
    Rational lowCut = x0 - eps;   // true while k <= lowCut
    Rational highCut = x0 + eps;  // true from k >= highCut
    BigInt lowMax;                // largest k with indicator true on the low side
    bool haveLow = sgn(lowCut) > 0;
    if (haveLow) {
        lowMax = BigInt(lowCut.get_num()) / BigInt(lowCut.get_den());  // floor for positive
        if (lowMax < 1) haveLow = false;
    }
    BigInt highMin = 1;
    {
        // ceil(highCut) for positive highCut; if highCut <= 1 indicator holds everywhere
        if (highCut > 1) {
            BigInt q = BigInt(highCut.get_num()) / BigInt(highCut.get_den());
            highMin = (Rational(q) == highCut) ? q : q + 1;
        }
    }
    if (haveLow && lowMax >= highMin - 1) {
        // indicator true for all k
        plan.pieces.push_back({BigInt(1), std::nullopt, makeForm(true)});
        return plan;
    }
    BigInt start = 1;
    if (haveLow) {
        plan.pieces.push_back({start, std::optional<BigInt>(lowMax), makeForm(true)});
        start = lowMax + 1;
    }
    if (start < highMin)
        plan.pieces.push_back({start, std::optional<BigInt>(highMin - 1), makeForm(false)});
    plan.pieces.push_back({std::max(start, highMin), std::nullopt, makeForm(true)});
    return plan;
}

ValuePlan jointExceedancePlan(const JointLaw& law, const Rational& eps) {
    Rational constA = 0, constB = 0, powExp = 0;
    bool havePow = false;
    for (const auto& at : law.atoms) {
        if (abs(Rational(at.x - at.xLimit)) >= eps) {
            if (at.prob.isConstant()) {
                constA += at.prob.constantValue();
            } else {
                if (havePow && powExp != at.prob.e)
                    throw std::runtime_error("mixed decay exponents in one branch");
                havePow = true;
                powExp = at.prob.e;
                constA += at.prob.a;
                constB += at.prob.b;
            }
        }
    }
    ValuePlan plan;
    plan.pieces.push_back({BigInt(1), std::nullopt,
                           havePow ? PowForm::power(constA, constB, powExp)
                                   : PowForm::constant(constA)});
    return plan;
}

ValuePlan closedFormExceedancePlan(const ClosedFormLaw& law, const Rational& eps) {
    if (!(eps > law.epsLo && eps < law.epsHi))
        throw EpsilonOutOfDomain("epsilon outside the declared domain of the closed-form branch");
    ValuePlan plan;
    if (law.family == ClosedFormLaw::Family::constantOne) {
        plan.pieces.push_back({BigInt(1), std::nullopt, PowForm::constant(1)});
        return plan;
    }
    Rational q = 1 - eps / law.scale;
    if (!(sgn(q) > 0 && q < 1))
        throw EpsilonOutOfDomain("geometric base outside (0,1)");
    GeomForm g;
    g.q = q;
    g.qD = q.get_d();
    plan.pieces.push_back({BigInt(1), std::nullopt, g});
    return plan;
}

}  // namespace

// ---- RVSequenceModel ----------------------------------------------------------

RVSequenceModel::RVSequenceModel(std::vector<Branch> branches, LimitLaw limit,
                                 std::optional<Rational> declaredBound,
                                 std::optional<BigInt> maxValidIndex)
    : branches_(std::move(branches)), limit_(std::move(limit)),
      boundM_(std::move(declaredBound)), maxValidIndex_(std::move(maxValidIndex)) {
    validate();
    if (!boundM_) {
        // infer |X| bound from constant atoms when every branch allows it
        Rational m = 0;
        bool ok = true;
        for (const auto& br : branches_) {
            if (const auto* d = std::get_if<DiscreteLaw>(&br.law)) {
                for (const auto& at : d->atoms) {
                    if (at.isIndexValue) { ok = false; break; }
                    m = std::max(m, Rational(abs(at.value)));
                }
            } else if (const auto* j = std::get_if<JointLaw>(&br.law)) {
                for (const auto& at : j->atoms)
                    m = std::max({m, Rational(abs(at.x)), Rational(abs(at.xLimit))});
            } else {
                ok = false;
            }
            if (!ok) break;
        }
        if (ok) {
            for (const auto& [v, p] : limit_.atoms) m = std::max(m, Rational(abs(v)));
            boundM_ = m;
        }
    }
}

void RVSequenceModel::validate() const {
    if (branches_.empty()) throw std::invalid_argument("model needs at least one branch");
    if (branches_.back().set.kind() != IndexSetKind::all)
        throw std::invalid_argument("final default branch (index set 'all') is mandatory");
    if (limit_.atoms.empty() && !std::holds_alternative<BoundCombLaw>(branches_.front().law))
        throw std::invalid_argument("limit law required");
    Rational tot = 0;
    for (const auto& [v, p] : limit_.atoms) {
        if (sgn(p) < 0) throw std::invalid_argument("negative limit atom probability");
        tot += p;
    }
    if (!limit_.atoms.empty() && tot != 1)
        throw std::invalid_argument("limit law probabilities must sum to 1");

    for (const auto& br : branches_) {
        if (const auto* d = std::get_if<DiscreteLaw>(&br.law)) {
            // probabilities must sum to one identically in k, and each stays
            // inside [0,1] on k >= 1 (monotone single-term forms: endpoints)
            Rational sumA = 0, sumB = 0;
            for (const auto& at : d->atoms) {
                const PowForm& p = at.prob;
                if (sgn(p.b) != 0 && sgn(p.e) > 0)
                    throw std::invalid_argument("probability form growing in k");
                Rational at1 = p.a + p.b;  // value at k=1
                Rational atInf = p.a;      // limit as k -> inf (e < 0)
                if (sgn(p.b) == 0 || sgn(p.e) == 0) atInf = at1;
                if (at1 < 0 || at1 > 1 || atInf < 0 || atInf > 1)
                    throw std::invalid_argument("atom probability leaves [0,1]");
                sumA += (sgn(p.e) == 0) ? Rational(p.a + p.b) : p.a;
                if (sgn(p.e) != 0) sumB += p.b;
            }
            if (sumA != 1 || sumB != 0)
                throw std::invalid_argument("atom probabilities must sum to 1 for every k");
            // distinct constant atom values
            for (size_t i = 0; i < d->atoms.size(); ++i)
                for (size_t j = i + 1; j < d->atoms.size(); ++j)
                    if (!d->atoms[i].isIndexValue && !d->atoms[j].isIndexValue &&
                        d->atoms[i].value == d->atoms[j].value)
                        throw std::invalid_argument("duplicate atom values");
        } else if (const auto* j = std::get_if<JointLaw>(&br.law)) {
            Rational sumA = 0, sumB = 0;
            for (const auto& at : j->atoms) {
                if (sgn(at.prob.b) != 0 && sgn(at.prob.e) > 0)
                    throw std::invalid_argument("probability form growing in k");
                sumA += (sgn(at.prob.e) == 0) ? Rational(at.prob.a + at.prob.b) : at.prob.a;
                if (sgn(at.prob.e) != 0) sumB += at.prob.b;
            }
            if (sumA != 1 || sumB != 0)
                throw std::invalid_argument("joint probabilities must sum to 1 for every k");
        }
    }

    // closed-form shadow agreement on sampled indices
    for (const auto& br : branches_) {
        if (!br.shadow || !std::holds_alternative<DiscreteLaw>(br.law)) continue;
        if (!limit_.isPointMass()) continue;
        for (const Rational& eps : {Rational(1, 4), Rational(1, 2), Rational(3, 4)}) {
            if (!(eps > br.shadow->epsLo && eps < br.shadow->epsHi)) continue;
            ValuePlan direct = discreteExceedancePlan(std::get<DiscreteLaw>(br.law),
                                                      limit_.pointValue(), eps);
            ValuePlan shadow = closedFormExceedancePlan(*br.shadow, eps);
            for (unsigned long k : {1UL, 2UL, 3UL, 5UL, 10UL, 100UL, 1000UL}) {
                if (std::fabs(direct.eval(BigInt(k)) - shadow.eval(BigInt(k))) > 1e-12)
                    throw std::invalid_argument("closed-form shadow disagrees with discrete atoms");
            }
        }
    }
}

size_t RVSequenceModel::branchIndexOf(const BigInt& k) const {
    if (k < 1) throw std::domain_error("index k must be >= 1");
    if (maxValidIndex_ && k > *maxValidIndex_)
        throw ModelDomainExceeded("index k beyond the model's declared domain");
    for (size_t i = 0; i + 1 < branches_.size(); ++i)
        if (branches_[i].set.member(k)) return i;
    return branches_.size() - 1;
}

ValuePlan RVSequenceModel::exceedancePlan(size_t branchIdx, const Rational& eps) const {
    if (sgn(eps) <= 0) throw std::invalid_argument("epsilon must be positive");
    const Branch& br = branches_.at(branchIdx);
    if (const auto* d = std::get_if<DiscreteLaw>(&br.law)) {
        if (!limit_.isPointMass()) throw NonPointLimitWithoutJoint{};
        return discreteExceedancePlan(*d, limit_.pointValue(), eps);
    }
    if (const auto* j = std::get_if<JointLaw>(&br.law)) return jointExceedancePlan(*j, eps);
    if (const auto* c = std::get_if<ClosedFormLaw>(&br.law)) return closedFormExceedancePlan(*c, eps);
    const auto& bc = std::get<BoundCombLaw>(br.law);
    ValuePlan plan;
    auto a = bc.a;
    auto b = bc.b;
    Rational epsA = sgn(bc.cA) == 0 ? Rational(0) : Rational(eps / (2 * abs(bc.cA)));
    Rational epsB = sgn(bc.cB) == 0 ? Rational(0) : Rational(eps / (2 * abs(bc.cB)));
    bool useA = sgn(bc.cA) != 0, useB = sgn(bc.cB) != 0;
    plan.doubleOnly = [a, b, epsA, epsB, useA, useB](const BigInt& k) {
        double s = 0.0;
        if (useA) s += a->exceedanceProb(k, epsA);
        if (useB) s += b->exceedanceProb(k, epsB);
        return std::min(1.0, s);
    };
    return plan;
}

ValuePlan RVSequenceModel::momentPlan(size_t branchIdx, const Rational& r) const {
    if (sgn(r) <= 0) throw std::invalid_argument("moment order r must be positive");
    const Branch& br = branches_.at(branchIdx);
    const bool rIsInt = r.get_den() == 1;

    auto devPow = [&](const Rational& dev) -> std::optional<Rational> {
        // |dev|^r exactly, when representable
        Rational d = abs(dev);
        if (d == 0 || d == 1) return d;
        if (rIsInt) return ratPowUi(d, r.get_num().get_ui());
        return std::nullopt;
    };

    std::vector<std::pair<Rational, PowForm>> terms;  // (dev^r exact, prob form)
    bool exact = true;
    std::vector<std::pair<double, const PowForm*>> dTerms;  // double fallback
    const Atom* indexAtom = nullptr;

    if (const auto* d = std::get_if<DiscreteLaw>(&br.law)) {
        if (!limit_.isPointMass()) throw NonPointLimitWithoutJoint{};
        const Rational& x0 = limit_.pointValue();
        for (const auto& at : d->atoms) {
            if (at.isIndexValue) {
                indexAtom = &at;
                continue;
            }
            auto dp = devPow(at.value - x0);
            if (dp) {
                terms.emplace_back(*dp, at.prob);
            } else {
                exact = false;
            }
            dTerms.emplace_back(std::pow(std::fabs(Rational(at.value - x0).get_d()), r.get_d()), &at.prob);
        }
        if (indexAtom) {
            // |k - x0|^r * (a + b k^e): exactly supported for x0 = 0, a = 0
            if (limit_.pointValue() == 0 && sgn(indexAtom->prob.a) == 0) {
                Rational e2 = indexAtom->prob.e + r;
                e2.canonicalize();
                terms.emplace_back(Rational(1),
                                   PowForm::power(Rational(0), indexAtom->prob.b, e2));
            } else {
                exact = false;
            }
        }
    } else if (const auto* j = std::get_if<JointLaw>(&br.law)) {
        for (const auto& at : j->atoms) {
            auto dp = devPow(at.x - at.xLimit);
            if (dp) {
                terms.emplace_back(*dp, at.prob);
            } else {
                exact = false;
            }
            dTerms.emplace_back(std::pow(std::fabs(Rational(at.x - at.xLimit).get_d()), r.get_d()),
                                &at.prob);
        }
    } else {
        throw MomentUnavailable{};
    }

    if (exact) {
        // sum_i dev_i^r * (a_i + b_i k^{e_i}); constants plus one shared exponent
        Rational A = 0, B = 0, E = 0;
        bool havePow = false;
        for (const auto& [dp, pf] : terms) {
            if (pf.isConstant()) {
                A += dp * pf.constantValue();
            } else {
                Rational contribB = dp * pf.b;
                Rational contribA = dp * pf.a;
                A += contribA;
                if (sgn(contribB) != 0) {
                    if (havePow && E != pf.e) {
                        exact = false;
                        break;
                    }
                    havePow = true;
                    E = pf.e;
                    B += contribB;
                }
            }
        }
        if (exact) {
            ValuePlan plan;
            plan.pieces.push_back({BigInt(1), std::nullopt,
                                   havePow ? PowForm::power(A, B, E) : PowForm::constant(A)});
            return plan;
        }
    }

    // double-only moment evaluation (covers non-integer r with general devs)
    const Rational x0 = limit_.isPointMass() ? limit_.pointValue() : Rational(0);
    const double rD = r.get_d();
    const Branch* brp = &br;
    const bool joint = std::holds_alternative<JointLaw>(br.law);
    ValuePlan plan;
    plan.doubleOnly = [brp, x0, rD, joint](const BigInt& k) {
        double s = 0.0;
        if (joint) {
            for (const auto& at : std::get<JointLaw>(brp->law).atoms)
                s += std::pow(std::fabs(Rational(at.x - at.xLimit).get_d()), rD) * at.prob.eval(k);
        } else {
            for (const auto& at : std::get<DiscreteLaw>(brp->law).atoms) {
                double v = at.isIndexValue ? (k.fits_ulong_p()
                                                  ? static_cast<double>(k.get_ui())
                                                  : std::exp(lnBig(k)))
                                           : at.value.get_d();
                s += std::pow(std::fabs(v - x0.get_d()), rD) * at.prob.eval(k);
            }
        }
        return s;
    };
    return plan;
}

ValuePlan RVSequenceModel::cdfGapPlan(size_t branchIdx, const Rational& x) const {
    const Branch& br = branches_.at(branchIdx);
    const Rational fLimit = limit_.cdf(x);
    Rational A = -fLimit, B = 0, E = 0;
    bool havePow = false;
    const Atom* indexAtom = nullptr;
    if (const auto* d = std::get_if<DiscreteLaw>(&br.law)) {
        for (const auto& at : d->atoms) {
            if (at.isIndexValue) {
                indexAtom = &at;
                continue;
            }
            if (at.value <= x) {
                if (at.prob.isConstant()) {
                    A += at.prob.constantValue();
                } else {
                    if (havePow && E != at.prob.e)
                        throw std::runtime_error("mixed decay exponents in one branch");
                    havePow = true;
                    E = at.prob.e;
                    A += at.prob.a;
                    B += at.prob.b;
                }
            }
        }
    } else if (const auto* j = std::get_if<JointLaw>(&br.law)) {
        for (const auto& at : j->atoms) {
            if (at.x <= x) {
                if (at.prob.isConstant()) {
                    A += at.prob.constantValue();
                } else {
                    if (havePow && E != at.prob.e)
                        throw std::runtime_error("mixed decay exponents in one branch");
                    havePow = true;
                    E = at.prob.e;
                    A += at.prob.a;
                    B += at.prob.b;
                }
            }
        }
    } else {
        throw CdfUnavailable{};
    }
    ValuePlan plan;
    if (!indexAtom) {
        plan.pieces.push_back({BigInt(1), std::nullopt,
                               havePow ? PowForm::power(A, B, E) : PowForm::constant(A)});
        return plan;
    }
    // the index-valued atom contributes its probability while k <= x
    BigInt xFloor = 0;
    bool anyLow = sgn(x) > 0;
    if (anyLow) xFloor = BigInt(x.get_num()) / BigInt(x.get_den());
    auto withAtom = [&](bool inc) -> PowForm {
        Rational a = A, b = B, e = E;
        bool hp = havePow;
        if (inc) {
            const PowForm& p = indexAtom->prob;
            if (p.isConstant()) {
                a += p.constantValue();
            } else {
                if (hp && e != p.e) throw std::runtime_error("mixed decay exponents in one branch");
                hp = true;
                e = p.e;
                a += p.a;
                b += p.b;
            }
        }
        return hp ? PowForm::power(a, b, e) : PowForm::constant(a);
    };
    if (anyLow && xFloor >= 1) {
        plan.pieces.push_back({BigInt(1), std::optional<BigInt>(xFloor), withAtom(true)});
        plan.pieces.push_back({xFloor + 1, std::nullopt, withAtom(false)});
    } else {
        plan.pieces.push_back({BigInt(1), std::nullopt, withAtom(false)});
    }
    return plan;
}

double RVSequenceModel::exceedanceProb(const BigInt& k, const Rational& eps) const {
    return exceedancePlan(branchIndexOf(k), eps).eval(k);
}

std::optional<Rational> RVSequenceModel::exceedanceProbExact(const BigInt& k,
                                                             const Rational& eps) const {
    ValuePlan plan = exceedancePlan(branchIndexOf(k), eps);
    if (plan.doubleOnly) return std::nullopt;
    for (const auto& pc : plan.pieces) {
        if (k < pc.from || (pc.to && k > *pc.to)) continue;
        if (const auto* f = std::get_if<PowForm>(&pc.form)) {
            if (f->isConstant()) return f->constantValue();
            // a + b k^e rational iff k^|e| is rational: |e| = u/v needs k a v-th power
            const Rational absE = abs(f->e);
            unsigned long u = absE.get_num().get_ui(), v = absE.get_den().get_ui();
            BigInt root = nthRootFloor(k, v);
            if (powUi(root, v) != k) return std::nullopt;
            Rational kPow(powUi(root, u));
            if (sgn(f->e) < 0) kPow = 1 / kPow;
            return Rational(f->a + f->b * kPow);
        }
        const auto& g = std::get<GeomForm>(pc.form);
        if (!k.fits_ulong_p() || k.get_ui() > 1000000UL) return std::nullopt;
        return ratPowBig(g.q, k.get_ui());
    }
    return std::nullopt;
}

double RVSequenceModel::absMoment(const BigInt& k, const Rational& r) const {
    return momentPlan(branchIndexOf(k), r).eval(k);
}

Rational RVSequenceModel::cdfAt(const BigInt& k, const Rational& x) const {
    const Branch& br = branches_.at(branchIndexOf(k));
    auto evalProb = [&](const PowForm& p) -> Rational {
        if (p.isConstant()) return p.constantValue();
        const Rational absE = abs(p.e);
        unsigned long u = absE.get_num().get_ui(), v = absE.get_den().get_ui();
        BigInt root = nthRootFloor(k, v);
        if (powUi(root, v) != k)
            throw std::runtime_error("cdfAt: probability irrational at this k");
        Rational kPow(powUi(root, u));
        if (sgn(p.e) < 0) kPow = 1 / kPow;
        return Rational(p.a + p.b * kPow);
    };
    Rational s = 0;
    if (const auto* d = std::get_if<DiscreteLaw>(&br.law)) {
        for (const auto& at : d->atoms) {
            Rational v = at.isIndexValue ? Rational(k) : at.value;
            if (v <= x) s += evalProb(at.prob);
        }
        return s;
    }
    if (const auto* j = std::get_if<JointLaw>(&br.law)) {
        for (const auto& at : j->atoms)
            if (at.x <= x) s += evalProb(at.prob);
        return s;
    }
    throw CdfUnavailable{};
}

RVSequenceModel RVSequenceModel::pushforward(
    const std::function<Rational(const Rational&)>& g) const {
    std::vector<Branch> out;
    for (const auto& br : branches_) {
        Branch nb;
        nb.set = br.set;
        if (const auto* d = std::get_if<DiscreteLaw>(&br.law)) {
            DiscreteLaw nl;
            // merge atoms mapped to equal values; probabilities add
            std::vector<std::pair<Rational, PowForm>> merged;
            for (const auto& at : d->atoms) {
                if (at.isIndexValue) throw PushforwardUnavailable{};
                Rational nv = g(at.value);
                bool found = false;
                for (auto& [v, p] : merged) {
                    if (v == nv) {
                        // add probability forms
                        if (p.isConstant() && at.prob.isConstant()) {
                            p = PowForm::constant(p.constantValue() + at.prob.constantValue());
                        } else if (p.isConstant()) {
                            p = PowForm::power(at.prob.a + p.constantValue(), at.prob.b, at.prob.e);
                        } else if (at.prob.isConstant()) {
                            p = PowForm::power(p.a + at.prob.constantValue(), p.b, p.e);
                        } else if (p.e == at.prob.e) {
                            p = PowForm::power(p.a + at.prob.a, p.b + at.prob.b, p.e);
                        } else {
                            throw std::runtime_error("pushforward: unmergeable probability forms");
                        }
                        found = true;
                        break;
                    }
                }
                if (!found) merged.emplace_back(nv, at.prob);
            }
            for (auto& [v, p] : merged) {
                Atom a;
                a.value = v;
                a.prob = p;
                nl.atoms.push_back(std::move(a));
            }
            nb.law = std::move(nl);
        } else if (const auto* j = std::get_if<JointLaw>(&br.law)) {
            JointLaw nl;
            std::vector<JointAtom> merged;
            for (const auto& at : j->atoms) {
                Rational nx = g(at.x), nxl = g(at.xLimit);
                bool found = false;
                for (auto& m : merged) {
                    if (m.x == nx && m.xLimit == nxl) {
                        if (m.prob.isConstant() && at.prob.isConstant()) {
                            m.prob = PowForm::constant(m.prob.constantValue() +
                                                       at.prob.constantValue());
                        } else if (m.prob.e == at.prob.e) {
                            m.prob = PowForm::power(m.prob.a + at.prob.a, m.prob.b + at.prob.b,
                                                    m.prob.e);
                        } else {
                            throw std::runtime_error("pushforward: unmergeable probability forms");
                        }
                        found = true;
                        break;
                    }
                }
                if (!found) merged.push_back(at);
                if (!found) {
                    merged.back().x = nx;
                    merged.back().xLimit = nxl;
                }
            }
            nl.atoms = std::move(merged);
            nb.law = std::move(nl);
        } else {
            throw PushforwardUnavailable{};
        }
        out.push_back(std::move(nb));
    }
    LimitLaw nlim;
    for (const auto& [v, p] : limit_.atoms) {
        Rational nv = g(v);
        bool found = false;
        for (auto& [mv, mp] : nlim.atoms) {
            if (mv == nv) {
                mp += p;
                found = true;
                break;
            }
        }
        if (!found) nlim.atoms.emplace_back(nv, p);
    }
    return RVSequenceModel(std::move(out), std::move(nlim), std::nullopt, maxValidIndex_);
}

RVSequenceModel RVSequenceModel::combineLinear(std::shared_ptr<const RVSequenceModel> a,
                                               std::shared_ptr<const RVSequenceModel> b,
                                               const Rational& cA, const Rational& cB) {
    if (sgn(cA) == 0 && sgn(cB) == 0)
        throw std::invalid_argument("combineLinear: both coefficients zero");
    BoundCombLaw law;
    law.a = std::move(a);
    law.b = std::move(b);
    law.cA = cA;
    law.cB = cB;
    Branch br;
    br.set = IndexSet::all();
    br.law = law;
    LimitLaw lim;
    if (law.a->limit().isPointMass() && law.b->limit().isPointMass())
        lim = LimitLaw::pointMass(cA * law.a->limit().pointValue() +
                                  cB * law.b->limit().pointValue());
    std::optional<BigInt> dom;
    if (law.a->maxValidIndex()) dom = *law.a->maxValidIndex();
    if (law.b->maxValidIndex() && (!dom || *law.b->maxValidIndex() < *dom))
        dom = *law.b->maxValidIndex();
    std::vector<Branch> branches;
    branches.push_back(std::move(br));
    return RVSequenceModel(std::move(branches), std::move(lim), std::nullopt, dom);
}

std::vector<RVSequenceModel::AtomView> RVSequenceModel::atomViews(const BigInt& k,
                                                                  const Rational& eps) const {
    const Branch& br = branches_.at(branchIndexOf(k));
    std::vector<AtomView> out;
    if (const auto* d = std::get_if<DiscreteLaw>(&br.law)) {
        if (!limit_.isPointMass()) throw NonPointLimitWithoutJoint{};
        const Rational& x0 = limit_.pointValue();
        for (const auto& at : d->atoms) {
            Rational v = at.isIndexValue ? Rational(k) : at.value;
            out.push_back({at.prob.eval(k), abs(Rational(v - x0)) >= eps});
        }
        return out;
    }
    if (const auto* j = std::get_if<JointLaw>(&br.law)) {
        for (const auto& at : j->atoms)
            out.push_back({at.prob.eval(k), abs(Rational(at.x - at.xLimit)) >= eps});
        return out;
    }
    throw SamplingUnavailable{};
}

RVSequenceModel::Sample RVSequenceModel::sample(const BigInt& k, std::uint64_t seed,
                                                std::uint64_t sampleIndex) const {
    const Branch& br = branches_.at(branchIndexOf(k));
    const double u = keyedUniform01(seed, hashBigInt(k), sampleIndex);
    double acc = 0.0;
    if (const auto* d = std::get_if<DiscreteLaw>(&br.law)) {
        const double xl = limit_.isPointMass() ? limit_.pointValue().get_d()
                                               : std::numeric_limits<double>::quiet_NaN();
        for (size_t i = 0; i < d->atoms.size(); ++i) {
            acc += d->atoms[i].prob.eval(k);
            if (u < acc || i + 1 == d->atoms.size()) {
                double v = d->atoms[i].isIndexValue
                               ? (k.fits_ulong_p() ? static_cast<double>(k.get_ui())
                                                   : std::exp(lnBig(k)))
                               : d->atoms[i].value.get_d();
                return {v, xl};
            }
        }
    }
    if (const auto* j = std::get_if<JointLaw>(&br.law)) {
        for (size_t i = 0; i < j->atoms.size(); ++i) {
            acc += j->atoms[i].prob.eval(k);
            if (u < acc || i + 1 == j->atoms.size())
                return {j->atoms[i].x.get_d(), j->atoms[i].xLimit.get_d()};
        }
    }
    throw SamplingUnavailable{};
}

}  // namespace abstat
