#pragma once

#include "abstat/forms.hpp"
#include "abstat/index_sets.hpp"
#include "abstat/numeric.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace abstat {

// ---- errors ----------------------------------------------------------------

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonPointLimitWithoutJoint : ModelError {
    NonPointLimitWithoutJoint()
        : ModelError("exceedance undefined: non-degenerate limit without a joint law") {}
};
struct MomentUnavailable : ModelError {
    MomentUnavailable() : ModelError("absolute moment unavailable for closed-form branch") {}
};
struct CdfUnavailable : ModelError {
    CdfUnavailable() : ModelError("CDF unavailable for closed-form branch") {}
};
struct PushforwardUnavailable : ModelError {
    PushforwardUnavailable() : ModelError("pushforward requires discrete constant-value atoms") {}
};
struct SamplingUnavailable : ModelError {
    SamplingUnavailable() : ModelError("sampling unavailable for closed-form branch") {}
};
struct EpsilonOutOfDomain : ModelError {
    explicit EpsilonOutOfDomain(const std::string& m) : ModelError(m) {}
};
struct ModelDomainExceeded : ModelError {
    explicit ModelDomainExceeded(const std::string& m) : ModelError(m) {}
};

// ---- laws ------------------------------------------------------------------

// One atom of a per-index discrete law. Values are either fixed rationals or
// the index k itself; probabilities follow a + b*k^e.
struct Atom {
    bool isIndexValue = false;
    Rational value = 0;
    PowForm prob;
};

struct DiscreteLaw {
    std::vector<Atom> atoms;
};

// Joint spectrum of (X_k, X): needed whenever the limit is non-degenerate.
struct JointAtom {
    Rational x, xLimit;
    PowForm prob;
};

struct JointLaw {
    std::vector<JointAtom> atoms;
};

// Branches whose exceedance is known only as a formula in k.
struct ClosedFormLaw {
    enum class Family { constantOne, geometricEps } family = Family::constantOne;
    Rational scale = 2;    // geometricEps: p_k(eps) = (1 - eps/scale)^k
    Rational epsLo = 0, epsHi = 1;  // open validity interval for eps
};

class RVSequenceModel;

// Union-bound combination min(1, pA(eps/2|cA|) + pB(eps/2|cB|)); an upper
// bound on the true exceedance of cA*X + cB*Y, which is all a convergence
// verdict needs.
struct BoundCombLaw {
    std::shared_ptr<const RVSequenceModel> a, b;
    Rational cA = 1, cB = 1;
};

using BranchLaw = std::variant<DiscreteLaw, JointLaw, ClosedFormLaw, BoundCombLaw>;

struct Branch {
    IndexSet set;
    BranchLaw law;
    // optional closed-form shadow of a discrete branch, cross-checked at
    // construction (agreement to 1e-12 on sampled k)
    std::optional<ClosedFormLaw> shadow;
};

struct LimitLaw {
    std::vector<std::pair<Rational, Rational>> atoms;  // (value, prob)

    static LimitLaw pointMass(const Rational& v) { return LimitLaw{{{v, 1}}}; }
    bool isPointMass() const { return atoms.size() == 1; }
    const Rational& pointValue() const { return atoms.front().first; }
    Rational cdf(const Rational& x) const {
        Rational s = 0;
        for (const auto& [v, p] : atoms)
            if (v <= x) s += p;
        return s;
    }
};

// ---- per-branch value plans -------------------------------------------------

// A per-index quantity over one branch, as a piecewise form in k. Pieces
// partition [1, inf); each carries either an exact power form or a geometric
// form. Used for exceedance probabilities, moments, and CDF gaps.
struct ValuePlan {
    struct Piece {
        BigInt from;                 // inclusive
        std::optional<BigInt> to;    // inclusive; nullopt = unbounded
        std::variant<PowForm, GeomForm> form;
    };
    std::vector<Piece> pieces;
    // set when the quantity cannot be expressed exactly (irrational constants
    // from non-integer moment orders); exact comparisons then raise
    std::optional<std::function<double(const BigInt&)>> doubleOnly;

    double eval(const BigInt& k) const;
    double evalU64(unsigned long k) const;
    // sign of value(k) - t; exact unless doubleOnly, in which case a tie
    // within the double margin throws
    int cmpAt(const BigInt& k, const Rational& t, double tD) const;
    // k-intervals where value >= t
    std::vector<std::pair<BigInt, std::optional<BigInt>>> regionsGE(const Rational& t) const;

    static ValuePlan constant(const Rational& c);
};

// ---- the model ---------------------------------------------------------------

class RVSequenceModel {
  public:
    RVSequenceModel(std::vector<Branch> branches, LimitLaw limit,
                    std::optional<Rational> declaredBound = std::nullopt,
                    std::optional<BigInt> maxValidIndex = std::nullopt);

    const std::vector<Branch>& branches() const { return branches_; }
    const LimitLaw& limit() const { return limit_; }
    const std::optional<Rational>& boundM() const { return boundM_; }
    const std::optional<BigInt>& maxValidIndex() const { return maxValidIndex_; }

    size_t branchIndexOf(const BigInt& k) const;

    // P(|X_k - X| >= eps)
    double exceedanceProb(const BigInt& k, const Rational& eps) const;
    std::optional<Rational> exceedanceProbExact(const BigInt& k, const Rational& eps) const;

    // E(|X_k - X|^r)
    double absMoment(const BigInt& k, const Rational& r) const;

    // P(X_k <= x), exact step function; and the limit CDF F(x)
    Rational cdfAt(const BigInt& k, const Rational& x) const;
    Rational limitCdf(const Rational& x) const { return limit_.cdf(x); }

    // plans for window counting; branch index into branches()
    ValuePlan exceedancePlan(size_t branchIdx, const Rational& eps) const;
    ValuePlan momentPlan(size_t branchIdx, const Rational& r) const;
    ValuePlan cdfGapPlan(size_t branchIdx, const Rational& x) const;  // F_k(x) - F(x)

    // atoms mapped through g, probabilities merged on collisions
    RVSequenceModel pushforward(const std::function<Rational(const Rational&)>& g) const;

    static RVSequenceModel combineLinear(std::shared_ptr<const RVSequenceModel> a,
                                         std::shared_ptr<const RVSequenceModel> b,
                                         const Rational& cA, const Rational& cB);

    struct Sample {
        double x;
        double xLimit;  // equals the point mass unless the branch is joint
    };
    Sample sample(const BigInt& k, std::uint64_t seed, std::uint64_t sampleIndex) const;

    // fraction-of-samples machinery wants the exact per-atom exceedance
    // classification; exposed for the Monte Carlo module
    struct AtomView {
        double prob;        // at this k
        bool exceeds;       // |value - limit| >= eps, decided exactly
    };
    std::vector<AtomView> atomViews(const BigInt& k, const Rational& eps) const;

  private:
    std::vector<Branch> branches_;
    LimitLaw limit_;
    std::optional<Rational> boundM_;
    std::optional<BigInt> maxValidIndex_;

    void validate() const;
};

}  // namespace abstat
