#pragma once

#include "abstat/numeric.hpp"

#include <optional>
#include <stdexcept>
#include <variant>

namespace abstat {

// f(k) = a + b * k^e with rational a, b and rational exponent e.
// This is the common shape of every per-index quantity in the corpus:
// exceedance probabilities (e <= 0), absolute moments (any e), CDF gaps.
// Comparisons against rational thresholds are exact: a + b*k^(u/v) >= t is
// decided by raising to the v-th power in integer arithmetic.
struct PowForm {
    Rational a = 0;
    Rational b = 0;
    Rational e = 0;  // exponent; b=0 or e=0 means the form is constant

    // double mirrors for the fast evaluation path
    double aD = 0, bD = 0, eD = 0;

    static PowForm constant(const Rational& c) {
        PowForm f;
        f.a = c;
        f.sync();
        return f;
    }
    static PowForm power(const Rational& a, const Rational& b, const Rational& e) {
        PowForm f;
        f.a = a;
        f.b = b;
        f.e = e;
        f.e.canonicalize();
        f.sync();
        return f;
    }

    void sync() {
        a.canonicalize();
        b.canonicalize();
        e.canonicalize();
        aD = a.get_d();
        bD = b.get_d();
        eD = e.get_d();
    }

    bool isConstant() const { return sgn(b) == 0 || sgn(e) == 0; }
    Rational constantValue() const { return sgn(e) == 0 ? Rational(a + b) : a; }

    double eval(const BigInt& k) const {
        if (isConstant()) return constantValue().get_d();
        if (k.fits_ulong_p()) return aD + bD * std::pow(static_cast<double>(k.get_ui()), eD);
        return aD + bD * std::exp(eD * lnBig(k));
    }

    PowForm negated() const { return power(-a, -b, e); }
    PowForm plusConstant(const Rational& c) const { return power(a + c, b, e); }

    // sign of f(k) - t, decided exactly
    int cmpAt(const BigInt& k, const Rational& t) const;

    // The k-region where f(k) >= t. Monotone forms yield a half-line.
    struct Region {
        enum Kind { all, none, atMost, atLeast } kind;
        BigInt bound;  // inclusive for atMost/atLeast
    };
    Region regionGE(const Rational& t) const;
};

inline int cmpRat(const Rational& x, const Rational& y) { return cmp(x, y); }

inline int PowForm::cmpAt(const BigInt& k, const Rational& t) const {
    if (k < 1) throw std::domain_error("PowForm: k must be >= 1");
    if (isConstant()) return cmpRat(constantValue(), t);
    // b * k^(u/v) vs t - a, with u/v = |e| in lowest terms
    const bool decay = sgn(e) < 0;
    const Rational absE = abs(e);
    const BigInt& un = absE.get_num();
    const BigInt& vn = absE.get_den();
    if (!un.fits_ulong_p() || !vn.fits_ulong_p())
        throw std::domain_error("PowForm: exponent too large for exact comparison");
    const unsigned long u = un.get_ui(), v = vn.get_ui();
    const Rational C = t - a;
    // reduce to k^u <=> R in integers; k^e with e<0 means 1/k^|e|
    if (sgn(b) > 0) {
        if (sgn(C) <= 0) return 1;  // b*k^e > 0 >= C
        // b*k^(±u/v) >= C  <=>  k^u <= (b/C)^v   (e<0)
        //                  <=>  k^u >= (C/b)^v   (e>0)
        Rational R = decay ? Rational(b / C) : Rational(C / b);
        Rational Rv = ratPowUi(R, v);
        BigInt lhs = powUi(k, u) * Rv.get_den();
        int c = cmp(lhs, Rv.get_num());
        return decay ? -c : c;  // decay: smaller k^u means bigger f
    }
    // b < 0: f = a - |b| k^e; f >= t  <=>  |b| k^e <= a - t
    const Rational D = a - t;
    if (sgn(D) < 0) return -1;
    if (sgn(D) == 0) return -1;  // |b| k^e > 0
    Rational R = decay ? Rational(-b / D) : Rational(D / -b);
    Rational Rv = ratPowUi(R, v);
    BigInt lhs = powUi(k, u) * Rv.get_den();
    int c = cmp(lhs, Rv.get_num());
    return decay ? c : -c;
}

inline PowForm::Region PowForm::regionGE(const Rational& t) const {
    Region r;
    if (isConstant()) {
        r.kind = cmpRat(constantValue(), t) >= 0 ? Region::all : Region::none;
        return r;
    }
    const bool decay = sgn(e) < 0;
    const Rational absE = abs(e);
    const unsigned long u = static_cast<unsigned long>(absE.get_num().get_ui());
    const unsigned long v = static_cast<unsigned long>(absE.get_den().get_ui());
    const bool decreasing = (sgn(b) > 0) == decay;  // f decreasing in k
    if (sgn(b) > 0) {
        const Rational C = t - a;
        if (sgn(C) <= 0) {
            r.kind = Region::all;
            return r;
        }
        if (decay) {
            // k^u <= (b/C)^v
            BigInt kMax = maxKWithRationalPowerAtMost(b / C, u, v);
            if (kMax < 1) {
                r.kind = Region::none;
            } else {
                r.kind = Region::atMost;
                r.bound = kMax;
            }
        } else {
            // k^u >= (C/b)^v: smallest k satisfying it
            Rational R = C / b;
            BigInt kTop = maxKWithRationalPowerAtMost(R, u, v);
            Rational Rv = ratPowUi(R, v);
            BigInt kMin =
                (kTop >= 1 && powUi(kTop, u) * Rv.get_den() == Rv.get_num()) ? kTop : kTop + 1;
            if (kMin < 1) kMin = 1;
            r.kind = Region::atLeast;
            r.bound = kMin;
        }
        (void)decreasing;
        return r;
    }
    // b < 0
    const Rational D = a - t;
    if (sgn(D) <= 0) {
        r.kind = Region::none;
        return r;
    }
    if (decay) {
        // |b| k^-s <= D  <=>  k^u >= (|b|/D)^v, so f >= t from kMin upward
        Rational R = -b / D;
        BigInt kTop = maxKWithRationalPowerAtMost(R, u, v);
        Rational Rv = ratPowUi(R, v);
        BigInt kMin = (kTop >= 1 && powUi(kTop, u) * Rv.get_den() == Rv.get_num()) ? kTop : kTop + 1;
        if (kMin < 1) kMin = 1;
        r.kind = Region::atLeast;
        r.bound = kMin;
    } else {
        // |b| k^s <= D  <=>  k^u <= (D/|b|)^v
        BigInt kMax = maxKWithRationalPowerAtMost(D / -b, u, v);
        if (kMax < 1) {
            r.kind = Region::none;
        } else {
            r.kind = Region::atMost;
            r.bound = kMax;
        }
    }
    return r;
}

// q^k exceedance for the density-over-(0,2) construction: exact geometric
// threshold handling.
struct GeomForm {
    Rational q;  // in (0,1)
    double qD = 0;

    double eval(const BigInt& k) const {
        if (!k.fits_ulong_p()) return 0.0;  // underflows double long before this
        return std::pow(qD, static_cast<double>(k.get_ui()));
    }
    int cmpAt(const BigInt& k, const Rational& t) const {
        if (sgn(t) <= 0) return 1;
        if (t >= 1) return -1;  // q^k <= q < 1 for k >= 1
        // double estimate of the crossing point, exact arithmetic only near it
        const double kStar = lnRat(t) / lnRat(q);
        const double kd = k.fits_ulong_p() ? static_cast<double>(k.get_ui()) : 1e300;
        if (kd > kStar + 64) return -1;
        if (kd < kStar - 64) return 1;
        if (!k.fits_ulong_p() || k.get_ui() > 100000000UL)
            throw std::domain_error("GeomForm: exact comparison out of range");
        return cmp(ratPowBig(q, k.get_ui()), t);
    }
    // largest k >= 0 with q^k >= t (0 means no k >= 1 qualifies; nullopt: all)
    std::optional<BigInt> maxKGE(const Rational& t) const {
        if (sgn(t) <= 0) return std::nullopt;  // every k qualifies
        if (t >= 1) return BigInt(0);
        double est = lnRat(t) / lnRat(q);
        long k0 = std::max(0L, static_cast<long>(est));
        // settle exactly around the double estimate
        while (k0 > 0 && cmpAt(BigInt(k0), t) < 0) --k0;
        while (cmpAt(BigInt(k0 + 1), t) >= 0) ++k0;
        return BigInt(k0);
    }
};

}  // namespace abstat
