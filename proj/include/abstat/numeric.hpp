#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace abstat {

using BigInt = mpz_class;
using Rational = mpq_class;

// Natural log of a positive big integer, safe far beyond double range.
inline double lnBig(const BigInt& x) {
    if (x <= 0) throw std::domain_error("lnBig: nonpositive argument");
    signed long exp2;
    double mant = mpz_get_d_2exp(&exp2, x.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp2) * M_LN2;
}

inline double lnRat(const Rational& q) {
    if (q <= 0) throw std::domain_error("lnRat: nonpositive argument");
    return lnBig(BigInt(q.get_num())) - lnBig(BigInt(q.get_den()));
}

inline double toDouble(const Rational& q) { return q.get_d(); }

inline BigInt isqrt(const BigInt& x) {
    BigInt r;
    mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
    return r;
}

// floor(x^(1/n)) for x >= 0
inline BigInt nthRootFloor(const BigInt& x, unsigned long n) {
    BigInt r;
    mpz_root(r.get_mpz_t(), x.get_mpz_t(), n);
    return r;
}

// smallest m with m^n >= x, for x >= 1
inline BigInt nthRootCeilOfAtLeast(const BigInt& x, unsigned long n) {
    if (x <= 1) return 1;
    return nthRootFloor(x - 1, n) + 1;
}

inline BigInt powUi(const BigInt& base, unsigned long e) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Rational ratPowUi(const Rational& base, unsigned long e) {
    Rational r;
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), e);
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), e);
    r.canonicalize();
    return r;
}

inline BigInt factorial(unsigned long n) {
    BigInt r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

// floor(h^(p/q)) for h >= 0 and exponent p/q >= 0 in lowest terms.
inline BigInt floorRationalPower(const BigInt& h, const Rational& expo) {
    if (sgn(expo) < 0) throw std::domain_error("floorRationalPower: negative exponent");
    const BigInt p = expo.get_num();
    const BigInt q = expo.get_den();
    if (!p.fits_ulong_p() || !q.fits_ulong_p())
        throw std::domain_error("floorRationalPower: exponent too large");
    return nthRootFloor(powUi(h, p.get_ui()), q.get_ui());
}

// Largest integer k >= 0 with k^(u/v) <= bound, i.e. k^u <= bound^v.
// Returns 0 when even k=1 fails (bound < 1).
inline BigInt maxKWithRationalPowerAtMost(const Rational& bound, unsigned long u, unsigned long v) {
    if (sgn(bound) <= 0) return 0;
    const Rational bv = ratPowUi(bound, v);
    const BigInt n = bv.get_num();
    const BigInt d = bv.get_den();
    // k^u <= n/d  <=>  k <= floor((n/d)^(1/u)); root of the integer quotient
    // can be off by one, so verify exactly.
    BigInt k = nthRootFloor(n / d, u);
    while (powUi(k + 1, u) * d <= n) ++k;
    while (k > 0 && powUi(k, u) * d > n) --k;
    return k;
}

// Parse "p/q", "123", or a decimal string like "0.3" into an exact rational.
inline Rational ratFromString(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational r(s);
        r.canonicalize();
        return r;
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        Rational r(s);
        r.canonicalize();
        return r;
    }
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    bool neg = false;
    if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) {
        neg = digits[0] == '-';
        digits = digits.substr(1);
    }
    if (digits.empty()) throw std::invalid_argument("ratFromString: bad number " + s);
    BigInt num(digits);
    BigInt den = 1;
    for (size_t i = 0; i < s.size() - dot - 1; ++i) den *= 10;
    Rational r(neg ? -num : num, den);
    r.canonicalize();
    return r;
}

// Exact dyadic rational of a double (doubles are exact binary rationals).
inline Rational ratFromDouble(double x) {
    if (!std::isfinite(x)) throw std::domain_error("ratFromDouble: non-finite");
    Rational r;
    mpq_set_d(r.get_mpq_t(), x);
    return r;
}

// base^k for rational base, nonnegative integer k (repeated squaring).
inline Rational ratPowBig(const Rational& base, unsigned long k) {
    Rational acc = 1, b = base;
    unsigned long e = k;
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

// --- counter-based RNG: independent reproducible stream per (seed, key, index) ---

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hashBigInt(const BigInt& k) {
    // stable across platforms: mix residues mod two large primes
    std::uint64_t a = mpz_fdiv_ui(k.get_mpz_t(), 0xFFFFFFFFFFFFFFC5ULL >> 1);
    std::uint64_t b = mpz_fdiv_ui(k.get_mpz_t(), 4294967291ULL);
    return splitmix64(a ^ (b << 32) ^ (b >> 3));
}

inline std::uint64_t keyedBits(std::uint64_t seed, std::uint64_t key, std::uint64_t index) {
    return splitmix64(splitmix64(seed ^ 0xA5A5A5A5DEADBEEFULL) ^ splitmix64(key) ^
                      (index * 0x9E3779B97F4A7C15ULL));
}

inline double keyedUniform01(std::uint64_t seed, std::uint64_t key, std::uint64_t index) {
    return static_cast<double>(keyedBits(seed, key, index) >> 11) * 0x1.0p-53;
}

}  // namespace abstat
