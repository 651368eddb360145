#pragma once

#include "abstat/numeric.hpp"
#include "abstat/windows.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace abstat {

// Special index families with exact membership and exact range counting.
// countInRange must agree with brute-force membership counting on every
// range; that equivalence is the oracle property the tests enforce.

enum class IndexSetKind {
    all,               // every k >= 1 (the mandatory default branch)
    perfectSquares,    // k = m^2
    floorPowers,       // k = floor(m^(1/c)), c rational in (0,1)
    selfPowers,        // k = m^m
    factorialPoints,   // k = m!, m >= minM
    blockUnion,        // explicit disjoint closed intervals
    firstOfEachWindow, // first floor(h_r^c) integers of each window of a scheme
};

class IndexSet {
  public:
    static IndexSet all();
    static IndexSet perfectSquares();
    static IndexSet floorPowers(const Rational& c);
    static IndexSet selfPowers();
    static IndexSet factorialPoints(unsigned long minM = 1);
    // intervals must be sorted and disjoint; membership queries beyond the
    // last interval end are rejected unless unbounded coverage is declared.
    static IndexSet blockUnion(std::vector<std::pair<BigInt, BigInt>> intervals);
    static IndexSet firstOfEachWindow(std::shared_ptr<const WindowScheme> scheme, const Rational& c);

    IndexSetKind kind() const { return kind_; }
    const Rational& exponentC() const { return c_; }

    bool member(const BigInt& k) const;
    BigInt countInRange(const BigInt& lo, const BigInt& hi) const;

    // Members within [lo, hi] when there are at most cap of them; nullopt
    // when the set is too dense to enumerate (used for cross-branch overlap
    // correction in analytic counting).
    std::optional<std::vector<BigInt>> membersInRange(const BigInt& lo, const BigInt& hi,
                                                      size_t cap) const;

    // Dense sets (all, blockUnion) can be decomposed into intervals for
    // analytic summation; sparse sets cannot.
    bool intervalDecomposable() const {
        return kind_ == IndexSetKind::all || kind_ == IndexSetKind::blockUnion ||
               kind_ == IndexSetKind::firstOfEachWindow;
    }
    // Intersection of the set with [lo, hi] as disjoint intervals (only for
    // intervalDecomposable sets).
    std::vector<std::pair<BigInt, BigInt>> intervalsInRange(const BigInt& lo, const BigInt& hi) const;

  private:
    IndexSetKind kind_ = IndexSetKind::all;
    Rational c_;
    unsigned long minM_ = 1;
    std::vector<std::pair<BigInt, BigInt>> blocks_;
    std::shared_ptr<const WindowScheme> scheme_;

    // lazily extended sorted value lists for ultra-sparse kinds
    mutable std::vector<BigInt> lazyValues_;

    void extendLazyTo(const BigInt& hi) const;
    BigInt prefixFloorPowers(const BigInt& x) const;  // smallest m with m^(1/c) >= x
    BigInt firstPrefixLen(long r) const;              // floor(h_r^c)
    mutable std::vector<BigInt> prefixLenCache_;
};

}  // namespace abstat
