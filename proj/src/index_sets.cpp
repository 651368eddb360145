#include "abstat/index_sets.hpp"

#include <algorithm>
#include <stdexcept>

namespace abstat {

IndexSet IndexSet::all() { return IndexSet{}; }

IndexSet IndexSet::perfectSquares() {
    IndexSet s;
    s.kind_ = IndexSetKind::perfectSquares;
    return s;
}

IndexSet IndexSet::floorPowers(const Rational& c) {
    if (sgn(c) <= 0 || c >= 1) throw std::invalid_argument("floorPowers: c must lie in (0,1)");
    IndexSet s;
    s.kind_ = IndexSetKind::floorPowers;
    s.c_ = c;
    s.c_.canonicalize();
    return s;
}

IndexSet IndexSet::selfPowers() {
    IndexSet s;
    s.kind_ = IndexSetKind::selfPowers;
    return s;
}

IndexSet IndexSet::factorialPoints(unsigned long minM) {
    IndexSet s;
    s.kind_ = IndexSetKind::factorialPoints;
    s.minM_ = std::max<unsigned long>(minM, 1);
    return s;
}

IndexSet IndexSet::blockUnion(std::vector<std::pair<BigInt, BigInt>> intervals) {
    IndexSet s;
    s.kind_ = IndexSetKind::blockUnion;
    s.blocks_ = std::move(intervals);
    for (size_t i = 0; i < s.blocks_.size(); ++i) {
        if (s.blocks_[i].second < s.blocks_[i].first)
            throw std::invalid_argument("blockUnion: empty interval");
        if (i > 0 && s.blocks_[i].first <= s.blocks_[i - 1].second)
            throw std::invalid_argument("blockUnion: intervals must be sorted and disjoint");
    }
    return s;
}

IndexSet IndexSet::firstOfEachWindow(std::shared_ptr<const WindowScheme> scheme, const Rational& c) {
    if (!scheme) throw std::invalid_argument("firstOfEachWindow: null scheme");
    if (!scheme->nonOverlapping())
        throw std::invalid_argument("firstOfEachWindow: scheme windows must be non-overlapping");
    if (sgn(c) <= 0 || c >= 1) throw std::invalid_argument("firstOfEachWindow: c must lie in (0,1)");
    IndexSet s;
    s.kind_ = IndexSetKind::firstOfEachWindow;
    s.scheme_ = std::move(scheme);
    s.c_ = c;
    s.c_.canonicalize();
    return s;
}

void IndexSet::extendLazyTo(const BigInt& hi) const {
    if (kind_ == IndexSetKind::selfPowers) {
        unsigned long m = lazyValues_.empty() ? 1 : lazyValues_.size() + 1;
        while (lazyValues_.empty() || lazyValues_.back() <= hi) {
            lazyValues_.push_back(powUi(BigInt(m), m));
            ++m;
        }
    } else if (kind_ == IndexSetKind::factorialPoints) {
        unsigned long m = minM_ + lazyValues_.size();
        while (lazyValues_.empty() || lazyValues_.back() <= hi) {
            lazyValues_.push_back(factorial(m));
            ++m;
        }
    }
}

// smallest m >= 1 with m^(1/c) >= x, i.e. m^q >= x^p for c = p/q
BigInt IndexSet::prefixFloorPowers(const BigInt& x) const {
    if (x <= 1) return 1;
    const unsigned long p = static_cast<unsigned long>(c_.get_num().get_ui());
    const unsigned long q = static_cast<unsigned long>(c_.get_den().get_ui());
    return nthRootCeilOfAtLeast(powUi(x, p), q);
}

BigInt IndexSet::firstPrefixLen(long r) const {
    if (prefixLenCache_.size() < static_cast<size_t>(r)) {
        size_t old = prefixLenCache_.size();
        prefixLenCache_.resize(static_cast<size_t>(r));
        for (size_t i = old; i < prefixLenCache_.size(); ++i) {
            Window w = scheme_->window(static_cast<long>(i) + 1);
            prefixLenCache_[i] = floorRationalPower(w.width, c_);
        }
    }
    return prefixLenCache_[static_cast<size_t>(r - 1)];
}

bool IndexSet::member(const BigInt& k) const {
    if (k < 1) return false;
    switch (kind_) {
        case IndexSetKind::all:
            return true;
        case IndexSetKind::perfectSquares: {
            BigInt r = isqrt(k);
            return r * r == k;
        }
        case IndexSetKind::floorPowers: {
            // k is hit iff some integer m has k <= m^(1/c) < k+1
            const unsigned long p = static_cast<unsigned long>(c_.get_num().get_ui());
            const unsigned long q = static_cast<unsigned long>(c_.get_den().get_ui());
            BigInt m0 = nthRootCeilOfAtLeast(powUi(k, p), q);
            return powUi(m0, q) < powUi(k + 1, p);
        }
        case IndexSetKind::selfPowers:
        case IndexSetKind::factorialPoints: {
            extendLazyTo(k);
            return std::binary_search(lazyValues_.begin(), lazyValues_.end(), k);
        }
        case IndexSetKind::blockUnion: {
            auto it = std::upper_bound(blocks_.begin(), blocks_.end(), k,
                                       [](const BigInt& v, const auto& b) { return v < b.first; });
            if (it == blocks_.begin()) return false;
            --it;
            return k <= it->second;
        }
        case IndexSetKind::firstOfEachWindow: {
            auto r = scheme_->windowContaining(k);
            if (!r) return false;
            return k - scheme_->alpha(*r) < firstPrefixLen(*r);
        }
    }
    return false;
}

BigInt IndexSet::countInRange(const BigInt& lo, const BigInt& hi) const {
    BigInt a = std::max(lo, BigInt(1));
    if (hi < a) return 0;
    switch (kind_) {
        case IndexSetKind::all:
            return hi - a + 1;
        case IndexSetKind::perfectSquares:
            return isqrt(hi) - isqrt(a - 1);
        case IndexSetKind::floorPowers: {
            // floor(m^(1/c)) is strictly increasing for c in (0,1), so the
            // count of distinct values in [a, hi] is the count of m values.
            BigInt mLo = prefixFloorPowers(a);
            BigInt mHi = prefixFloorPowers(hi + 1);
            return mHi - mLo;
        }
        case IndexSetKind::selfPowers:
        case IndexSetKind::factorialPoints: {
            extendLazyTo(hi);
            auto b = std::lower_bound(lazyValues_.begin(), lazyValues_.end(), a);
            auto e = std::upper_bound(lazyValues_.begin(), lazyValues_.end(), hi);
            return static_cast<long>(e - b);
        }
        case IndexSetKind::blockUnion:
        case IndexSetKind::firstOfEachWindow: {
            BigInt total = 0;
            for (const auto& [s, e] : intervalsInRange(a, hi)) total += e - s + 1;
            return total;
        }
    }
    return 0;
}

std::vector<std::pair<BigInt, BigInt>> IndexSet::intervalsInRange(const BigInt& lo,
                                                                  const BigInt& hi) const {
    std::vector<std::pair<BigInt, BigInt>> out;
    BigInt a = std::max(lo, BigInt(1));
    if (hi < a) return out;
    switch (kind_) {
        case IndexSetKind::all:
            out.emplace_back(a, hi);
            return out;
        case IndexSetKind::blockUnion: {
            for (const auto& [s, e] : blocks_) {
                if (e < a) continue;
                if (s > hi) break;
                out.emplace_back(std::max(s, a), std::min(e, hi));
            }
            return out;
        }
        case IndexSetKind::firstOfEachWindow: {
            // scheme windows are non-overlapping and monotone; scan the ones
            // that can intersect [a, hi]
            long rLo = 1;
            {
                long lo2 = 1, hi2 = scheme_->horizon();
                rLo = scheme_->horizon() + 1;
                while (lo2 <= hi2) {
                    long mid = lo2 + (hi2 - lo2) / 2;
                    if (scheme_->beta(mid) >= a) {
                        rLo = mid;
                        hi2 = mid - 1;
                    } else {
                        lo2 = mid + 1;
                    }
                }
            }
            for (long r = rLo; r <= scheme_->horizon(); ++r) {
                if (scheme_->alpha(r) > hi) break;
                BigInt s = scheme_->alpha(r);
                BigInt e = s + firstPrefixLen(r) - 1;
                BigInt cs = std::max(s, a), ce = std::min(e, hi);
                if (cs <= ce) out.emplace_back(cs, ce);
            }
            return out;
        }
        default:
            throw std::logic_error("intervalsInRange: set is not interval-decomposable");
    }
}

std::optional<std::vector<BigInt>> IndexSet::membersInRange(const BigInt& lo, const BigInt& hi,
                                                            size_t cap) const {
    BigInt a = std::max(lo, BigInt(1));
    std::vector<BigInt> out;
    if (hi < a) return out;
    BigInt count = countInRange(a, hi);
    if (count > static_cast<long>(cap)) return std::nullopt;
    switch (kind_) {
        case IndexSetKind::perfectSquares: {
            for (BigInt m = isqrt(a - 1) + 1; m * m <= hi; ++m) out.push_back(m * m);
            return out;
        }
        case IndexSetKind::floorPowers: {
            const unsigned long p = static_cast<unsigned long>(c_.get_num().get_ui());
            const unsigned long q = static_cast<unsigned long>(c_.get_den().get_ui());
            BigInt mHi = prefixFloorPowers(hi + 1);
            for (BigInt m = prefixFloorPowers(a); m < mHi; ++m)
                out.push_back(nthRootFloor(powUi(m, q), p));
            return out;
        }
        case IndexSetKind::selfPowers:
        case IndexSetKind::factorialPoints: {
            extendLazyTo(hi);
            for (const auto& v : lazyValues_)
                if (v >= a && v <= hi) out.push_back(v);
            return out;
        }
        case IndexSetKind::all:
        case IndexSetKind::blockUnion:
        case IndexSetKind::firstOfEachWindow: {
            for (const auto& [s, e] : intervalsInRange(a, hi))
                for (BigInt k = s; k <= e; ++k) out.push_back(k);
            return out;
        }
    }
    return std::nullopt;
}

}  // namespace abstat
