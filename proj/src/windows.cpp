#include "abstat/windows.hpp"

#include <algorithm>

namespace abstat {

namespace {

std::pair<BigInt, BigInt> generate(SchemeKind kind, const SchemeParams& p, long n) {
    switch (kind) {
        case SchemeKind::classical:
            return {1, n};
        case SchemeKind::lacunary: {
            // alpha_r = k_{r-1}+1, beta_r = k_r with k_0 = 0
            const auto& ks = p.cutPoints;
            BigInt prev = (n >= 2) ? ks[static_cast<size_t>(n - 2)] : BigInt(0);
            return {prev + 1, ks[static_cast<size_t>(n - 1)]};
        }
        case SchemeKind::lambda: {
            const BigInt& lam = p.lambdas[static_cast<size_t>(n - 1)];
            return {BigInt(n) - lam + 1, n};
        }
        case SchemeKind::squares:
            return {BigInt(n - 1) * (n - 1) + 1, BigInt(n) * n};
        case SchemeKind::powerOfN:
            return {1, powUi(BigInt(n), static_cast<unsigned long>(p.exponent))};
        case SchemeKind::factorialEven:
            return {factorial(2 * static_cast<unsigned long>(n)),
                    factorial(2 * static_cast<unsigned long>(n) + 1)};
        case SchemeKind::factorialOdd:
            return {factorial(2 * static_cast<unsigned long>(n) + 1),
                    factorial(2 * static_cast<unsigned long>(n) + 2)};
        case SchemeKind::explicitTable:
            return p.table[static_cast<size_t>(n - 1)];
        case SchemeKind::custom: {
            if (p.generator) return p.generator(n);
            if (p.family == "nPlusCeilSqrt") {
                // alpha_n = n, beta_n = n + ceil(sqrt(n))
                BigInt root = isqrt(BigInt(n));
                if (root * root < n) ++root;
                return {n, BigInt(n) + root};
            }
            if (p.family == "factorialPair")
                return {factorial(static_cast<unsigned long>(n)),
                        factorial(static_cast<unsigned long>(n) + 1)};
            throw std::invalid_argument("unknown custom scheme family: " + p.family);
        }
    }
    throw std::logic_error("unreachable scheme kind");
}

std::string schemeName(SchemeKind kind, const SchemeParams& p) {
    switch (kind) {
        case SchemeKind::classical: return "classical";
        case SchemeKind::lacunary: return "lacunary";
        case SchemeKind::lambda: return "lambda";
        case SchemeKind::squares: return "squares";
        case SchemeKind::powerOfN: return "powerOfN(" + std::to_string(p.exponent) + ")";
        case SchemeKind::factorialEven: return "factorialEven";
        case SchemeKind::factorialOdd: return "factorialOdd";
        case SchemeKind::explicitTable: return "explicitTable";
        case SchemeKind::custom: return p.generator ? "custom" : "custom:" + p.family;
    }
    return "?";
}

}  // namespace

WindowScheme makeScheme(SchemeKind kind, const SchemeParams& params, long horizon) {
    if (horizon < 1) throw InvalidScheme("horizon must be >= 1", horizon);
    if (kind == SchemeKind::lacunary) {
        if (static_cast<long>(params.cutPoints.size()) < horizon)
            throw InvalidScheme("lacunary cut points shorter than horizon", horizon);
        for (long r = 1; r < static_cast<long>(params.cutPoints.size()); ++r)
            if (params.cutPoints[static_cast<size_t>(r)] <= params.cutPoints[static_cast<size_t>(r - 1)])
                throw InvalidScheme("lacunary cut points not strictly increasing", r + 1);
    }
    if (kind == SchemeKind::lambda) {
        if (static_cast<long>(params.lambdas.size()) < horizon)
            throw InvalidScheme("lambda sequence shorter than horizon", horizon);
        for (long n = 1; n <= horizon; ++n) {
            const BigInt& lam = params.lambdas[static_cast<size_t>(n - 1)];
            if (lam < 1 || lam > n) throw InvalidScheme("lambda_n must satisfy 1 <= lambda_n <= n", n);
            if (n >= 2 && lam < params.lambdas[static_cast<size_t>(n - 2)])
                throw InvalidScheme("lambda_n must be non-decreasing", n);
        }
    }
    if (kind == SchemeKind::explicitTable && static_cast<long>(params.table.size()) < horizon)
        throw InvalidScheme("explicit table shorter than horizon", horizon);
    if (kind == SchemeKind::powerOfN && params.exponent < 1)
        throw InvalidScheme("powerOfN exponent must be >= 1", 1);

    WindowScheme s;
    s.kind_ = kind;
    s.horizon_ = horizon;
    s.name_ = schemeName(kind, params);
    s.bounds_.reserve(static_cast<size_t>(horizon));
    for (long n = 1; n <= horizon; ++n) s.bounds_.push_back(generate(kind, params, n));

    BigInt prevWidth = -1;
    s.diag_.strictWidthIncreaseFrom = 1;
    s.nonOverlapping_ = true;
    for (long n = 1; n <= horizon; ++n) {
        const auto& [a, b] = s.bounds_[static_cast<size_t>(n - 1)];
        if (a < 1) throw InvalidScheme("alpha_n must be positive", n);
        if (b < a) throw InvalidScheme("beta_n < alpha_n", n);
        if (n >= 2) {
            const auto& [pa, pb] = s.bounds_[static_cast<size_t>(n - 2)];
            if (a < pa) throw InvalidScheme("alpha not non-decreasing", n);
            if (b < pb) throw InvalidScheme("beta not non-decreasing", n);
            if (a <= pb) s.nonOverlapping_ = false;
        }
        BigInt w = b - a + 1;
        if (prevWidth >= 0) {
            if (w < prevWidth) s.diag_.widthNonDecreasing = false;
            // restart the strict-increase run on any non-increase
            if (w <= prevWidth) s.diag_.strictWidthIncreaseFrom = n;
        }
        prevWidth = w;
        if (n == horizon) s.diag_.finalWidth = w;
    }
    return s;
}

LiminfRatioReport liminfRatio(const WindowScheme& scheme, long nMin, long nMax) {
    if (nMin < 1 || nMax > scheme.horizon() || nMin > nMax) throw OutOfHorizon(nMax);
    LiminfRatioReport rep;
    rep.nMin = nMin;
    rep.nMax = nMax;
    Rational best;
    bool anyUp = false, anyDown = false;
    Rational prev;
    for (long n = nMin; n <= nMax; ++n) {
        Rational q(scheme.beta(n), scheme.alpha(n));
        q.canonicalize();
        rep.ratios.push_back(q.get_d());
        if (n == nMin || q < best) {
            best = q;
            rep.argmin = n;
        }
        if (n > nMin) {
            if (q > prev) anyUp = true;
            if (q < prev) anyDown = true;
        }
        prev = q;
    }
    rep.minRatio = best.get_d();
    using T = LiminfRatioReport::Trend;
    rep.trend = anyUp && anyDown ? T::mixed : anyUp ? T::increasing : anyDown ? T::decreasing : T::flat;
    return rep;
}

RatioBlocks constructSlowRatioBlocks(const WindowScheme& scheme, long jMax) {
    RatioBlocks out;
    long prevR = 0;
    for (long j = 1; j <= jMax; ++j) {
        bool found = false;
        for (long r = prevR + 1; r <= scheme.horizon(); ++r) {
            // beta_r/alpha_r < 1 + 1/j  <=>  j*beta_r < (j+1)*alpha_r, exact
            if (!(BigInt(j) * scheme.beta(r) < BigInt(j + 1) * scheme.alpha(r))) continue;
            if (j >= 2) {
                if (r < 2) continue;
                if (!(scheme.beta(r - 1) >= BigInt(j) * scheme.beta(prevR))) continue;
            }
            out.rIndices.push_back(r);
            out.blocks.emplace_back(scheme.alpha(r), scheme.beta(r));
            prevR = r;
            found = true;
            break;
        }
        if (!found) throw ConstructionFailed(j);
    }
    return out;
}

}  // namespace abstat
