#pragma once

#include "abstat/numeric.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace abstat {

// Window scheme: the pair (alpha, beta) of non-decreasing sequences with
// alpha_n <= beta_n. Integer indices k with alpha_n <= k <= beta_n form
// window n; all built-in kinds produce exact integer bounds.

enum class SchemeKind {
    classical,      // [1, n]
    lacunary,       // [k_{r-1}+1, k_r]
    lambda,         // [n - lambda_n + 1, n]
    squares,        // [(n-1)^2+1, n^2]
    powerOfN,       // [1, n^e]
    factorialEven,  // [(2n)!, (2n+1)!]
    factorialOdd,   // [(2n+1)!, (2n+2)!]
    explicitTable,  // caller-supplied bounds
    custom,         // named family or C++ generator
};

struct SchemeParams {
    long exponent = 2;                              // powerOfN
    std::vector<BigInt> cutPoints;                  // lacunary k_1 < k_2 < ...
    std::vector<BigInt> lambdas;                    // lambda_n, non-decreasing, <= n
    std::vector<std::pair<BigInt, BigInt>> table;   // explicitTable
    std::string family;                             // custom: "nPlusCeilSqrt", "factorialPair"
    std::function<std::pair<BigInt, BigInt>(long)> generator;  // custom, C++ only
};

struct Window {
    long n = 0;
    BigInt lo, hi;
    BigInt width;   // hi - lo + 1
    double lnWidth = 0.0;

    // (beta_n - alpha_n + 1)^gamma; correctly-rounded pow while the width fits
    // a double, log domain beyond (factorial-scale widths cannot overflow).
    double hGamma(double gamma) const {
        if (width.fits_ulong_p() && width.get_ui() < (1UL << 53)) {
            if (gamma == 1.0) return static_cast<double>(width.get_ui());
            return std::pow(static_cast<double>(width.get_ui()), gamma);
        }
        return std::exp(gamma * lnWidth);
    }
};

// Finite-horizon validity diagnostics. (beta_n - alpha_n) -> infinity cannot
// be proven at a finite horizon; we report where strict width growth starts
// and whether widths ever decrease.
struct SchemeDiagnostics {
    long strictWidthIncreaseFrom = 1;  // smallest n0 with widths strictly increasing on [n0, horizon]
    bool widthNonDecreasing = true;
    BigInt finalWidth;
};

class InvalidScheme : public std::runtime_error {
  public:
    long offendingN;
    InvalidScheme(const std::string& what, long n)
        : std::runtime_error(what + " at n=" + std::to_string(n)), offendingN(n) {}
};

class OutOfHorizon : public std::runtime_error {
  public:
    explicit OutOfHorizon(long n)
        : std::runtime_error("window index out of horizon: n=" + std::to_string(n)) {}
};

class WindowScheme {
  public:
    WindowScheme() = default;

    SchemeKind kind() const { return kind_; }
    long horizon() const { return horizon_; }
    const SchemeDiagnostics& diagnostics() const { return diag_; }
    const std::string& name() const { return name_; }

    const BigInt& alpha(long n) const { return boundsAt(n).first; }
    const BigInt& beta(long n) const { return boundsAt(n).second; }

    Window window(long n) const {
        const auto& [a, b] = boundsAt(n);
        Window w;
        w.n = n;
        w.lo = a;
        w.hi = b;
        w.width = b - a + 1;
        w.lnWidth = lnBig(w.width);
        return w;
    }

    // Windows are non-overlapping when each starts past the previous end.
    bool nonOverlapping() const { return nonOverlapping_; }

    // Largest r with alpha_r <= k, or 0; windows assumed non-overlapping when
    // used for containment lookups.
    std::optional<long> windowContaining(const BigInt& k) const {
        long lo = 1, hi = horizon_, found = 0;
        while (lo <= hi) {
            long mid = lo + (hi - lo) / 2;
            if (alpha(mid) <= k) {
                found = mid;
                lo = mid + 1;
            } else {
                hi = mid - 1;
            }
        }
        if (found == 0 || beta(found) < k) return std::nullopt;
        return found;
    }

  private:
    friend WindowScheme makeScheme(SchemeKind, const SchemeParams&, long);

    const std::pair<BigInt, BigInt>& boundsAt(long n) const {
        if (n < 1 || n > horizon_) throw OutOfHorizon(n);
        return bounds_[static_cast<size_t>(n - 1)];
    }

    SchemeKind kind_ = SchemeKind::classical;
    long horizon_ = 0;
    std::string name_;
    std::vector<std::pair<BigInt, BigInt>> bounds_;
    SchemeDiagnostics diag_;
    bool nonOverlapping_ = false;
};

WindowScheme makeScheme(SchemeKind kind, const SchemeParams& params, long horizon);

struct LiminfRatioReport {
    double minRatio = 0.0;
    long argmin = 0;
    enum class Trend { increasing, decreasing, flat, mixed } trend = Trend::flat;
    std::vector<double> ratios;  // indexed from nMin
    long nMin = 1, nMax = 1;
};

// min over [nMin, nMax] of beta_n/alpha_n: the finite-horizon estimate of
// liminf q_r used by the separation criterion.
LiminfRatioReport liminfRatio(const WindowScheme& scheme, long nMin, long nMax);

class ConstructionFailed : public std::runtime_error {
  public:
    long jReached;
    explicit ConstructionFailed(long j)
        : std::runtime_error("no admissible r(j) within horizon at j=" + std::to_string(j)),
          jReached(j) {}
};

struct RatioBlocks {
    std::vector<long> rIndices;                      // chosen r(1) < r(2) < ...
    std::vector<std::pair<BigInt, BigInt>> blocks;   // I_{r(j)} = [alpha_{r(j)}, beta_{r(j)}]
};

// Greedy subsequence with beta_{r(j)}/alpha_{r(j)} < 1 + 1/j and, for j >= 2,
// beta_{r(j)-1} >= j * beta_{r(j-1)}; smallest admissible r at every step.
RatioBlocks constructSlowRatioBlocks(const WindowScheme& scheme, long jMax);

}  // namespace abstat
