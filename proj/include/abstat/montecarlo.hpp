#pragma once

#include "abstat/engine.hpp"
#include "abstat/models.hpp"

#include <cstdint>

namespace abstat {

struct WindowTooLarge : EngineError {
    explicit WindowTooLarge(long n)
        : EngineError("window too large for Monte Carlo enumeration at n=" + std::to_string(n)) {}
};

struct MCConfig {
    long samplesPerIndex = 10000;
    std::uint64_t seed = 1;
    double confidence = 0.01;  // two-sided Hoeffding level alpha

    // distribution-free half width sqrt(ln(2/alpha) / (2 S))
    double halfWidth() const {
        return std::sqrt(std::log(2.0 / confidence) / (2.0 * static_cast<double>(samplesPerIndex)));
    }
};

struct ExceedanceEstimate {
    double pHat = 0.0;
    double halfWidth = 0.0;
};

// empirical fraction of samples with |x_k - x| >= eps; joint sampling when the
// limit is non-degenerate; bit-reproducible for a fixed config
ExceedanceEstimate estimateExceedance(const RVSequenceModel& model, const BigInt& k,
                                      const Rational& eps, const MCConfig& cfg);

struct MCSeriesPoint {
    long n = 0;
    BigInt lo, hi, width;
    double dLo = 0.0, dHat = 0.0, dHi = 0.0;
    long uncertainCount = 0;  // indices whose band [pHat-w, pHat+w] straddles delta
};

struct MCSeries {
    OrderParams params;
    MCConfig cfg;
    std::vector<MCSeriesPoint> points;
};

// density band [dLo, dHi] from counting with pHat-w / pHat / pHat+w; contains
// the exact density whenever every estimate is within its half width
MCSeries mcDensitySeries(const RVSequenceModel& model, const WindowScheme& scheme,
                         const OrderParams& params, const MCConfig& cfg, long nFrom, long nTo,
                         const EngineKnobs& knobs = {});

}  // namespace abstat
