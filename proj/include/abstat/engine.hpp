#pragma once

#include "abstat/models.hpp"
#include "abstat/windows.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace abstat {

enum class Mode { probability, cesaro, expectation, distribution, realSequence };

enum class Backend { analytic, enumerated };

struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AnalyticCountingUnavailable : EngineError {
    explicit AnalyticCountingUnavailable(const std::string& m) : EngineError(m) {}
};
struct AnalyticSummationUnavailable : EngineError {
    explicit AnalyticSummationUnavailable(const std::string& m) : EngineError(m) {}
};
struct GridHitsDiscontinuity : EngineError {
    explicit GridHitsDiscontinuity(const std::string& m) : EngineError(m) {}
};
struct EmptyWindowRange : EngineError {
    EmptyWindowRange() : EngineError("empty window range") {}
};

// gamma in (0,1], epsilon > 0, delta in (0,1], p > 0 (Cesaro), r > 0 (moment)
struct OrderParams {
    double gamma = 1.0;
    Rational epsilon{1, 2};
    Rational delta{1, 2};
    double p = 1.0;
    Rational r = 1;

    void check() const {
        if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in (0,1]");
        if (sgn(epsilon) <= 0) throw std::invalid_argument("epsilon must be > 0");
        if (sgn(delta) <= 0 || delta > 1) throw std::invalid_argument("delta must be in (0,1]");
        if (!(p > 0.0)) throw std::invalid_argument("p must be > 0");
        if (sgn(r) <= 0) throw std::invalid_argument("r must be > 0");
    }
};

struct SeriesPoint {
    long n = 0;
    BigInt lo, hi, width;
    std::optional<BigInt> count;  // threshold count; empty in pure Cesaro mode
    double density = 0.0;         // count / hGamma(gamma)
    std::optional<double> cesaroLo, cesaroHi;
    Backend backend = Backend::enumerated;
};

struct DiagnosticSeries {
    Mode mode = Mode::probability;
    OrderParams params;
    std::optional<double> candidate;  // point-mass candidate limit, when known
    std::string candidateDesc;        // e.g. "F (limit law)" for distribution mode
    std::optional<double> gridX;      // distribution mode: the grid point
    std::vector<SeriesPoint> points;
};

struct EngineKnobs {
    // windows wider than this force the analytic backend
    BigInt enumLimit = 1000000;
};

// ---- the four diagnostic series ----------------------------------------------

DiagnosticSeries densitySeries(const RVSequenceModel& model, const WindowScheme& scheme,
                               const OrderParams& params, long nFrom, long nTo,
                               const EngineKnobs& knobs = {});
DiagnosticSeries densitySeriesAt(const RVSequenceModel& model, const WindowScheme& scheme,
                                 const OrderParams& params, const std::vector<long>& ns,
                                 const EngineKnobs& knobs = {});

DiagnosticSeries cesaroSeries(const RVSequenceModel& model, const WindowScheme& scheme,
                              const OrderParams& params, long nFrom, long nTo,
                              const EngineKnobs& knobs = {});

DiagnosticSeries momentSeries(const RVSequenceModel& model, const WindowScheme& scheme,
                              const OrderParams& params, long nFrom, long nTo,
                              const EngineKnobs& knobs = {});

std::vector<DiagnosticSeries> cdfDensitySeries(const RVSequenceModel& model,
                                               const WindowScheme& scheme,
                                               const OrderParams& params,
                                               const std::vector<Rational>& xGrid, long nFrom,
                                               long nTo, const EngineKnobs& knobs = {});

// density of {k in window : a_k >= delta} for an arbitrary real sequence;
// raw double comparisons, enumerated windows only
DiagnosticSeries realStatDensity(const std::function<double(const BigInt&)>& seq,
                                 const WindowScheme& scheme, double gamma, double delta,
                                 long nFrom, long nTo, const EngineKnobs& knobs = {});

// ---- statistical limsup / liminf of order gamma -------------------------------

// sup of observed values v whose level set {k : x_k >= v} keeps tail density
// >= eta; -inf when none qualifies, +inf when the qualification never cuts off.
double statLimSup(const std::function<double(const BigInt&)>& seq, const WindowScheme& scheme,
                  double gamma, double eta, long nFrom, long nTo, double tailFraction = 0.5);
double statLimInf(const std::function<double(const BigInt&)>& seq, const WindowScheme& scheme,
                  double gamma, double eta, long nFrom, long nTo, double tailFraction = 0.5);

// ---- verdicts ------------------------------------------------------------------

enum class Trend { decreasing, increasing, flat, oscillating };
enum class Decision { convergesTo, fails, inconclusive };

struct VerdictKnobs {
    double tau = 0.05;
    double tailFraction = 0.5;
    double slopeDeadband = 1e-6;
};

struct Verdict {
    Mode mode = Mode::probability;
    std::optional<double> candidate;
    std::string candidateDesc;
    double tailMax = 0.0, tailMin = 0.0;
    double slope = 0.0;
    Trend trend = Trend::flat;
    Decision decision = Decision::inconclusive;
    long horizonUsed = 0;
    long tailStartN = 0;
    VerdictKnobs knobs;
};

Verdict verdict(const DiagnosticSeries& series, const VerdictKnobs& knobs = {});

const char* toString(Mode m);
const char* toString(Trend t);
const char* toString(Decision d);
const char* toString(Backend b);

// ---- cross-mode report -----------------------------------------------------------

struct ModeComparison {
    std::optional<DiagnosticSeries> probability, cesaro, expectation;
    std::vector<DiagnosticSeries> distribution;  // one per grid x
    std::optional<Verdict> probabilityVerdict, cesaroVerdict, expectationVerdict,
        distributionVerdict;  // distribution: worst-case over the grid
    std::vector<std::string> skipped;  // modes not computable, with reasons

    struct Certification {
        bool checked = false;
        bool markovOk = true;          // d_n <= cesaro_n / delta^p
        long markovViolationN = 0;
        bool reverseChecked = false;   // gamma = 1 only
        bool reverseOk = true;         // cesaro_n <= delta^p + d_n
        long reverseViolationN = 0;
    } cert;
};

ModeComparison compareModes(const RVSequenceModel& model, const WindowScheme& scheme,
                            const OrderParams& params, long nFrom, long nTo,
                            const EngineKnobs& knobs = {}, const VerdictKnobs& vk = {},
                            const std::vector<Rational>& xGrid = {});

// default continuity-point grid: midpoints between consecutive limit atoms
// plus one point beyond each end of the support
std::vector<Rational> defaultCdfGrid(const LimitLaw& limit);

}  // namespace abstat
