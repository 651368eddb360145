#include "abstat/montecarlo.hpp"

namespace abstat {

ExceedanceEstimate estimateExceedance(const RVSequenceModel& model, const BigInt& k,
                                      const Rational& eps, const MCConfig& cfg) {
    if (cfg.samplesPerIndex < 1) throw std::invalid_argument("samplesPerIndex must be >= 1");
    if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0))
        throw std::invalid_argument("confidence must lie in (0,1)");
    // atom probabilities at this k, with the exceedance of each atom decided
    // exactly; sampling then just inverts the cumulative distribution
    const auto atoms = model.atomViews(k, eps);
    const std::uint64_t key = hashBigInt(k);
    long exceed = 0;
    for (long i = 0; i < cfg.samplesPerIndex; ++i) {
        const double u = keyedUniform01(cfg.seed, key, static_cast<std::uint64_t>(i));
        double acc = 0.0;
        for (size_t a = 0; a < atoms.size(); ++a) {
            acc += atoms[a].prob;
            if (u < acc || a + 1 == atoms.size()) {
                if (atoms[a].exceeds) ++exceed;
                break;
            }
        }
    }
    return {static_cast<double>(exceed) / static_cast<double>(cfg.samplesPerIndex),
            cfg.halfWidth()};
}

MCSeries mcDensitySeries(const RVSequenceModel& model, const WindowScheme& scheme,
                         const OrderParams& params, const MCConfig& cfg, long nFrom, long nTo,
                         const EngineKnobs& knobs) {
    params.check();
    if (nFrom > nTo) throw EmptyWindowRange{};
    MCSeries out;
    out.params = params;
    out.cfg = cfg;
    const double w = cfg.halfWidth();
    const double delta = params.delta.get_d();
    for (long n = nFrom; n <= nTo; ++n) {
        Window win = scheme.window(n);
        if (win.width > knobs.enumLimit) throw WindowTooLarge(n);
        MCSeriesPoint pt;
        pt.n = n;
        pt.lo = win.lo;
        pt.hi = win.hi;
        pt.width = win.width;
        long cLo = 0, cHat = 0, cHi = 0, uncertain = 0;
        for (BigInt k = win.lo; k <= win.hi; ++k) {
            const double pHat = estimateExceedance(model, k, params.epsilon, cfg).pHat;
            if (pHat >= delta) ++cHat;
            if (pHat + w >= delta) ++cHi;
            if (pHat - w >= delta) ++cLo;
            if (pHat + w >= delta && pHat - w < delta) ++uncertain;
        }
        const double hg = win.hGamma(params.gamma);
        pt.dLo = cLo / hg;
        pt.dHat = cHat / hg;
        pt.dHi = cHi / hg;
        pt.uncertainCount = uncertain;
        out.points.push_back(std::move(pt));
    }
    return out;
}

}  // namespace abstat
