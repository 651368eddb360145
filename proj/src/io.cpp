#include "abstat/io.hpp"

#include <cstdio>
#include <sstream>

namespace abstat {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {
std::string big(const BigInt& v) { return v.get_str(); }
}  // namespace

std::string seriesCsv(const DiagnosticSeries& series) {
    std::ostringstream out;
    out << "n,alpha,beta,width,count,density,cesaro_lo,cesaro_hi,backend\n";
    const bool countMode = series.mode != Mode::cesaro;
    for (const auto& pt : series.points) {
        out << pt.n << ',' << big(pt.lo) << ',' << big(pt.hi) << ',' << big(pt.width) << ',';
        if (pt.count) out << big(*pt.count);
        out << ',';
        if (countMode) out << fmt17(pt.density);
        out << ',';
        if (pt.cesaroLo) out << fmt17(*pt.cesaroLo);
        out << ',';
        if (pt.cesaroHi) out << fmt17(*pt.cesaroHi);
        out << ',' << toString(pt.backend) << '\n';
    }
    return out.str();
}

std::string mcSeriesCsv(const MCSeries& series) {
    std::ostringstream out;
    out << "n,alpha,beta,width,d_lo,d_hat,d_hi,uncertain\n";
    for (const auto& pt : series.points) {
        out << pt.n << ',' << big(pt.lo) << ',' << big(pt.hi) << ',' << big(pt.width) << ','
            << fmt17(pt.dLo) << ',' << fmt17(pt.dHat) << ',' << fmt17(pt.dHi) << ','
            << pt.uncertainCount << '\n';
    }
    return out.str();
}

nlohmann::json verdictJson(const Verdict& v) {
    nlohmann::json j;
    j["mode"] = toString(v.mode);
    j["decision"] = toString(v.decision);
    if (v.candidate) j["candidate"] = *v.candidate;
    if (!v.candidateDesc.empty()) j["candidateDesc"] = v.candidateDesc;
    j["tailMax"] = v.tailMax;
    j["tailMin"] = v.tailMin;
    j["slope"] = v.slope;
    j["trend"] = toString(v.trend);
    j["horizonUsed"] = v.horizonUsed;
    j["tailStartN"] = v.tailStartN;
    j["knobs"] = {{"tau", v.knobs.tau},
                  {"tailFraction", v.knobs.tailFraction},
                  {"slopeDeadband", v.knobs.slopeDeadband}};
    return j;
}

nlohmann::json comparisonJson(const ModeComparison& c) {
    nlohmann::json j;
    if (c.probabilityVerdict) j["probability"] = verdictJson(*c.probabilityVerdict);
    if (c.cesaroVerdict) j["cesaro"] = verdictJson(*c.cesaroVerdict);
    if (c.expectationVerdict) j["expectation"] = verdictJson(*c.expectationVerdict);
    if (c.distributionVerdict) j["distribution"] = verdictJson(*c.distributionVerdict);
    if (!c.skipped.empty()) j["skipped"] = c.skipped;
    nlohmann::json cert;
    cert["checked"] = c.cert.checked;
    cert["markovOk"] = c.cert.markovOk;
    if (!c.cert.markovOk) cert["markovViolationN"] = c.cert.markovViolationN;
    cert["reverseChecked"] = c.cert.reverseChecked;
    if (c.cert.reverseChecked) cert["reverseOk"] = c.cert.reverseOk;
    if (!c.cert.reverseOk) cert["reverseViolationN"] = c.cert.reverseViolationN;
    j["certification"] = cert;
    return j;
}

}  // namespace abstat
