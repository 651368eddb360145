#pragma once

#include "abstat/engine.hpp"
#include "abstat/montecarlo.hpp"

#include <json.hpp>

#include <string>

namespace abstat {

// 17 significant digits: round-trips any double exactly
std::string fmt17(double x);

// fixed schema: n,alpha,beta,width,count,density,cesaro_lo,cesaro_hi,backend
// window bounds as decimal strings (factorial bounds exceed native widths);
// inapplicable fields left empty
std::string seriesCsv(const DiagnosticSeries& series);

// Monte Carlo band schema: n,alpha,beta,width,d_lo,d_hat,d_hi,uncertain
std::string mcSeriesCsv(const MCSeries& series);

nlohmann::json verdictJson(const Verdict& v);
nlohmann::json comparisonJson(const ModeComparison& c);

}  // namespace abstat
