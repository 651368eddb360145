#pragma once

#include <string>
#include <vector>

namespace abstat {

// Pointwise inequality certification over a grid of corpus models, window
// schemes, and parameter combinations: order monotonicity in gamma/delta/p,
// the Markov bound, the gamma=1 reverse bound, window refinement domination,
// the Chebyshev transfer of thresholds, and the bounded-model moment bound.
struct InvariantReport {
    long checksRun = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

InvariantReport runInvariantSuite(bool quick = false);

}  // namespace abstat
