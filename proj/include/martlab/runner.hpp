#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "martlab/config.hpp"
#include "martlab/models.hpp"
#include "martlab/report.hpp"

namespace martlab {

// Draws n terminal samples. Sample i is a pure function of (master, i), so
// the worker count only affects wall time, never values. Workers fill
// disjoint index ranges of a preallocated vector and share nothing.
std::vector<TerminalSample> sample_terminals(const ModelSpec& model,
                                             std::size_t n,
                                             std::uint64_t master,
                                             unsigned threads,
                                             double step = 1e-3);

// Full experiment: sample, estimate all three tail curves plus the
// transform side, run the enabled checks, and assemble the report. Pure
// compute; artifact writing is the caller's step (see write_artifacts).
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace martlab
