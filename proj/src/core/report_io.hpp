#pragma once

#include <string>
#include <vector>

#include "core/experiments.hpp"

namespace fracsob {

// Fixed 17-significant-digit scientific notation; the byte-stability
// contract for every emitted float.
std::string format_float17(double v);

// report-v1 schema, fixed key order, LF line endings.
std::string report_to_json(const ExperimentReport& report);

// Per-member table: header "seed,numerator,denominator,ratio".
std::string report_to_csv(const ExperimentReport& report);

// One line per report: tag, experiment id, pass flag and headline stats.
std::string suite_summary_csv(const std::vector<ExperimentReport>& reports);

}  // namespace fracsob
