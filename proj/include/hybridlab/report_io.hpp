#ifndef HYBRIDLAB_REPORT_IO_HPP
#define HYBRIDLAB_REPORT_IO_HPP

#include <iosfwd>
#include <string>

#include "hybridlab/config.hpp"
#include "hybridlab/scenario.hpp"

namespace hybridlab {

// CSV schema: t,candidate,residual,purity_defect,min_eigenvalue,entropy,
// prob_outcome_1..N.  Floats carry 17 significant digits; undefined entropy
// is the literal `nan`.  Output is deterministic.
void emit_timeseries(const ScenarioReport& report, std::ostream& out);
void emit_timeseries(const ScenarioReport& report, const std::string& path);

// JSON report with verdict, config echo and tool version; NaN becomes null.
std::string report_json(const ScenarioReport& report);
void emit_report(const ScenarioReport& report, const std::string& path);

// Pointer-marginal trajectories per candidate under <dir>/pointer_<kind>.csv.
void emit_plotdata(const ScenarioReport& report, const std::string& dir);

std::string format_double(double v); // %.17g, deterministic

} // namespace hybridlab

#endif
