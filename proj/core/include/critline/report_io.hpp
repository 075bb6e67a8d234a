#pragma once

// Serialization of reports and traces: versioned JSON for CountReport,
// versioned CSV for phase traces and zero lists.

#include <string>

#include "critline/phase.hpp"
#include "critline/winding.hpp"

namespace critline::report_io {

std::string count_report_json(const winding::CountReport& r);

// columns: tau, phi, phi_over_pi, cell_index
std::string trace_csv(const phase::PhaseTrace& trace, double lattice_offset);

} // namespace critline::report_io
