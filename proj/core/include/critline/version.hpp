#pragma once

namespace critline {

inline constexpr const char* version_string = "1.0.0";

// schema tags stamped into exported CSV/JSON artifacts
inline constexpr const char* csv_schema = "critline-csv/1";
inline constexpr const char* report_schema = "critline-count-report/1";

} // namespace critline
