#pragma once

namespace pathnnt {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "pathnnt-report/1";
inline constexpr const char* kCoverageSchema = "pathnnt-coverage/1";
inline constexpr const char* kOracleSchema = "pathnnt-oracle/1";

}  // namespace pathnnt
