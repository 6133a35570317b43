#pragma once

namespace qlink {

inline constexpr const char* kToolName = "qlink";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kMetricsSchema = "qlink-metrics-v1";

}  // namespace qlink
