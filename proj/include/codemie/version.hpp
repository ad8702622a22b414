#pragma once

namespace codemie {

inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr const char* kMetricVersion = "codemie-metrics/1";

} // namespace codemie
