#pragma once

namespace lhvt {

inline constexpr const char* version_string = "0.1.0";
inline constexpr const char* report_schema = "lhvt-report/1";

}  // namespace lhvt
