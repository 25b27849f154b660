#pragma once

namespace semcx {

inline constexpr const char* kToolName = "semcx";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kRecordSchemaVersion = "1";

}  // namespace semcx
