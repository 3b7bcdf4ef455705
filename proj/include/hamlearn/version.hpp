#pragma once

namespace hamlearn {

inline constexpr const char *kToolName = "hamlearn";
inline constexpr const char *kToolVersion = "0.1.0";

} // namespace hamlearn
