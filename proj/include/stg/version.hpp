#pragma once

namespace stg {

inline constexpr const char* kVersion = "0.1.0";

// Bumped when the checkpoint layout changes.
inline constexpr int kCheckpointVersion = 1;

} // namespace stg
