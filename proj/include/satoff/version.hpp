#pragma once

namespace satoff {

inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace satoff
