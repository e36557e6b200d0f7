#pragma once

#include <ostream>

namespace geocloud::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

/// Environment variable that overrides the config's output directory.
inline constexpr const char* kOutputDirEnv = "GEOCLOUD_OUT_DIR";

/// Entry point of the `geocloud` tool: simulate | compare | gen-traces | fit.
/// Output directory precedence: --out, then $GEOCLOUD_OUT_DIR, then the config.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geocloud::cli
