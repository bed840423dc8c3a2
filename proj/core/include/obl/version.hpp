#pragma once

namespace obl {

inline constexpr const char* kVersion = "0.1.0";

/// Tag stamped into every emitted file format.
inline constexpr const char* kFormatTag = "obl/1";

}  // namespace obl
