#pragma once

namespace baqca {

#ifdef BAQCA_VERSION
inline constexpr const char* kVersion = BAQCA_VERSION;
#else
inline constexpr const char* kVersion = "unknown";
#endif

}  // namespace baqca
