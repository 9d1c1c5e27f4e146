#pragma once

namespace beaconopt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace beaconopt
