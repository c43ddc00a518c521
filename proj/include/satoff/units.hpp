#pragma once

namespace satoff {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;
inline constexpr double kMuEarth = 3.986004418e14;  // m^3/s^2
inline constexpr double kBitsPerMb = 8.0e6;         // 1 MB = 10^6 bytes

}  // namespace satoff
