#pragma once

// Exhaustive reference implementations used to check the dynamic programs.
// They share no code with dtw.cpp / grid_match.cpp beyond the public types.

#include <span>

#include "gridwarp/dtw.hpp"
#include "gridwarp/grid_match.hpp"

namespace gridwarp::oracle {

inline constexpr int kMaxBruteforceLength = 16;  // m + n
inline constexpr int kMaxEnumerateExtent = 14;   // q + s

// Minimum over every admissible fixed-endpoint warping path.
// Throws SizeGuardExceeded when m + n > kMaxBruteforceLength.
double dtw_bruteforce(std::span<const double> x, std::span<const double> y,
                      CostKind kind = CostKind::absolute);

// Minimum over every admissible river path through D in the given mode.
// Throws SizeGuardExceeded when q + s > kMaxEnumerateExtent.
double enumerate_paths(const DistanceLandscape& d, EndpointMode mode);

}  // namespace gridwarp::oracle
