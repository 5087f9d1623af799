#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frxa/face_regions.hpp"

namespace frxa::testing {

/// Landmarks scattered around a random face box; some points may fall outside the image.
LandmarkSet68 random_landmarks(std::uint64_t seed, std::size_t width, std::size_t height);

/// Containment, monotonicity and squareness checks on one random landmark set.
/// Returns a description of every violated property (empty on success).
std::vector<std::string> geometry_violations(std::uint64_t seed);

}  // namespace frxa::testing
