#pragma once

#include <string>

#include "staircase/analysis.hpp"

namespace staircase::svg {

/// Static picture of a delay profile: the stage-j tower as a rectangle with
/// columns left to right and levels bottom to top, the landing image of the
/// column bottoms drawn as a piecewise-linear path, and one labelled domain
/// per Level segment.
std::string render_profile(const DelayProfile& profile, const Stage& stage);

}  // namespace staircase::svg
