#pragma once

#include <string>

#include "defrost/protocols.hpp"

namespace defrost {

/// Standalone SVG of a defrosting profile: cut on x, mean accuracy on y,
/// one-std whiskers, optimal depth marked with a star.
void emit_profile_svg(const DefrostingProfile& profile, const std::string& path);

}  // namespace defrost
