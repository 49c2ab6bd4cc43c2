#pragma once

// Cached calibration constants as "key = value" text.

#include <optional>
#include <string>

#include "hypdim/tractgeom.hpp"

namespace hypdim {

std::string format_constants(const CalibratedConstants& c);
CalibratedConstants parse_constants(const std::string& text);

CalibratedConstants load_constants(const std::string& path);
void save_constants(const std::string& path, const CalibratedConstants& c);

// Shipped calibrations for p in {0.5, 1, 2}.
std::optional<CalibratedConstants> bundled_constants(double p);

} // namespace hypdim
