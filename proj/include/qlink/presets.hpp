#pragma once

#include "qlink/config.hpp"
#include "qlink/tomography.hpp"

#include <string>
#include <vector>

namespace qlink {

// Default device parameters: a representative pair of flux-tunable transmons
// linked by a 0.73 m coplanar-waveguide channel with a switchable load.
DeviceParams default_device();

// A measured two-qubit assignment probability matrix for the default device
// (columns renormalized to unit sum).
AssignmentMatrix default_assignment_matrix();

// Named experiment presets; throws ConfigError for unknown names.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace qlink
