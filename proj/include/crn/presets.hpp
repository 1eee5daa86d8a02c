#pragma once

#include "crn/network.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace crn {

/// A bundled network with a documented feasible starting state.
struct Preset {
    std::string name;
    std::string description;
    std::string crn_text;
    Vec initial_state;
};

const std::vector<Preset>& presets();
const Preset* find_preset(std::string_view name);

/// Convenience: parse_network over the preset's DSL text.
ReactionNetwork preset_network(std::string_view name);

}  // namespace crn
