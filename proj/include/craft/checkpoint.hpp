#pragma once

#include <string>

#include "craft/model.hpp"

namespace craft {

struct Checkpoint {
    TransformerParams phi;
    DiscriminatorParams theta;
    std::string config_echo;  // resolved training config as JSON
};

/// Self-describing binary container: dims, layer shapes, all weights and BN
/// running statistics as 64-bit reals, config echo; round-trips bitwise.
void checkpoint_save(const Checkpoint& ckpt, const std::string& path);
Checkpoint checkpoint_load(const std::string& path);

}  // namespace craft
