#pragma once

#include <string>

#include "amnl/model.hpp"
#include "amnl/optim.hpp"

namespace amnl {

// Checkpoint file: magic "IRMC", u32 version, u32-length-prefixed canonical
// JSON config, u32 parameter count, named tensor records (f64 payload so
// round-trips are bit-exact), then optimizer kind/lr/step and accumulator
// records. save -> load -> save reproduces identical bytes.
void save_checkpoint(const std::string& path, const Model& model, const Optimizer& opt);

Model load_checkpoint(const std::string& path, Optimizer* opt = nullptr);

}  // namespace amnl
