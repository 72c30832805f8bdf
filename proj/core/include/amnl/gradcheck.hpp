#pragma once

#include <cstdint>
#include <string>

#include "amnl/model.hpp"
#include "amnl/sampler.hpp"
#include "amnl/trainer.hpp"

namespace amnl {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t checked = 0;
};

// Central finite differences over every parameter element of the batch
// objective. Glimpse locations are recorded on the analytic pass and
// replayed for each perturbed evaluation, so the discrete location choice
// cannot alias into the difference quotient.
GradCheckReport gradcheck(const Model& model, const IRMGraph& g,
                          const std::vector<TokenMatrix>& tokens,
                          const std::vector<PreferenceTuple>& batch, double margin, double beta,
                          std::uint64_t seed, double h = 1e-4);

// Tiny handcrafted dataset: 3 users (one with no followees), 6 tweets, all
// model dims <= 4. Small enough that a full sweep finishes in seconds. The
// default 4x4 grid with a 3x3 window keeps the attention softmax and the
// window placement non-degenerate; grid=2/window=1 gives the smallest legal
// instance (single-cell attention).
struct MicroInstance {
  IRMGraph graph;
  Vocabulary vocab;
  ModelConfig config;
};

MicroInstance make_micro_instance(FusionKind fusion, bool soft_glimpse, std::uint64_t seed,
                                  std::size_t grid = 4, std::size_t window = 3);

// Builds the micro instance, inflates its parameters to healthy magnitudes,
// and sweeps the full objective gradient.
GradCheckReport gradcheck_micro(FusionKind fusion, bool soft_glimpse, std::uint64_t seed,
                                std::size_t grid = 4, std::size_t window = 3);

}  // namespace amnl
