#pragma once

#include <cstdint>
#include <vector>

#include "amnl/lstm.hpp"
#include "amnl/tensor.hpp"

namespace amnl {

struct LinearFusionParams {
  Tensor w_visual;  // [D_u, D_f]
  Tensor w_text;    // [D_u, D_h]
};

// z = scaled_tanh(W_visual * f + W_text * maxpool(ys)). Either matrix may be
// undefined for the image-only / text-only ablations.
Tensor linear_fuse(Tape& tape, const Tensor& f, const std::vector<Tensor>& ys,
                   const LinearFusionParams& p);

// Continuous glimpse location, both coordinates in [-1, 1]; x maps to the
// column axis, y to the row axis.
struct Location {
  double x = 0.0;
  double y = 0.0;
};

struct GridCenter {
  std::size_t row = 0;
  std::size_t col = 0;
};

// Affine map [-1,1] -> [floor(w/2), G-1-floor(w/2)] per axis, rounded
// half-to-even, then clamped, so a full w x w window always fits.
GridCenter grid_center(const Location& l, std::size_t grid, std::size_t window);
Location location_of_cell(const GridCenter& c, std::size_t grid, std::size_t window);

// The w x w cells around the (clamped) center, row-major. w must be odd and
// no larger than the grid.
std::vector<Tensor> extract_glimpse(Tape& tape, const Tensor& grid_tensor, std::size_t center_row,
                                    std::size_t center_col, std::size_t window);

struct AttentionOut {
  Tensor context;  // [D_f], convex combination of the cells
  Tensor weights;  // [k], positive, sums to 1
};

struct TextualAttentionParams {
  Tensor w_text;   // [D_a, D_h]
  Tensor w_cell;   // [D_a, D_f]
  Tensor p;        // [D_a]
  Tensor b;        // [D_a]
};

// s_k = p . tanh(W_text y + W_cell cell_k + b); weights = softmax(s);
// context = sum_k weights_k cell_k.
AttentionOut textual_attention(Tape& tape, const Tensor& y, const std::vector<Tensor>& cells,
                               const TextualAttentionParams& p);

struct LocationHeadParams {
  Tensor w_visual;  // [2, D_f]
  Tensor w_state;   // [2, D_r]
};

struct NextLocationOut {
  Location loc;
  Tensor raw;  // [2] on tape, clamped to [-1,1]; feeds the soft glimpse path
};

NextLocationOut next_location(Tape& tape, const Tensor& f, const Tensor& c,
                              const LocationHeadParams& p);

struct GuidedFusionParams {
  TextualAttentionParams attention;
  LstmParams rnn;  // input D_f, hidden D_r
  LocationHeadParams head;
  std::vector<Tensor> w_out;  // [D_u, D_r]; one shared matrix, or one per step
  std::size_t window = 3;
  std::size_t steps = 0;  // step count when text_guided is false; else |ys|
  bool soft_glimpse = false;
  bool text_guided = true;  // false: uniform attention over cells (image-only)
};

// Records the location used at each glimpse step; replayed for gradient
// checking so finite differences see the exact same windows.
struct LocationTrace {
  std::vector<Location> locations;
  bool replay = false;
};

// Runs one glimpse/attention/recurrence step per sentence and projects the
// final hidden state: z = W_out h_S. l0 seeds the first glimpse.
Tensor guided_fuse(Tape& tape, const Tensor& grid_tensor, const Tensor& f,
                   const std::vector<Tensor>& ys, const GuidedFusionParams& p, Location l0,
                   LocationTrace* trace = nullptr);

}  // namespace amnl
