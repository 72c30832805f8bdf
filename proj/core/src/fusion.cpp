#include "amnl/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace amnl {

namespace {

void check_window(std::size_t grid, std::size_t window) {
  if (window == 0 || window % 2 == 0) {
    throw std::invalid_argument("glimpse window must be odd, got " + std::to_string(window));
  }
  if (window > grid) {
    throw std::invalid_argument("glimpse window " + std::to_string(window) +
                                " exceeds grid extent " + std::to_string(grid));
  }
}

// Valid center range for a full window: [floor(w/2), G-1-floor(w/2)].
std::pair<double, double> center_range(std::size_t grid, std::size_t window) {
  double lo = static_cast<double>(window / 2);
  double hi = static_cast<double>(grid - 1 - window / 2);
  return {lo, hi};
}

AttentionOut uniform_attention(Tape& tape, const std::vector<Tensor>& cells) {
  double wk = 1.0 / static_cast<double>(cells.size());
  Tensor ctx = tape.scale(cells[0], wk);
  for (std::size_t k = 1; k < cells.size(); ++k) {
    ctx = tape.add(ctx, tape.scale(cells[k], wk));
  }
  return AttentionOut{ctx, Tensor::full({cells.size()}, wk)};
}

// Affine map of a clamped [-1,1] tensor coordinate onto [lo, hi].
Tensor to_center_coord(Tape& tape, const Tensor& t, double lo, double hi) {
  return tape.add_const(tape.scale(tape.add_const(t, 1.0), 0.5 * (hi - lo)), lo);
}

// Bilinear blend of two integer-centered windows per axis; differentiable
// through the fractional offsets, so location gradients survive.
std::vector<Tensor> soft_glimpse_cells(Tape& tape, const Tensor& grid_tensor, const Tensor& raw,
                                       std::size_t window) {
  std::size_t grid = grid_tensor.shape()[0];
  check_window(grid, window);
  auto [lo, hi] = center_range(grid, window);
  std::size_t ilo = static_cast<std::size_t>(lo);
  std::size_t ihi = static_cast<std::size_t>(hi);

  Tensor col_t = to_center_coord(tape, tape.index(raw, 0), lo, hi);
  Tensor row_t = to_center_coord(tape, tape.index(raw, 1), lo, hi);
  auto base = [&](const Tensor& t) {
    auto v = static_cast<long long>(std::floor(t.item()));
    v = std::max<long long>(static_cast<long long>(ilo), std::min<long long>(v, static_cast<long long>(ihi)));
    return static_cast<std::size_t>(v);
  };
  std::size_t r0 = base(row_t);
  std::size_t c0 = base(col_t);
  std::size_t r1 = std::min(r0 + 1, ihi);
  std::size_t c1 = std::min(c0 + 1, ihi);

  Tensor fr = tape.add_const(row_t, -static_cast<double>(r0));
  Tensor fc = tape.add_const(col_t, -static_cast<double>(c0));
  Tensor gr = tape.add_const(tape.scale(fr, -1.0), 1.0);  // 1 - fr
  Tensor gc = tape.add_const(tape.scale(fc, -1.0), 1.0);
  Tensor w00 = tape.mul(gr, gc);
  Tensor w01 = tape.mul(gr, fc);
  Tensor w10 = tape.mul(fr, gc);
  Tensor w11 = tape.mul(fr, fc);

  long long half = static_cast<long long>(window / 2);
  std::vector<Tensor> cells;
  cells.reserve(window * window);
  for (long long dr = -half; dr <= half; ++dr) {
    for (long long dc = -half; dc <= half; ++dc) {
      auto rr0 = static_cast<std::size_t>(static_cast<long long>(r0) + dr);
      auto rr1 = static_cast<std::size_t>(static_cast<long long>(r1) + dr);
      auto cc0 = static_cast<std::size_t>(static_cast<long long>(c0) + dc);
      auto cc1 = static_cast<std::size_t>(static_cast<long long>(c1) + dc);
      Tensor blend = tape.add(
          tape.add(tape.smul(tape.grid_cell(grid_tensor, rr0, cc0), w00),
                   tape.smul(tape.grid_cell(grid_tensor, rr0, cc1), w01)),
          tape.add(tape.smul(tape.grid_cell(grid_tensor, rr1, cc0), w10),
                   tape.smul(tape.grid_cell(grid_tensor, rr1, cc1), w11)));
      cells.push_back(blend);
    }
  }
  return cells;
}

}  // namespace

Tensor linear_fuse(Tape& tape, const Tensor& f, const std::vector<Tensor>& ys,
                   const LinearFusionParams& p) {
  Tensor pre;
  if (p.w_visual.defined()) pre = tape.matvec(p.w_visual, f);
  if (p.w_text.defined()) {
    if (ys.empty()) throw std::invalid_argument("linear_fuse needs at least one sentence vector");
    Tensor text_term = tape.matvec(p.w_text, tape.emax(ys));
    pre = pre.defined() ? tape.add(pre, text_term) : text_term;
  }
  if (!pre.defined()) throw std::invalid_argument("linear_fuse: no fusion weights defined");
  return tape.scaled_tanh(pre);
}

GridCenter grid_center(const Location& l, std::size_t grid, std::size_t window) {
  check_window(grid, window);
  auto [lo, hi] = center_range(grid, window);
  auto map_axis = [lo, hi](double t) {
    t = std::clamp(t, -1.0, 1.0);
    double v = lo + 0.5 * (t + 1.0) * (hi - lo);
    v = std::nearbyint(v);  // default FP mode: round half to even
    v = std::clamp(v, lo, hi);
    return static_cast<std::size_t>(v);
  };
  return GridCenter{map_axis(l.y), map_axis(l.x)};
}

Location location_of_cell(const GridCenter& c, std::size_t grid, std::size_t window) {
  check_window(grid, window);
  auto [lo, hi] = center_range(grid, window);
  auto unmap = [lo, hi](std::size_t v) {
    if (hi == lo) return 0.0;
    return 2.0 * (static_cast<double>(v) - lo) / (hi - lo) - 1.0;
  };
  return Location{unmap(c.col), unmap(c.row)};
}

std::vector<Tensor> extract_glimpse(Tape& tape, const Tensor& grid_tensor, std::size_t center_row,
                                    std::size_t center_col, std::size_t window) {
  if (grid_tensor.rank() != 3 || grid_tensor.shape()[0] != grid_tensor.shape()[1]) {
    throw std::invalid_argument("glimpse needs a square [G,G,C] grid, got [" +
                                shape_str(grid_tensor.shape()) + "]");
  }
  std::size_t grid = grid_tensor.shape()[0];
  check_window(grid, window);
  std::size_t half = window / 2;
  std::size_t lo = half;
  std::size_t hi = grid - 1 - half;
  std::size_t cr = std::clamp(center_row, lo, hi);
  std::size_t cc = std::clamp(center_col, lo, hi);
  std::vector<Tensor> cells;
  cells.reserve(window * window);
  for (std::size_t r = cr - half; r <= cr + half; ++r) {
    for (std::size_t c = cc - half; c <= cc + half; ++c) {
      cells.push_back(tape.grid_cell(grid_tensor, r, c));
    }
  }
  return cells;
}

AttentionOut textual_attention(Tape& tape, const Tensor& y, const std::vector<Tensor>& cells,
                               const TextualAttentionParams& p) {
  if (cells.empty()) throw std::invalid_argument("textual_attention needs at least one cell");
  Tensor text_part = tape.add(tape.matvec(p.w_text, y), p.b);
  std::vector<Tensor> scores;
  scores.reserve(cells.size());
  for (const Tensor& cell : cells) {
    Tensor hidden = tape.tanh(tape.add(text_part, tape.matvec(p.w_cell, cell)));
    scores.push_back(tape.dot(p.p, hidden));
  }
  Tensor weights = tape.softmax(tape.concat(scores));
  Tensor ctx;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    Tensor term = tape.smul(cells[k], tape.index(weights, k));
    ctx = ctx.defined() ? tape.add(ctx, term) : term;
  }
  return AttentionOut{ctx, weights};
}

NextLocationOut next_location(Tape& tape, const Tensor& f, const Tensor& c,
                              const LocationHeadParams& p) {
  Tensor raw = tape.clamp(
      tape.scaled_tanh(tape.add(tape.matvec(p.w_visual, f), tape.matvec(p.w_state, c))), -1.0,
      1.0);
  return NextLocationOut{Location{raw.at(0), raw.at(1)}, raw};
}

Tensor guided_fuse(Tape& tape, const Tensor& grid_tensor, const Tensor& f,
                   const std::vector<Tensor>& ys, const GuidedFusionParams& p, Location l0,
                   LocationTrace* trace) {
  std::size_t steps = p.text_guided ? ys.size() : p.steps;
  if (steps == 0) throw std::invalid_argument("guided_fuse: no steps to run");
  if (p.w_out.size() != 1 && p.w_out.size() < steps) {
    throw std::invalid_argument("guided_fuse: need one shared or one per-step output matrix");
  }
  LstmState state = lstm_zero_state(p.rnn.hidden_dim());

  if (p.soft_glimpse) {
    // Continuous path: the location tensor stays on the tape, so gradients
    // reach the location head directly. Traces do not apply here.
    Tensor raw({2}, {l0.x, l0.y});
    for (std::size_t j = 0; j < steps; ++j) {
      std::vector<Tensor> cells = soft_glimpse_cells(tape, grid_tensor, raw, p.window);
      AttentionOut att = p.text_guided ? textual_attention(tape, ys[j], cells, p.attention)
                                       : uniform_attention(tape, cells);
      state = lstm_step(tape, p.rnn, att.context, state);
      if (j + 1 < steps) raw = next_location(tape, f, state.c, p.head).raw;
    }
  } else {
    // Discrete path: forward uses the rounded window; the location value is
    // treated as a constant in backward (straight-through).
    Location l = l0;
    for (std::size_t j = 0; j < steps; ++j) {
      if (trace != nullptr) {
        if (trace->replay) {
          l = trace->locations.at(j);
        } else {
          trace->locations.push_back(l);
        }
      }
      GridCenter center = grid_center(l, grid_tensor.shape()[0], p.window);
      std::vector<Tensor> cells =
          extract_glimpse(tape, grid_tensor, center.row, center.col, p.window);
      AttentionOut att = p.text_guided ? textual_attention(tape, ys[j], cells, p.attention)
                                       : uniform_attention(tape, cells);
      state = lstm_step(tape, p.rnn, att.context, state);
      if (j + 1 < steps) l = next_location(tape, f, state.c, p.head).loc;
    }
  }
  const Tensor& out = p.w_out.size() == 1 ? p.w_out[0] : p.w_out[steps - 1];
  return tape.matvec(out, state.h);
}

}  // namespace amnl
