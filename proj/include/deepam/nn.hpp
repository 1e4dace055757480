#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "deepam/errors.hpp"
#include "deepam/tensor.hpp"

namespace deepam {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct SoftmaxResult {
  double loss;
  Vec probabilities;
};

// Max-subtracted softmax; loss = -log p[target].
inline SoftmaxResult softmax_cross_entropy(const Vec& logits, std::size_t target) {
  if (target >= logits.size()) throw numeric_error("softmax target index out of range");
  const double mx = *std::max_element(logits.begin(), logits.end());
  Vec probs(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - mx);
    z += probs[i];
  }
  for (double& p : probs) p /= z;
  const double loss = -(logits[target] - mx - std::log(z));
  return {loss, std::move(probs)};
}

// One direction, one layer. Weights act on [x; h_prev].
struct GruParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Tensor w_update, b_update;     // z
  Tensor w_reset, b_reset;       // r
  Tensor w_candidate, b_candidate;

  static GruParams zeros(std::size_t input_dim, std::size_t hidden_dim) {
    GruParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    const std::vector<std::size_t> wshape{hidden_dim, input_dim + hidden_dim};
    const std::vector<std::size_t> bshape{hidden_dim};
    p.w_update = Tensor(wshape);
    p.b_update = Tensor(bshape);
    p.w_reset = Tensor(wshape);
    p.b_reset = Tensor(bshape);
    p.w_candidate = Tensor(wshape);
    p.b_candidate = Tensor(bshape);
    return p;
  }
};

// h_t = z .* h_prev + (1 - z) .* tanh(Wc [x; r .* h_prev] + bc)
inline Vec gru_step(const GruParams& p, const Vec& x, const Vec& h_prev) {
  if (x.size() != p.input_dim || h_prev.size() != p.hidden_dim)
    throw numeric_error("gru_step dimension mismatch");
  const std::size_t h = p.hidden_dim;
  const std::size_t in = p.input_dim;

  auto gate = [&](const Tensor& w, const Tensor& b, const Vec& hpart, std::size_t i) {
    double acc = b.data[i];
    const double* row = w.data.data() + i * (in + h);
    for (std::size_t j = 0; j < in; ++j) acc += row[j] * x[j];
    for (std::size_t j = 0; j < h; ++j) acc += row[in + j] * hpart[j];
    return acc;
  };

  Vec z(h), r(h), ht(h);
  for (std::size_t i = 0; i < h; ++i) z[i] = sigmoid(gate(p.w_update, p.b_update, h_prev, i));
  for (std::size_t i = 0; i < h; ++i) r[i] = sigmoid(gate(p.w_reset, p.b_reset, h_prev, i));
  Vec rh(h);
  for (std::size_t i = 0; i < h; ++i) rh[i] = r[i] * h_prev[i];
  for (std::size_t i = 0; i < h; ++i) {
    const double cand = std::tanh(gate(p.w_candidate, p.b_candidate, rh, i));
    ht[i] = z[i] * h_prev[i] + (1.0 - z[i]) * cand;
  }
  return ht;
}

}  // namespace deepam
