#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "deepam/errors.hpp"
#include "deepam/rng.hpp"
#include "deepam/tensor.hpp"

namespace deepam {

// name -> gradient tensor; ordered map keeps every reduction and update
// loop in one fixed order.
using GradMap = std::map<std::string, Tensor>;

// All trainable parameters plus their Adadelta accumulators.
class ParamStore {
 public:
  struct Entry {
    Tensor value;
    Tensor grad_sq_avg;   // E[g^2]
    Tensor delta_sq_avg;  // E[dx^2]
  };

  Tensor& add(const std::string& name, std::vector<std::size_t> shape) {
    if (entries_.count(name)) throw config_error("duplicate parameter name: " + name);
    Entry e;
    e.value = Tensor(shape);
    e.grad_sq_avg = Tensor(shape);
    e.delta_sq_avg = Tensor(std::move(shape));
    auto [it, ok] = entries_.emplace(name, std::move(e));
    (void)ok;
    order_.push_back(name);
    return it->second.value;
  }

  bool contains(const std::string& name) const { return entries_.count(name) != 0; }

  const Tensor& value(const std::string& name) const { return find(name).value; }
  Tensor& value(const std::string& name) { return find(name).value; }
  Entry& entry(const std::string& name) { return find(name); }
  const Entry& entry(const std::string& name) const { return find(name); }

  // creation order, used for deterministic initialization
  const std::vector<std::string>& names() const { return order_; }

  std::size_t coordinate_count() const {
    std::size_t n = 0;
    for (const auto& name : order_) n += entries_.at(name).value.size();
    return n;
  }

  void init_uniform(double half_range, std::uint64_t seed) {
    Rng rng(seed);
    for (const auto& name : order_)
      for (double& v : entries_.at(name).value.data)
        v = rng.next_real(-half_range, half_range);
  }

  GradMap zero_grads() const {
    GradMap g;
    for (const auto& name : order_) g.emplace(name, Tensor(entries_.at(name).value.shape));
    return g;
  }

 private:
  Entry& find(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw config_error("unknown parameter: " + name);
    return it->second;
  }
  const Entry& find(const std::string& name) const {
    return const_cast<ParamStore*>(this)->find(name);
  }

  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
};

inline double global_grad_norm(const GradMap& grads) {
  double sq = 0.0;
  for (const auto& [name, g] : grads)
    for (double v : g.data) sq += v * v;
  return std::sqrt(sq);
}

// In-place global-norm clipping; returns the pre-clip norm.
inline double clip_gradients(GradMap& grads, double max_norm) {
  const double norm = global_grad_norm(grads);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (auto& [name, g] : grads)
      for (double& v : g.data) v *= scale;
  }
  return norm;
}

// Scale-free update: dx = -sqrt((E[dx^2]+eps)/(E[g^2]+eps)) * g
inline void adadelta_update(ParamStore& store, const GradMap& grads, double rho = 0.95,
                            double epsilon = 1e-6) {
  for (const auto& [name, grad] : grads) {
    auto& e = store.entry(name);
    require_same_shape(e.value, grad, "adadelta_update(" + name + ")");
    for (std::size_t i = 0; i < grad.size(); ++i) {
      const double g = grad.data[i];
      double& eg = e.grad_sq_avg.data[i];
      double& ed = e.delta_sq_avg.data[i];
      eg = rho * eg + (1.0 - rho) * g * g;
      const double dx = -std::sqrt((ed + epsilon) / (eg + epsilon)) * g;
      ed = rho * ed + (1.0 - rho) * dx * dx;
      e.value.data[i] += dx;
      if (!std::isfinite(e.value.data[i]))
        throw numeric_error("non-finite parameter after update: " + name);
    }
  }
}

}  // namespace deepam
