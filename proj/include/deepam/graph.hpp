#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "deepam/nn.hpp"
#include "deepam/param_store.hpp"

namespace deepam {

// Recorded-tape reverse-mode differentiation over vector-valued ops.
// Forward calls append nodes; backward() replays the tape once in reverse
// and accumulates parameter gradients by name. Everything runs in one fixed
// sequential order.
class Graph {
 public:
  using Ref = std::size_t;

  explicit Graph(const ParamStore& params) : params_(params) {}

  const Vec& value(Ref r) const { return nodes_[r].v; }
  double loss() const { return loss_; }

  Ref constant(Vec v) { return push(std::move(v), {}); }

  Ref embedding_row(const std::string& table, std::size_t row) {
    const Tensor& t = params_.value(table);
    const std::size_t dim = t.cols();
    Vec v(t.data.begin() + row * dim, t.data.begin() + (row + 1) * dim);
    Ref out = push(std::move(v), [this, table, row, dim](Node& n) {
      Vec& g = grad_of(table);
      for (std::size_t j = 0; j < dim; ++j) g[row * dim + j] += n.g[j];
    });
    return out;
  }

  // y = W x + b, W row-major (m x n)
  Ref affine(const std::string& w_name, const std::string& b_name, Ref x) {
    const Tensor& w = params_.value(w_name);
    const Tensor& b = params_.value(b_name);
    const Vec& xv = nodes_[x].v;
    const std::size_t m = w.rows(), n = w.cols();
    if (xv.size() != n || b.size() != m)
      throw numeric_error("affine dimension mismatch for " + w_name);
    Vec y(m);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = b.data[i];
      const double* row = w.data.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * xv[j];
      y[i] = acc;
    }
    return push(std::move(y), [this, w_name, b_name, x, m, n](Node& node) {
      const Tensor& w = params_.value(w_name);
      const Vec& xv = nodes_[x].v;
      Vec& gw = grad_of(w_name);
      Vec& gb = grad_of(b_name);
      Vec& gx = nodes_[x].g;
      for (std::size_t i = 0; i < m; ++i) {
        const double gi = node.g[i];
        if (gi == 0.0) continue;
        gb[i] += gi;
        const double* row = w.data.data() + i * n;
        double* grow = gw.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) {
          grow[j] += gi * xv[j];
          gx[j] += gi * row[j];
        }
      }
    });
  }

  Ref add(Ref a, Ref b) {
    const Vec& av = nodes_[a].v;
    const Vec& bv = nodes_[b].v;
    if (av.size() != bv.size()) throw numeric_error("add dimension mismatch");
    Vec y(av.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] + bv[i];
    return push(std::move(y), [this, a, b](Node& n) {
      for (std::size_t i = 0; i < n.g.size(); ++i) {
        nodes_[a].g[i] += n.g[i];
        nodes_[b].g[i] += n.g[i];
      }
    });
  }

  Ref hadamard(Ref a, Ref b) {
    const Vec& av = nodes_[a].v;
    const Vec& bv = nodes_[b].v;
    if (av.size() != bv.size()) throw numeric_error("hadamard dimension mismatch");
    Vec y(av.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] * bv[i];
    return push(std::move(y), [this, a, b](Node& n) {
      for (std::size_t i = 0; i < n.g.size(); ++i) {
        nodes_[a].g[i] += n.g[i] * nodes_[b].v[i];
        nodes_[b].g[i] += n.g[i] * nodes_[a].v[i];
      }
    });
  }

  Ref sigmoid_of(Ref a) {
    Vec y(nodes_[a].v.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = sigmoid(nodes_[a].v[i]);
    return push(std::move(y), [this, a](Node& n) {
      for (std::size_t i = 0; i < n.g.size(); ++i)
        nodes_[a].g[i] += n.g[i] * n.v[i] * (1.0 - n.v[i]);
    });
  }

  Ref tanh_of(Ref a) {
    Vec y(nodes_[a].v.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::tanh(nodes_[a].v[i]);
    return push(std::move(y), [this, a](Node& n) {
      for (std::size_t i = 0; i < n.g.size(); ++i)
        nodes_[a].g[i] += n.g[i] * (1.0 - n.v[i] * n.v[i]);
    });
  }

  // z .* a + (1 - z) .* b
  Ref blend(Ref z, Ref a, Ref b) {
    const Vec& zv = nodes_[z].v;
    const Vec& av = nodes_[a].v;
    const Vec& bv = nodes_[b].v;
    if (zv.size() != av.size() || zv.size() != bv.size())
      throw numeric_error("blend dimension mismatch");
    Vec y(zv.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = zv[i] * av[i] + (1.0 - zv[i]) * bv[i];
    return push(std::move(y), [this, z, a, b](Node& n) {
      for (std::size_t i = 0; i < n.g.size(); ++i) {
        const double g = n.g[i];
        nodes_[z].g[i] += g * (nodes_[a].v[i] - nodes_[b].v[i]);
        nodes_[a].g[i] += g * nodes_[z].v[i];
        nodes_[b].g[i] += g * (1.0 - nodes_[z].v[i]);
      }
    });
  }

  Ref concat(std::initializer_list<Ref> parts) {
    return concat(std::vector<Ref>(parts));
  }

  Ref concat(const std::vector<Ref>& parts) {
    Vec y;
    for (Ref p : parts) y.insert(y.end(), nodes_[p].v.begin(), nodes_[p].v.end());
    return push(std::move(y), [this, parts](Node& n) {
      std::size_t off = 0;
      for (Ref p : parts) {
        Vec& g = nodes_[p].g;
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.g[off + i];
        off += g.size();
      }
    });
  }

  // Accumulates weight * sum(x) into the scalar loss.
  double sum_loss(Ref x, double weight = 1.0) {
    double s = 0.0;
    for (double v : nodes_[x].v) s += v;
    const double contribution = weight * s;
    loss_ += contribution;
    push({}, [this, x, weight](Node&) {
      for (double& g : nodes_[x].g) g += weight;
    });
    return contribution;
  }

  // Accumulates weight * (-log softmax(logits)[target]) into the scalar
  // loss and seeds the matching gradient during backward().
  double cross_entropy(Ref logits, std::size_t target, double weight) {
    auto sm = softmax_cross_entropy(nodes_[logits].v, target);
    const double contribution = weight * sm.loss;
    loss_ += contribution;
    Vec probs = std::move(sm.probabilities);
    push({}, [this, logits, target, weight, probs = std::move(probs)](Node&) {
      Vec& g = nodes_[logits].g;
      for (std::size_t i = 0; i < g.size(); ++i)
        g[i] += weight * (probs[i] - (i == target ? 1.0 : 0.0));
    });
    return contribution;
  }

  // Reverse sweep; parameter gradients keyed by name. Must follow at least
  // one forward op.
  GradMap backward() {
    if (nodes_.empty()) throw numeric_error("backward called before any forward op");
    for (std::size_t i = nodes_.size(); i-- > 0;) {
      Node& n = nodes_[i];
      if (n.back) n.back(n);
    }
    GradMap out;
    for (auto& [name, g] : grads_) {
      Tensor t(params_.value(name).shape);
      t.data = std::move(g);
      out.emplace(name, std::move(t));
    }
    grads_.clear();
    return out;
  }

 private:
  struct Node {
    Vec v;
    Vec g;
    std::function<void(Node&)> back;
  };

  Ref push(Vec v, std::function<void(Node&)> back) {
    Node n;
    n.g.assign(v.size(), 0.0);
    n.v = std::move(v);
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  Vec& grad_of(const std::string& name) {
    auto it = grads_.find(name);
    if (it == grads_.end())
      it = grads_.emplace(name, Vec(params_.value(name).size(), 0.0)).first;
    return it->second;
  }

  const ParamStore& params_;
  std::vector<Node> nodes_;
  std::map<std::string, Vec> grads_;
  double loss_ = 0.0;
};

}  // namespace deepam
