#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "deepam/param_store.hpp"
#include "deepam/rng.hpp"

namespace deepam {

struct GradCheckReport {
  std::size_t coordinates_checked = 0;
  double max_rel_error = 0.0;
  std::string worst_parameter;
  bool pass = false;
};

// Central finite differences vs the supplied analytic gradients on a random
// subsample of parameter coordinates. Relative error uses the symmetric
// denominator |a| + |b|, floored at 1e-4 so that near-zero gradients are
// held to an absolute-error criterion instead of amplifying the ~1e-9
// round-off noise inherent in double-precision central differences.
inline GradCheckReport gradient_check(const std::function<double(const ParamStore&)>& loss_fn,
                                      ParamStore& params, const GradMap& analytic,
                                      double tolerance, std::size_t min_coordinates = 200,
                                      double epsilon = 1e-5, std::uint64_t seed = 1234) {
  struct Coord {
    std::string name;
    std::size_t index;
  };
  std::vector<Coord> all;
  for (const auto& name : params.names()) {
    const std::size_t n = params.value(name).size();
    for (std::size_t i = 0; i < n; ++i) all.push_back({name, i});
  }

  Rng rng(seed);
  rng.shuffle(all);
  const std::size_t n_check = std::min(all.size(), std::max<std::size_t>(min_coordinates, 1));

  GradCheckReport report;
  for (std::size_t k = 0; k < n_check; ++k) {
    const Coord& c = all[k];
    double& theta = params.value(c.name).data[c.index];
    const double saved = theta;
    theta = saved + epsilon;
    const double up = loss_fn(params);
    theta = saved - epsilon;
    const double down = loss_fn(params);
    theta = saved;

    const double fd = (up - down) / (2.0 * epsilon);
    auto it = analytic.find(c.name);
    const double an = it == analytic.end() ? 0.0 : it->second.data[c.index];
    const double denom = std::max(std::abs(fd) + std::abs(an), 1e-4);
    const double rel = std::abs(fd - an) / denom;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_parameter = c.name + "[" + std::to_string(c.index) + "]";
    }
    ++report.coordinates_checked;
  }
  report.pass = report.max_rel_error < tolerance;
  return report;
}

}  // namespace deepam
