// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/gradcheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "dcr/errors.hpp"
#include "dcr/graph.hpp"

namespace dcr {

std::string GradcheckReport::summary() const {
  std::ostringstream os;
  os << (passed ? "PASS" : "FAIL") << " max_rel_error=" << max_rel_error
     << " checked=" << checked << " worst=(tensor " << worst_tensor << ", index "
     << worst_index << ", analytic " << worst_analytic << ", numeric " << worst_numeric << ")";
  return os.str();
}

namespace {

double evaluate(const std::function<Tensor()>& fn, std::size_t tensor, std::size_t index) {
  NoGradGuard no_grad;
  const double v = fn().item();
  if (!std::isfinite(v)) {
    throw NumericalError("gradcheck: non-finite function value while perturbing tensor " +
                         std::to_string(tensor) + " index " + std::to_string(index));
  }
  return v;
}

std::vector<std::size_t> coordinates(std::size_t n, const GradcheckOptions& o,
                                     std::size_t tensor) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (o.max_coordinates == 0 || o.max_coordinates >= n) return idx;
  std::mt19937_64 rng(o.seed + 0x9E3779B97F4A7C15ull * (tensor + 1));
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(o.max_coordinates);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

GradcheckReport gradcheck(const std::function<Tensor()>& fn, std::span<Tensor> wrt,
                          const GradcheckOptions& options) {
  if (!(options.step > 0.0)) throw std::invalid_argument("gradcheck: step must be > 0");

  std::vector<bool> previous(wrt.size());
  for (std::size_t i = 0; i < wrt.size(); ++i) {
    if (!wrt[i].is_leaf()) throw GraphError("gradcheck: wrt tensors must be leaves");
    previous[i] = wrt[i].requires_grad();
    wrt[i].set_requires_grad(true);
    wrt[i].clear_grad();
  }

  Graph::active().reset();
  const Tensor loss = fn();
  if (!std::isfinite(loss.item())) {
    throw NumericalError("gradcheck: non-finite function value at the base point");
  }
  backward(loss);
  std::vector<Tensor> analytic;
  analytic.reserve(wrt.size());
  for (auto& t : wrt) analytic.push_back(t.grad_tensor());
  Graph::active().reset();
  for (std::size_t i = 0; i < wrt.size(); ++i) {
    auto g = analytic[i].data();
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (!std::isfinite(g[j])) {
        throw NumericalError("gradcheck: non-finite analytic gradient in tensor " +
                             std::to_string(i) + " index " + std::to_string(j));
      }
    }
  }

  GradcheckReport report;
  for (std::size_t i = 0; i < wrt.size(); ++i) {
    auto values = wrt[i].mutable_data();
    for (std::size_t j : coordinates(values.size(), options, i)) {
      const double original = values[j];
      const double a = analytic[i].data()[j];
      auto measure = [&](double h, double* numeric) {
        values[j] = original + h;
        const double up = evaluate(fn, i, j);
        values[j] = original - h;
        const double down = evaluate(fn, i, j);
        values[j] = original;
        *numeric = (up - down) / (2.0 * h);
        const double slack = options.roundoff * std::numeric_limits<double>::epsilon() *
                             std::max(std::abs(up), std::abs(down)) / h;
        const double denom = std::max({std::abs(a), std::abs(*numeric), options.floor});
        return std::max(0.0, std::abs(a - *numeric) - slack) / denom;
      };
      double numeric = 0.0;
      double err = measure(options.step, &numeric);
      if (err >= options.tolerance && options.retry_ratio > 0.0) {
        double retry_numeric = 0.0;
        const double retry = measure(options.step * options.retry_ratio, &retry_numeric);
        if (retry < err) {
          err = retry;
          numeric = retry_numeric;
        }
      }
      ++report.checked;
      if (err > report.max_rel_error) {
        report.max_rel_error = err;
        report.worst_tensor = i;
        report.worst_index = j;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  report.passed = report.max_rel_error < options.tolerance;

  for (std::size_t i = 0; i < wrt.size(); ++i) {
    wrt[i].clear_grad();
    wrt[i].set_requires_grad(previous[i]);
  }
  return report;
}

GradcheckReport gradcheck(const std::function<Tensor(const Tensor&)>& fn, const Tensor& point,
                          const GradcheckOptions& options) {
  std::array<Tensor, 1> wrt{point.detach()};
  const Tensor& x = wrt[0];
  return gradcheck([&fn, &x]() { return fn(x); }, wrt, options);
}

}  // namespace dcr
