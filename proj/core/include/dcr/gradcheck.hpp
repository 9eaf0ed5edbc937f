// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "dcr/tensor.hpp"

namespace dcr {

struct GradcheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  /// Lower bound on the denominator of the relative error, so that
  /// coordinates whose true gradient is ~0 are judged on absolute error.
  double floor = 1e-6;
  /// A coordinate over tolerance is measured again with step * retry_ratio and
  /// the smaller error is kept (0 disables). A stencil that straddles a kink
  /// of abs / leaky_relu disagrees with the analytic slope at one step only;
  /// a wrong gradient fails at both.
  double retry_ratio = 0.1;
  /// Absolute slack granted to the difference quotient for rounding in the
  /// two function values: roundoff * eps * max(|f(x+h)|, |f(x-h)|) / h.
  /// Matters only for gradients far below the function's magnitude.
  double roundoff = 8.0;
  /// Check at most this many coordinates per tensor, chosen by `seed`
  /// (0 checks every coordinate).
  std::size_t max_coordinates = 0;
  std::uint64_t seed = 0;
};

struct GradcheckReport {
  double max_rel_error = 0.0;
  bool passed = true;
  std::size_t checked = 0;
  // Location and values of the worst coordinate.
  std::size_t worst_tensor = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;

  [[nodiscard]] std::string summary() const;
};

/// Compares reverse-mode gradients of the scalar returned by `fn` w.r.t. each
/// leaf in `wrt` against central finite differences. `fn` must read the
/// current values of `wrt` on every call and be deterministic.
///
/// Throws NumericalError if a non-finite value shows up, naming the tensor and
/// coordinate being perturbed.
GradcheckReport gradcheck(const std::function<Tensor()>& fn, std::span<Tensor> wrt,
                          const GradcheckOptions& options = {});

/// Single-argument form: checks d f(point) / d point.
GradcheckReport gradcheck(const std::function<Tensor(const Tensor&)>& fn, const Tensor& point,
                          const GradcheckOptions& options = {});

}  // namespace dcr
