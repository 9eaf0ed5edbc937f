// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dcr/gradcheck.hpp"

namespace dcr {

/// One randomised gradient check; each call draws a fresh instance from
/// `seed` (shapes, values and op parameters).
struct GradcheckCase {
  std::string name;
  std::function<GradcheckReport(std::uint64_t seed, const GradcheckOptions& options)> run;
};

/// Every differentiable op, the wavelet transforms, the loss terms, both
/// networks and the complete training objective. Inputs are drawn away from
/// the kinks of abs / clamp / leaky_relu so central differences stay valid.
const std::vector<GradcheckCase>& gradcheck_cases();

struct GradcheckSuiteResult {
  std::string name;
  int instances = 0;
  int failures = 0;
  double max_rel_error = 0.0;
  std::string worst;  // summary of the worst instance
};

/// Runs `instances` seeded instances of every case whose name contains
/// `filter` (empty: all).
std::vector<GradcheckSuiteResult> run_gradcheck_suite(int instances, std::uint64_t seed,
                                                      const std::string& filter = "",
                                                      const GradcheckOptions& options = {});

}  // namespace dcr
