// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dcr/tensor.hpp"

namespace dcr {

/// Receives the gradient of the loss w.r.t. a node's output and accumulates
/// the gradients of its inputs.
using BackwardFn = std::function<void(std::span<const double> grad_out)>;

/// Define-by-run tape. Nodes are appended in creation order, so every node's
/// inputs precede it; backward() replays them in exact reverse order.
///
/// One Graph is active per thread. A graph can be consumed by backward() once;
/// recording a new node into a consumed graph starts a fresh generation, and
/// any loss from an earlier generation is then reported as stale.
class Graph {
 public:
  struct Node {
    std::string tag;
    std::vector<std::size_t> input_nodes;  // indices of non-leaf inputs
    std::shared_ptr<detail::TensorImpl> output;
    BackwardFn backward;
  };

  static Graph& active();

  /// Clears all recorded nodes and starts a new generation.
  void reset();

  [[nodiscard]] std::uint64_t generation() const { return generation_; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] bool consumed() const { return consumed_; }
  [[nodiscard]] const std::vector<Node>& nodes() const { return nodes_; }

  /// Attaches `output` to the graph as the result of `tag` applied to
  /// `inputs`. No-op unless some input requires a gradient and grad mode is
  /// on; in that case `output` is marked requires_grad.
  void record(std::string tag, std::span<const Tensor> inputs, Tensor& output,
              BackwardFn backward);

  /// Accumulates d(loss)/d(t) into every reachable tensor t that requires a
  /// gradient. Throws GraphError on a non-scalar, stale or consumed graph.
  void backward(const Tensor& loss);

 private:
  std::vector<Node> nodes_;
  std::uint64_t generation_ = 1;
  bool consumed_ = false;
};

/// True when some input requires a gradient and recording is enabled.
bool needs_grad(std::span<const Tensor> inputs);

inline void backward(const Tensor& loss) { Graph::active().backward(loss); }

/// Disables recording on this thread while in scope.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

}  // namespace dcr
