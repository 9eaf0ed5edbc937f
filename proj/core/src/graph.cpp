// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/graph.hpp"

#include "dcr/errors.hpp"

namespace dcr {

namespace {

thread_local bool t_grad_enabled = true;

}  // namespace

bool grad_enabled() { return t_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) { t_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

Graph& Graph::active() {
  thread_local Graph graph;
  return graph;
}

void Graph::reset() {
  // Outputs keep their (now stale) node ids so a loss from an old graph is
  // reported as stale instead of being taken for a leaf.
  nodes_.clear();
  ++generation_;
  consumed_ = false;
}

bool needs_grad(std::span<const Tensor> inputs) {
  if (!t_grad_enabled) return false;
  for (const auto& t : inputs) {
    if (t.defined() && t.requires_grad()) return true;
  }
  return false;
}

void Graph::record(std::string tag, std::span<const Tensor> inputs, Tensor& output,
                   BackwardFn backward) {
  if (!needs_grad(inputs)) return;
  if (consumed_) reset();
  Node node;
  node.tag = std::move(tag);
  for (const auto& t : inputs) {
    if (!t.defined()) continue;
    const auto& id = t.node_id();
    if (id && id->generation == generation_) node.input_nodes.push_back(id->index);
  }
  node.output = output.impl();
  node.backward = std::move(backward);
  output.impl()->requires_grad = true;
  output.impl()->node = NodeId{generation_, nodes_.size()};
  nodes_.push_back(std::move(node));
}

void Graph::backward(const Tensor& loss) {
  if (!loss.defined() || !loss.shape().is_scalar()) {
    throw GraphError("backward() requires a scalar loss");
  }
  if (!loss.requires_grad()) {
    throw GraphError("backward(): loss does not depend on any tensor requiring a gradient");
  }
  const auto id = loss.node_id();
  if (!id) {
    // A leaf loss: its gradient is trivially one.
    loss.impl()->grad_buffer()[0] += 1.0;
    return;
  }
  if (id->generation != generation_) {
    throw GraphError("backward(): stale graph (loss belongs to a graph that was reset)");
  }
  if (consumed_) {
    throw GraphError("backward(): graph already consumed; reset() before another pass");
  }
  consumed_ = true;
  loss.impl()->grad_buffer()[0] += 1.0;
  for (std::size_t i = id->index + 1; i-- > 0;) {
    Node& node = nodes_[i];
    const auto& grad = node.output->grad;
    if (grad.empty()) continue;  // not on a path to the loss
    node.backward(grad);
  }
}

}  // namespace dcr
