// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wscnn/nd_array.hpp"

namespace wscnn {

// Reverse-mode tape covering exactly the operation set the inverse-scattering
// network needs. Nodes are identified by creation order, which is already a
// topological order; backward() sweeps it in reverse and accumulates
// gradients additively, so fan-out works and repeated backward calls add up.
// The caller zeroes gradients between optimizer steps (by clearing or
// rebuilding the tape). A tape is confined to one thread.
class Tape {
public:
  using NodeId = std::uint32_t;

  NodeId leaf(NdArray value, bool requires_grad = false);

  NodeId conv2d(NodeId x, NodeId w, NodeId bias, int stride, int pad);
  NodeId deconv2d(NodeId x, NodeId w, int stride);
  NodeId relu(NodeId x);
  NodeId add(NodeId a, NodeId b);
  NodeId sum(NodeId x);
  NodeId mse_loss(NodeId pred, NodeId target);

  const NdArray& value(NodeId id) const { return nodes_[id].value; }

  // zeros until backward touches the node
  const NdArray& grad(NodeId id);

  bool requires_grad(NodeId id) const { return nodes_[id].requires_grad; }

  // reverse sweep from a scalar loss; rejects non-scalar nodes
  void backward(NodeId loss);

  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

private:
  struct Node {
    NdArray value;
    NdArray grad;  // empty until touched
    bool requires_grad = false;
    std::function<void(Tape&, NodeId)> backprop;  // null for leaves
  };

  NodeId push(NdArray value, bool requires_grad, std::function<void(Tape&, NodeId)> backprop);
  void accumulate(NodeId id, const NdArray& contribution);
  void seed(NodeId id);

  std::vector<Node> nodes_;
};

}  // namespace wscnn
