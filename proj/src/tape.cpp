// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/tape.hpp"

#include <string>

#include "wscnn/tensor_ops.hpp"

namespace wscnn {

Tape::NodeId Tape::push(NdArray value, bool requires_grad,
                        std::function<void(Tape&, NodeId)> backprop) {
  nodes_.push_back(Node{std::move(value), NdArray(), requires_grad, std::move(backprop)});
  return static_cast<NodeId>(nodes_.size() - 1);
}

Tape::NodeId Tape::leaf(NdArray value, bool requires_grad) {
  return push(std::move(value), requires_grad, nullptr);
}

void Tape::accumulate(NodeId id, const NdArray& contribution) {
  Node& node = nodes_[id];
  if (!node.requires_grad) return;
  if (node.grad.empty()) {
    node.grad = contribution;
    return;
  }
  for (std::size_t i = 0; i < node.grad.numel(); ++i) node.grad[i] += contribution[i];
}

const NdArray& Tape::grad(NodeId id) {
  Node& node = nodes_[id];
  if (node.grad.empty()) node.grad = NdArray(node.value.shape());
  return node.grad;
}

void Tape::seed(NodeId id) {
  Node& node = nodes_[id];
  if (node.grad.empty()) node.grad = NdArray(node.value.shape());
  for (std::size_t i = 0; i < node.grad.numel(); ++i) node.grad[i] += real(1);
}

void Tape::backward(NodeId loss) {
  if (nodes_[loss].value.numel() != 1)
    throw DataError("backward: loss must be scalar, got shape " +
                    shape_to_string(nodes_[loss].value.shape()));
  seed(loss);
  for (NodeId id = loss + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (node.grad.empty() || !node.backprop) continue;
    node.backprop(*this, id);
  }
}

Tape::NodeId Tape::conv2d(NodeId x, NodeId w, NodeId bias, int stride, int pad) {
  NdArray out = ops::conv2d(nodes_[x].value, nodes_[w].value, nodes_[bias].value, stride, pad);
  const bool rg = nodes_[x].requires_grad || nodes_[w].requires_grad || nodes_[bias].requires_grad;
  return push(std::move(out), rg, [x, w, bias, stride, pad](Tape& t, NodeId self) {
    const NdArray& g = t.nodes_[self].grad;
    const NdArray& xv = t.nodes_[x].value;
    const NdArray& wv = t.nodes_[w].value;
    if (t.nodes_[x].requires_grad)
      t.accumulate(x, ops::conv2d_grad_input(g, wv, static_cast<int>(xv.size(2)),
                                             static_cast<int>(xv.size(3)), stride, pad));
    if (t.nodes_[w].requires_grad)
      t.accumulate(w, ops::conv2d_grad_kernels(g, xv, static_cast<int>(wv.size(2)),
                                               static_cast<int>(wv.size(3)), stride, pad));
    if (t.nodes_[bias].requires_grad) t.accumulate(bias, ops::conv2d_grad_bias(g));
  });
}

Tape::NodeId Tape::deconv2d(NodeId x, NodeId w, int stride) {
  NdArray out = ops::deconv2d(nodes_[x].value, nodes_[w].value, stride);
  const bool rg = nodes_[x].requires_grad || nodes_[w].requires_grad;
  return push(std::move(out), rg, [x, w, stride](Tape& t, NodeId self) {
    const NdArray& g = t.nodes_[self].grad;
    const NdArray& xv = t.nodes_[x].value;
    const NdArray& wv = t.nodes_[w].value;
    if (t.nodes_[x].requires_grad)
      t.accumulate(x, ops::deconv2d_grad_input(g, wv, stride));
    if (t.nodes_[w].requires_grad)
      t.accumulate(w, ops::deconv2d_grad_kernels(g, xv, static_cast<int>(wv.size(2)),
                                                 static_cast<int>(wv.size(3)), stride));
  });
}

Tape::NodeId Tape::relu(NodeId x) {
  NdArray out = ops::relu(nodes_[x].value);
  return push(std::move(out), nodes_[x].requires_grad, [x](Tape& t, NodeId self) {
    if (t.nodes_[x].requires_grad)
      t.accumulate(x, ops::relu_grad(t.nodes_[self].grad, t.nodes_[x].value));
  });
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  NdArray out = ops::add(nodes_[a].value, nodes_[b].value);
  const bool rg = nodes_[a].requires_grad || nodes_[b].requires_grad;
  return push(std::move(out), rg, [a, b](Tape& t, NodeId self) {
    const NdArray& g = t.nodes_[self].grad;
    if (t.nodes_[a].requires_grad) t.accumulate(a, g);
    if (t.nodes_[b].requires_grad) t.accumulate(b, g);
  });
}

Tape::NodeId Tape::sum(NodeId x) {
  double acc = 0;
  const NdArray& xv = nodes_[x].value;
  for (std::size_t i = 0; i < xv.numel(); ++i) acc += xv[i];
  NdArray out(Shape{});
  out[0] = static_cast<real>(acc);
  return push(std::move(out), nodes_[x].requires_grad, [x](Tape& t, NodeId self) {
    if (!t.nodes_[x].requires_grad) return;
    const real g = t.nodes_[self].grad[0];
    NdArray contrib(t.nodes_[x].value.shape(), g);
    t.accumulate(x, contrib);
  });
}

Tape::NodeId Tape::mse_loss(NodeId pred, NodeId target) {
  NdArray out(Shape{});
  out[0] = ops::mse(nodes_[pred].value, nodes_[target].value);
  const bool rg = nodes_[pred].requires_grad || nodes_[target].requires_grad;
  return push(std::move(out), rg, [pred, target](Tape& t, NodeId self) {
    const real g = t.nodes_[self].grad[0];
    if (t.nodes_[pred].requires_grad)
      t.accumulate(pred, ops::mse_grad(t.nodes_[pred].value, t.nodes_[target].value, g));
    if (t.nodes_[target].requires_grad)
      t.accumulate(target, ops::mse_grad(t.nodes_[target].value, t.nodes_[pred].value, g));
  });
}

}  // namespace wscnn
