#pragma once

#include <functional>
#include <optional>

#include "scotlab/kernels.hpp"
#include "scotlab/tensor.hpp"

namespace scotlab {

// Reverse-mode tape. Nodes are appended in forward (topological) order;
// backward() walks them exactly once in reverse. One tape per forward
// pass, confined to a single thread.
template <class T>
class Tape {
 public:
  using BackFn = std::function<void(Tape&, const Tensor<T>&)>;

  // Registers a leaf (parameter or input) for gradient tracking.
  int64_t watch(Tensor<T>& t) {
    t.tape = this;
    t.node = push(t.shape(), BackFn{});
    return t.node;
  }

  int64_t push(Shape shape, BackFn back) {
    nodes_.push_back(Node{std::move(shape), std::move(back)});
    grads_.emplace_back();
    return int64_t(nodes_.size()) - 1;
  }

  void accumulate(int64_t node, const Tensor<T>& g) {
    if (node < 0) return;
    if (g.shape() != nodes_[size_t(node)].shape)
      throw ShapeError("gradient shape " + shape_str(g.shape()) + " for node of shape " +
                       shape_str(nodes_[size_t(node)].shape));
    auto& slot = grads_[size_t(node)];
    if (!slot) {
      slot = g.clone();
      return;
    }
    T* acc = slot->data();
    const T* src = g.data();
    for (int64_t i = 0; i < g.size(); ++i) acc[i] += src[i];
  }

  // Seeds d(loss)/d(loss) = 1 and propagates to every reachable node.
  void backward(const Tensor<T>& loss) {
    if (loss.size() != 1) throw ShapeError("backward() needs a scalar loss, got " + shape_str(loss.shape()));
    if (loss.tape != this || loss.node < 0) throw ValueError("loss is not attached to this tape");
    accumulate(loss.node, Tensor<T>::ones(loss.shape()));
    for (int64_t i = loss.node; i >= 0; --i) {
      if (!grads_[size_t(i)] || !nodes_[size_t(i)].back) continue;
      nodes_[size_t(i)].back(*this, *grads_[size_t(i)]);
      // intermediate gradients are dead once their node has run
      if (!keep_intermediate_ && nodes_[size_t(i)].back) grads_[size_t(i)].reset();
    }
  }

  // Gradient for a tracked tensor; zeros if nothing flowed into it.
  Tensor<T> grad(const Tensor<T>& t) const {
    if (t.tape != this || t.node < 0) throw ValueError("tensor is not attached to this tape");
    const auto& slot = grads_[size_t(t.node)];
    return slot ? *slot : Tensor<T>::zeros(t.shape());
  }

  bool has_grad(const Tensor<T>& t) const {
    return t.tape == this && t.node >= 0 && bool(grads_[size_t(t.node)]);
  }

  size_t num_nodes() const { return nodes_.size(); }

  void set_keep_intermediate(bool keep) { keep_intermediate_ = keep; }

 private:
  struct Node {
    Shape shape;
    BackFn back;
  };
  std::vector<Node> nodes_;
  std::vector<std::optional<Tensor<T>>> grads_;
  bool keep_intermediate_ = false;
};

}  // namespace scotlab
