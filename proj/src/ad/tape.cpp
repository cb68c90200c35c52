#include "rxprobe/ad/tape.hpp"

#include <stdexcept>

namespace rxprobe::ad {

Tensor Tape::watch(const Tensor& value) {
  if (!value.defined()) throw std::invalid_argument("watch: undefined tensor");
  Tensor leaf = value.detach();
  Entry e;
  e.op = "leaf";
  e.raw_size = leaf.raw_size();
  entries_.push_back(std::move(e));
  leaf.tape_ = this;
  leaf.node_ = static_cast<int>(entries_.size() - 1);
  return leaf;
}

Tensor Tape::record(const char* op, Tensor output, std::initializer_list<const Tensor*> inputs,
                    BackwardFn backward) {
  return record(op, std::move(output), std::vector<const Tensor*>(inputs), std::move(backward));
}

Tensor Tape::record(const char* op, Tensor output, const std::vector<const Tensor*>& inputs,
                    BackwardFn backward) {
  Tape* tape = nullptr;
  for (const Tensor* in : inputs) {
    if (!in->requires_grad()) continue;
    if (tape != nullptr && tape != in->tape()) {
      throw std::invalid_argument(std::string(op) + ": inputs are attached to different tapes");
    }
    tape = in->tape();
  }
  if (tape == nullptr) return output;

  Entry e;
  e.op = op;
  e.raw_size = output.raw_size();
  e.inputs.reserve(inputs.size());
  for (const Tensor* in : inputs) e.inputs.push_back(in->requires_grad() ? in->node() : -1);
  e.backward = std::move(backward);
  tape->entries_.push_back(std::move(e));
  output.tape_ = tape;
  output.node_ = static_cast<int>(tape->entries_.size() - 1);
  return output;
}

Gradients Tape::backward(const Tensor& loss) const {
  if (loss.tape() != this) throw std::invalid_argument("backward: loss is not on this tape");
  if (loss.is_complex()) throw std::invalid_argument("backward: loss must be real, got a complex tensor");
  if (loss.numel() != 1) throw std::invalid_argument("backward: loss must be a scalar, got shape " + shape_str(loss.shape()));

  std::vector<std::vector<double>> grads(entries_.size());
  grads[static_cast<std::size_t>(loss.node())].assign(1, 1.0);

  std::vector<double*> grad_in;
  for (std::size_t i = static_cast<std::size_t>(loss.node()) + 1; i-- > 0;) {
    const Entry& e = entries_[i];
    if (grads[i].empty() || !e.backward) continue;
    grad_in.assign(e.inputs.size(), nullptr);
    for (std::size_t k = 0; k < e.inputs.size(); ++k) {
      const int src = e.inputs[k];
      if (src < 0) continue;
      auto& g = grads[static_cast<std::size_t>(src)];
      if (g.empty()) g.assign(entries_[static_cast<std::size_t>(src)].raw_size, 0.0);
      grad_in[k] = g.data();
    }
    e.backward(grads[i], grad_in);
    // Interior gradients are no longer needed once propagated.
    if (!e.inputs.empty()) std::vector<double>().swap(grads[i]);
  }

  Gradients out;
  out.tape_ = this;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].inputs.empty() && !grads[i].empty()) out.grads_.emplace(static_cast<int>(i), std::move(grads[i]));
  }
  return out;
}

bool Gradients::reached(const Tensor& leaf) const {
  return leaf.tape() == tape_ && grads_.count(leaf.node()) != 0;
}

Tensor Gradients::wrt(const Tensor& leaf) const {
  if (leaf.tape() != tape_ || !leaf.requires_grad()) {
    throw std::invalid_argument("Gradients::wrt: tensor is not a leaf of this tape");
  }
  auto it = grads_.find(leaf.node());
  if (it == grads_.end()) return Tensor::zeros(leaf.shape(), leaf.dtype());
  if (leaf.is_complex()) return Tensor::complex(leaf.shape(), it->second);
  return Tensor::real(leaf.shape(), it->second);
}

}  // namespace rxprobe::ad
