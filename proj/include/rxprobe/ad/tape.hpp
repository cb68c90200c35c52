#pragma once

#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rxprobe/ad/tensor.hpp"

namespace rxprobe::ad {

// Local backward rule of a recorded op. `grad_out` holds the raw gradient of
// the op output (interleaved for complex outputs). `grad_in[k]` points at the
// raw gradient accumulator of input k, or is nullptr if that input does not
// require grad. Rules must accumulate (+=), never assign.
using BackwardFn = std::function<void(std::span<const double> grad_out, std::span<double* const> grad_in)>;

// Gradients of a scalar loss with respect to the leaves of one tape.
class Gradients {
 public:
  // Gradient for `leaf`, same shape and dtype. Leaves the loss does not depend
  // on get zeros.
  Tensor wrt(const Tensor& leaf) const;
  bool reached(const Tensor& leaf) const;

 private:
  friend class Tape;
  const Tape* tape_ = nullptr;
  std::unordered_map<int, std::vector<double>> grads_;
};

// Reverse-mode tape for one evaluation. Entries are appended in execution
// order, so every entry's inputs precede it. A tape is single-threaded and
// must outlive every tensor attached to it.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Attaches a copy of `value` as a new leaf requiring grad.
  Tensor watch(const Tensor& value);

  // Appends an entry if any input requires grad; otherwise returns `output`
  // untouched. Inputs attached to a different tape are rejected.
  static Tensor record(const char* op, Tensor output, std::initializer_list<const Tensor*> inputs,
                       BackwardFn backward);
  static Tensor record(const char* op, Tensor output, const std::vector<const Tensor*>& inputs,
                       BackwardFn backward);

  Gradients backward(const Tensor& loss) const;

  std::size_t size() const { return entries_.size(); }
  const std::string& op_name(std::size_t entry) const { return entries_.at(entry).op; }

 private:
  struct Entry {
    std::string op;
    std::size_t raw_size = 0;
    std::vector<int> inputs;
    BackwardFn backward;
  };

  std::vector<Entry> entries_;

  friend class Gradients;
};

}  // namespace rxprobe::ad
