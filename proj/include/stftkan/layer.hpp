#pragma once

#include "stftkan/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace stftkan {

template <typename S>
struct ParamRef {
  Matrix<S>* value;
  Matrix<S>* grad;
  std::string name;
};

// A layer owns its parameters and their gradient accumulators. forward()
// caches whatever backward() needs; backward() adds parameter gradients
// into the accumulators and returns the gradient w.r.t. its input.
template <typename S>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual Matrix<S> forward(const Matrix<S>& x) = 0;
  virtual Matrix<S> backward(const Matrix<S>& grad_out) = 0;

  virtual void collect_params(std::vector<ParamRef<S>>& out) = 0;
  virtual std::int64_t param_count() const = 0;

  virtual int input_dim() const = 0;
  virtual int output_dim() const = 0;

  // layer tag + config for checkpoints
  virtual std::uint8_t tag() const = 0;
  virtual void write_config(std::ostream& os) const = 0;
  virtual void write_params(std::ostream& os) const = 0;
  virtual void read_params(std::istream& is) = 0;

  void set_name(std::string n) { name_ = std::move(n); }
  const std::string& name() const { return name_; }

  void zero_grads() {
    std::vector<ParamRef<S>> refs;
    collect_params(refs);
    for (auto& r : refs) r.grad->setZero();
  }

 protected:
  std::string name_ = "layer";
};

template <typename S>
using LayerPtr = std::unique_ptr<Layer<S>>;

}  // namespace stftkan
