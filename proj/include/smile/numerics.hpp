#pragma once

// Dense row-major matrices with reverse-mode differentiation.
//
// Every value is a 2-D tensor: vectors are 1 x d rows and scalars are 1 x 1.
// A Tape records primitives in construction order, which is already a
// topological order, so backward() walks the records once in reverse.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace smile {

class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols, double fill = 0.0);
  Tensor(int rows, int cols, std::vector<double> data);

  static Tensor scalar(double v) { return Tensor(1, 1, v); }
  static Tensor row_vector(std::vector<double> v);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  std::vector<int> shape() const { return {rows_, cols_}; }
  bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  double& operator()(int r, int c) { return data_[index(r, c)]; }
  double operator()(int r, int c) const { return data_[index(r, c)]; }
  double& operator[](size_t k) { return data_[k]; }
  double operator[](size_t k) const { return data_[k]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> row(int r) { return {data_.data() + index(r, 0), static_cast<size_t>(cols_)}; }
  std::span<const double> row(int r) const {
    return {data_.data() + index(r, 0), static_cast<size_t>(cols_)};
  }

  double item() const;  // value of a 1 x 1 tensor
  void fill(double v);
  bool all_finite() const;

  bool operator==(const Tensor&) const = default;

 private:
  size_t index(int r, int c) const {
    return static_cast<size_t>(r) * static_cast<size_t>(cols_) + static_cast<size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// A trainable tensor and its gradient accumulator.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v);
  void zero_grad();
};

class Tape;

// Handle to a recorded value.
class Var {
 public:
  Var() = default;

  bool valid() const { return tape_ != nullptr; }
  Tape& tape() const { return *tape_; }
  int id() const { return id_; }
  const Tensor& value() const;
  const Tensor& grad() const;
  int rows() const { return value().rows(); }
  int cols() const { return value().cols(); }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  // Called with the id of the node whose gradient is complete.
  using BackwardFn = std::function<void(Tape&, int)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var variable(Tensor value);
  // Binds a parameter as a leaf; repeated calls return the same Var.
  Var param(const Parameter& p);

  // `root` must be 1 x 1. May be called once per tape.
  void backward(Var root);

  const Tensor& value(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  const Tensor& grad(int id) const { return nodes_[static_cast<size_t>(id)].grad; }
  Tensor& grad_ref(int id) { return nodes_[static_cast<size_t>(id)].grad; }
  bool requires_grad(int id) const { return nodes_[static_cast<size_t>(id)].requires_grad; }
  size_t size() const { return nodes_.size(); }

  // Gradient of a bound parameter after backward(), nullptr if never bound.
  const Tensor* param_grad(const Parameter& p) const;
  // p.grad += scale * dL/dp for every bound parameter in `params`.
  void accumulate_param_grads(std::span<Parameter* const> params, double scale = 1.0) const;

  // Records a primitive result. Throws NonFiniteValue on inf/nan.
  Var push(Tensor value, bool requires_grad, BackwardFn backward);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  std::vector<std::pair<const Parameter*, int>> params_;
  bool backward_done_ = false;
};

// --- primitives ---------------------------------------------------------------
// Shapes must agree exactly (ShapeMismatch otherwise) except where noted.

// b may also be a 1 x cols row added to every row of a.
Var add(Var a, Var b);
Var scalar_mul(Var a, double s);
Var matmul(Var a, Var b);
// a * b^T
Var matmul_transposed(Var a, Var b);
// Column-wise concatenation of equal-height blocks.
Var concat(std::span<const Var> parts);
Var concat(std::initializer_list<Var> parts);
// Rows of `table` picked by id.
Var embedding_lookup(Var table, std::span<const int> ids);
// Row g of the result is the mean of the table rows listed in groups[g].
Var mean_over_list(Var table, const std::vector<std::vector<int>>& groups);
Var relu(Var a);
// Row-wise softmax restricted to entries where mask != 0; the others are 0.
// Every row needs at least one active entry (EmptyMask).
Var softmax_over_masked_set(Var scores, const Tensor& mask);
// Row-wise log-softmax over all columns.
Var log_softmax_rows(Var scores);
Var log(Var a);
// 1 x 1 inner product of two equal-shape tensors.
Var dot(Var a, Var b);
Var sum(Var a);
// 1 x 1 value sum_k w[k] * a[k]; w is a constant.
Var weighted_sum(Var a, const Tensor& w);
// Mean over rows of -log softmax(logits)[r][labels[r]].
Var cross_entropy_with_logits(Var logits, std::span<const int> labels);
// out[r] = a[r - offset], zero rows where r - offset is out of range.
Var shift_rows(Var a, int offset);

// --- verification -------------------------------------------------------------

// max over coordinates of |analytic - central difference| / max(1, |analytic|)
double grad_check(const std::function<Var(Tape&, Var)>& f, const Tensor& x, double eps = 1e-5);
double grad_check(const std::function<Var(Tape&)>& f, std::span<Parameter* const> params,
                  double eps = 1e-5);

// --- optimisation -------------------------------------------------------------

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  long step = 0;
};

// Bias-corrected Adam update from each parameter's `grad`.
void adam_step(std::span<Parameter* const> params, AdamState& state, const AdamConfig& cfg);

// --- randomness -----------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // [0, n)
  std::size_t below(std::size_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

Tensor uniform_tensor(int rows, int cols, double bound, Rng& rng);

}  // namespace smile
