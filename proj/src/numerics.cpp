#include "smile/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "smile/error.hpp"

namespace smile {

namespace {

std::string shape_str(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

[[noreturn]] void shape_error(const std::string& op, const Tensor& a, const Tensor& b) {
  throw Error(ErrorKind::kShapeMismatch, op + ": " + shape_str(a) + " vs " + shape_str(b));
}

void check_same_tape(Var a, Var b) {
  if (!a.valid() || !b.valid() || &a.tape() != &b.tape())
    throw std::invalid_argument("operands are recorded on different tapes");
}

// g += a * b  (a: n x k, b: k x m)
void gemm_nn(const Tensor& a, const Tensor& b, Tensor& g) {
  const int n = a.rows(), k = a.cols(), m = b.cols();
  for (int i = 0; i < n; ++i) {
    double* gi = g.row(i).data();
    const double* ai = a.row(i).data();
    for (int p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      const double* bp = b.row(p).data();
      for (int j = 0; j < m; ++j) gi[j] += av * bp[j];
    }
  }
}

// g += a * b^T  (a: n x k, b: m x k)
void gemm_nt(const Tensor& a, const Tensor& b, Tensor& g) {
  const int n = a.rows(), k = a.cols(), m = b.rows();
  for (int i = 0; i < n; ++i) {
    const double* ai = a.row(i).data();
    double* gi = g.row(i).data();
    for (int j = 0; j < m; ++j) {
      const double* bj = b.row(j).data();
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += ai[p] * bj[p];
      gi[j] += s;
    }
  }
}

// g += a^T * b  (a: n x k, b: n x m)
void gemm_tn(const Tensor& a, const Tensor& b, Tensor& g) {
  const int n = a.rows(), k = a.cols(), m = b.cols();
  for (int r = 0; r < n; ++r) {
    const double* ar = a.row(r).data();
    const double* br = b.row(r).data();
    for (int p = 0; p < k; ++p) {
      const double av = ar[p];
      if (av == 0.0) continue;
      double* gp = g.row(p).data();
      for (int j = 0; j < m; ++j) gp[j] += av * br[j];
    }
  }
}

bool any_requires_grad(Tape& t, std::initializer_list<int> ids) {
  for (int id : ids)
    if (t.requires_grad(id)) return true;
  return false;
}

}  // namespace

// --- Tensor -------------------------------------------------------------------

Tensor::Tensor(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * static_cast<size_t>(cols), fill) {
  if (rows < 0 || cols < 0) throw Error(ErrorKind::kShapeMismatch, "negative dimension");
}

Tensor::Tensor(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows < 0 || cols < 0 ||
      data_.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols))
    throw Error(ErrorKind::kShapeMismatch,
                std::to_string(data_.size()) + " values for shape " + std::to_string(rows) + "x" +
                    std::to_string(cols));
}

Tensor Tensor::row_vector(std::vector<double> v) {
  const int n = static_cast<int>(v.size());
  return Tensor(1, n, std::move(v));
}

double Tensor::item() const {
  if (rows_ != 1 || cols_ != 1)
    throw Error(ErrorKind::kShapeMismatch, "item() on " + shape_str(*this));
  return data_[0];
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Parameter::Parameter(std::string n, Tensor v)
    : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}

void Parameter::zero_grad() {
  if (!grad.same_shape(value)) grad = Tensor(value.rows(), value.cols());
  grad.fill(0.0);
}

// --- Var / Tape ---------------------------------------------------------------

const Tensor& Var::value() const { return tape_->value(id_); }
const Tensor& Var::grad() const { return tape_->grad(id_); }

Var Tape::push(Tensor value, bool requires_grad, BackwardFn backward) {
  if (!value.all_finite())
    throw Error(ErrorKind::kNonFiniteValue,
                "non-finite value in node " + std::to_string(nodes_.size()));
  nodes_.push_back(Node{std::move(value), Tensor(), requires_grad,
                        requires_grad ? std::move(backward) : BackwardFn()});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::constant(Tensor value) { return push(std::move(value), false, nullptr); }

Var Tape::variable(Tensor value) { return push(std::move(value), true, nullptr); }

Var Tape::param(const Parameter& p) {
  for (const auto& [bound, id] : params_)
    if (bound == &p) return Var(this, id);
  Var v = variable(p.value);
  params_.emplace_back(&p, v.id());
  return v;
}

void Tape::backward(Var root) {
  if (&root.tape() != this) throw std::invalid_argument("root recorded on another tape");
  if (backward_done_) throw std::logic_error("backward() already ran on this tape");
  const Tensor& rv = value(root.id());
  if (rv.rows() != 1 || rv.cols() != 1)
    throw Error(ErrorKind::kShapeMismatch, "backward root must be 1x1, got " + shape_str(rv));
  backward_done_ = true;
  for (Node& n : nodes_) {
    if (n.requires_grad) n.grad = Tensor(n.value.rows(), n.value.cols());
  }
  if (!nodes_[static_cast<size_t>(root.id())].requires_grad) return;
  nodes_[static_cast<size_t>(root.id())].grad(0, 0) = 1.0;
  for (int id = root.id(); id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.requires_grad && n.backward) n.backward(*this, id);
  }
}

const Tensor* Tape::param_grad(const Parameter& p) const {
  for (const auto& [bound, id] : params_) {
    if (bound == &p) {
      const Tensor& g = grad(id);
      return g.size() == 0 && p.value.size() != 0 ? nullptr : &g;
    }
  }
  return nullptr;
}

void Tape::accumulate_param_grads(std::span<Parameter* const> params, double scale) const {
  for (Parameter* p : params) {
    const Tensor* g = param_grad(*p);
    if (!g) continue;
    if (!p->grad.same_shape(p->value)) p->zero_grad();
    for (size_t k = 0; k < g->size(); ++k) p->grad[k] += scale * (*g)[k];
  }
}

// --- primitives ---------------------------------------------------------------

Var add(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = a.tape();
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const bool broadcast = !av.same_shape(bv);
  if (broadcast && !(bv.rows() == 1 && bv.cols() == av.cols())) shape_error("add", av, bv);
  Tensor out = av;
  for (int r = 0; r < av.rows(); ++r) {
    auto orow = out.row(r);
    auto brow = bv.row(broadcast ? 0 : r);
    for (int c = 0; c < av.cols(); ++c) orow[static_cast<size_t>(c)] += brow[static_cast<size_t>(c)];
  }
  const int ia = a.id(), ib = b.id();
  return t.push(std::move(out), any_requires_grad(t, {ia, ib}), [ia, ib, broadcast](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    if (t.requires_grad(ia)) {
      Tensor& ga = t.grad_ref(ia);
      for (size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
    }
    if (t.requires_grad(ib)) {
      Tensor& gb = t.grad_ref(ib);
      if (!broadcast) {
        for (size_t k = 0; k < g.size(); ++k) gb[k] += g[k];
      } else {
        for (int r = 0; r < g.rows(); ++r)
          for (int c = 0; c < g.cols(); ++c) gb(0, c) += g(r, c);
      }
    }
  });
}

Var scalar_mul(Var a, double s) {
  Tape& t = a.tape();
  Tensor out = a.value();
  for (double& x : out.data()) x *= s;
  const int ia = a.id();
  return t.push(std::move(out), t.requires_grad(ia), [ia, s](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad_ref(ia);
    for (size_t k = 0; k < g.size(); ++k) ga[k] += s * g[k];
  });
}

Var matmul(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = a.tape();
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.rows()) shape_error("matmul", av, bv);
  Tensor out(av.rows(), bv.cols());
  gemm_nn(av, bv, out);
  const int ia = a.id(), ib = b.id();
  return t.push(std::move(out), any_requires_grad(t, {ia, ib}), [ia, ib](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    if (t.requires_grad(ia)) gemm_nt(g, t.value(ib), t.grad_ref(ia));
    if (t.requires_grad(ib)) gemm_tn(t.value(ia), g, t.grad_ref(ib));
  });
}

Var matmul_transposed(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = a.tape();
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.cols()) shape_error("matmul_transposed", av, bv);
  Tensor out(av.rows(), bv.rows());
  gemm_nt(av, bv, out);
  const int ia = a.id(), ib = b.id();
  return t.push(std::move(out), any_requires_grad(t, {ia, ib}), [ia, ib](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    if (t.requires_grad(ia)) gemm_nn(g, t.value(ib), t.grad_ref(ia));
    if (t.requires_grad(ib)) gemm_tn(g, t.value(ia), t.grad_ref(ib));
  });
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw Error(ErrorKind::kShapeMismatch, "concat of nothing");
  Tape& t = parts[0].tape();
  const int rows = parts[0].rows();
  int cols = 0;
  std::vector<int> ids;
  std::vector<int> offsets;
  bool rg = false;
  for (const Var& p : parts) {
    check_same_tape(parts[0], p);
    if (p.rows() != rows) shape_error("concat", parts[0].value(), p.value());
    offsets.push_back(cols);
    cols += p.cols();
    ids.push_back(p.id());
    rg = rg || t.requires_grad(p.id());
  }
  Tensor out(rows, cols);
  for (size_t k = 0; k < parts.size(); ++k) {
    const Tensor& pv = parts[k].value();
    for (int r = 0; r < rows; ++r)
      std::copy(pv.row(r).begin(), pv.row(r).end(), out.row(r).begin() + offsets[k]);
  }
  return t.push(std::move(out), rg, [ids, offsets](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    for (size_t k = 0; k < ids.size(); ++k) {
      if (!t.requires_grad(ids[k])) continue;
      Tensor& gp = t.grad_ref(ids[k]);
      for (int r = 0; r < gp.rows(); ++r)
        for (int c = 0; c < gp.cols(); ++c) gp(r, c) += g(r, offsets[k] + c);
    }
  });
}

Var concat(std::initializer_list<Var> parts) {
  return concat(std::span<const Var>(parts.begin(), parts.size()));
}

Var embedding_lookup(Var table, std::span<const int> ids) {
  Tape& t = table.tape();
  const Tensor& tv = table.value();
  Tensor out(static_cast<int>(ids.size()), tv.cols());
  for (size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] < 0 || ids[r] >= tv.rows())
      throw Error(ErrorKind::kShapeMismatch,
                  "row id " + std::to_string(ids[r]) + " outside table of " + std::to_string(tv.rows()));
    std::copy(tv.row(ids[r]).begin(), tv.row(ids[r]).end(), out.row(static_cast<int>(r)).begin());
  }
  const int it = table.id();
  std::vector<int> idv(ids.begin(), ids.end());
  return t.push(std::move(out), t.requires_grad(it), [it, idv](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    Tensor& gt = t.grad_ref(it);
    for (size_t r = 0; r < idv.size(); ++r)
      for (int c = 0; c < g.cols(); ++c) gt(idv[r], c) += g(static_cast<int>(r), c);
  });
}

Var mean_over_list(Var table, const std::vector<std::vector<int>>& groups) {
  Tape& t = table.tape();
  const Tensor& tv = table.value();
  Tensor out(static_cast<int>(groups.size()), tv.cols());
  for (size_t r = 0; r < groups.size(); ++r) {
    if (groups[r].empty())
      throw Error(ErrorKind::kShapeMismatch, "mean over empty list at row " + std::to_string(r));
    const double inv = 1.0 / static_cast<double>(groups[r].size());
    auto orow = out.row(static_cast<int>(r));
    for (int id : groups[r]) {
      if (id < 0 || id >= tv.rows())
        throw Error(ErrorKind::kShapeMismatch, "row id " + std::to_string(id) + " outside table");
      auto trow = tv.row(id);
      for (size_t c = 0; c < orow.size(); ++c) orow[c] += trow[c];
    }
    for (double& x : orow) x *= inv;
  }
  const int it = table.id();
  return t.push(std::move(out), t.requires_grad(it), [it, groups](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    Tensor& gt = t.grad_ref(it);
    for (size_t r = 0; r < groups.size(); ++r) {
      const double inv = 1.0 / static_cast<double>(groups[r].size());
      for (int id : groups[r])
        for (int c = 0; c < g.cols(); ++c) gt(id, c) += inv * g(static_cast<int>(r), c);
    }
  });
}

Var relu(Var a) {
  Tape& t = a.tape();
  Tensor out = a.value();
  for (double& x : out.data()) x = x > 0.0 ? x : 0.0;
  const int ia = a.id();
  return t.push(std::move(out), t.requires_grad(ia), [ia](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    const Tensor& x = t.value(ia);
    Tensor& ga = t.grad_ref(ia);
    for (size_t k = 0; k < g.size(); ++k)
      if (x[k] > 0.0) ga[k] += g[k];
  });
}

Var softmax_over_masked_set(Var scores, const Tensor& mask) {
  Tape& t = scores.tape();
  const Tensor& sv = scores.value();
  if (!sv.same_shape(mask)) shape_error("softmax_over_masked_set", sv, mask);
  Tensor out(sv.rows(), sv.cols());
  for (int r = 0; r < sv.rows(); ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < sv.cols(); ++c)
      if (mask(r, c) != 0.0) mx = std::max(mx, sv(r, c));
    if (mx == -std::numeric_limits<double>::infinity())
      throw Error(ErrorKind::kEmptyMask, "row " + std::to_string(r) + " has no active entry");
    double z = 0.0;
    for (int c = 0; c < sv.cols(); ++c) {
      if (mask(r, c) == 0.0) continue;
      out(r, c) = std::exp(sv(r, c) - mx);
      z += out(r, c);
    }
    for (int c = 0; c < sv.cols(); ++c) out(r, c) /= z;
  }
  const int is = scores.id();
  return t.push(std::move(out), t.requires_grad(is), [is](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor& gs = t.grad_ref(is);
    for (int r = 0; r < y.rows(); ++r) {
      double inner = 0.0;
      for (int c = 0; c < y.cols(); ++c) inner += y(r, c) * g(r, c);
      // masked entries have y = 0 and receive nothing
      for (int c = 0; c < y.cols(); ++c) gs(r, c) += y(r, c) * (g(r, c) - inner);
    }
  });
}

Var log_softmax_rows(Var scores) {
  Tape& t = scores.tape();
  const Tensor& sv = scores.value();
  if (sv.cols() == 0) throw Error(ErrorKind::kEmptyMask, "log-softmax over zero columns");
  Tensor out(sv.rows(), sv.cols());
  for (int r = 0; r < sv.rows(); ++r) {
    auto row = sv.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double x : row) z += std::exp(x - mx);
    const double lse = mx + std::log(z);
    for (int c = 0; c < sv.cols(); ++c) out(r, c) = sv(r, c) - lse;
  }
  const int is = scores.id();
  return t.push(std::move(out), t.requires_grad(is), [is](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor& gs = t.grad_ref(is);
    for (int r = 0; r < y.rows(); ++r) {
      double gsum = 0.0;
      for (int c = 0; c < y.cols(); ++c) gsum += g(r, c);
      for (int c = 0; c < y.cols(); ++c) gs(r, c) += g(r, c) - std::exp(y(r, c)) * gsum;
    }
  });
}

Var log(Var a) {
  Tape& t = a.tape();
  Tensor out = a.value();
  for (double& x : out.data()) {
    if (!(x > 0.0)) throw Error(ErrorKind::kNonFiniteValue, "log of non-positive value");
    x = std::log(x);
  }
  const int ia = a.id();
  return t.push(std::move(out), t.requires_grad(ia), [ia](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    const Tensor& x = t.value(ia);
    Tensor& ga = t.grad_ref(ia);
    for (size_t k = 0; k < g.size(); ++k) ga[k] += g[k] / x[k];
  });
}

Var dot(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = a.tape();
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (!av.same_shape(bv)) shape_error("dot", av, bv);
  double s = 0.0;
  for (size_t k = 0; k < av.size(); ++k) s += av[k] * bv[k];
  const int ia = a.id(), ib = b.id();
  return t.push(Tensor::scalar(s), any_requires_grad(t, {ia, ib}), [ia, ib](Tape& t, int self) {
    const double g = t.grad(self)(0, 0);
    if (t.requires_grad(ia)) {
      Tensor& ga = t.grad_ref(ia);
      const Tensor& bv = t.value(ib);
      for (size_t k = 0; k < ga.size(); ++k) ga[k] += g * bv[k];
    }
    if (t.requires_grad(ib)) {
      Tensor& gb = t.grad_ref(ib);
      const Tensor& av = t.value(ia);
      for (size_t k = 0; k < gb.size(); ++k) gb[k] += g * av[k];
    }
  });
}

Var sum(Var a) {
  Tape& t = a.tape();
  double s = 0.0;
  for (double x : a.value().data()) s += x;
  const int ia = a.id();
  return t.push(Tensor::scalar(s), t.requires_grad(ia), [ia](Tape& t, int self) {
    const double g = t.grad(self)(0, 0);
    for (double& x : t.grad_ref(ia).data()) x += g;
  });
}

Var weighted_sum(Var a, const Tensor& w) {
  Tape& t = a.tape();
  const Tensor& av = a.value();
  if (!av.same_shape(w)) shape_error("weighted_sum", av, w);
  double s = 0.0;
  for (size_t k = 0; k < av.size(); ++k)
    if (w[k] != 0.0) s += w[k] * av[k];
  const int ia = a.id();
  return t.push(Tensor::scalar(s), t.requires_grad(ia), [ia, w](Tape& t, int self) {
    const double g = t.grad(self)(0, 0);
    Tensor& ga = t.grad_ref(ia);
    for (size_t k = 0; k < ga.size(); ++k) ga[k] += g * w[k];
  });
}

Var cross_entropy_with_logits(Var logits, std::span<const int> labels) {
  Tape& t = logits.tape();
  const Tensor& lv = logits.value();
  if (static_cast<int>(labels.size()) != lv.rows() || lv.rows() == 0)
    throw Error(ErrorKind::kShapeMismatch, std::to_string(labels.size()) + " labels for " +
                                               std::to_string(lv.rows()) + " rows");
  Tensor probs(lv.rows(), lv.cols());
  double loss = 0.0;
  for (int r = 0; r < lv.rows(); ++r) {
    const int y = labels[static_cast<size_t>(r)];
    if (y < 0 || y >= lv.cols())
      throw Error(ErrorKind::kShapeMismatch, "label " + std::to_string(y) + " out of range");
    auto row = lv.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (int c = 0; c < lv.cols(); ++c) {
      probs(r, c) = std::exp(lv(r, c) - mx);
      z += probs(r, c);
    }
    for (int c = 0; c < lv.cols(); ++c) probs(r, c) /= z;
    loss += (mx + std::log(z)) - lv(r, y);
  }
  const double n = static_cast<double>(lv.rows());
  loss /= n;
  const int il = logits.id();
  std::vector<int> ys(labels.begin(), labels.end());
  return t.push(Tensor::scalar(loss), t.requires_grad(il),
                [il, ys, probs = std::move(probs), n](Tape& t, int self) {
                  const double g = t.grad(self)(0, 0);
                  Tensor& gl = t.grad_ref(il);
                  for (int r = 0; r < probs.rows(); ++r) {
                    for (int c = 0; c < probs.cols(); ++c) {
                      const double target = c == ys[static_cast<size_t>(r)] ? 1.0 : 0.0;
                      gl(r, c) += g * (probs(r, c) - target) / n;
                    }
                  }
                });
}

Var shift_rows(Var a, int offset) {
  Tape& t = a.tape();
  const Tensor& av = a.value();
  Tensor out(av.rows(), av.cols());
  for (int r = 0; r < av.rows(); ++r) {
    const int src = r - offset;
    if (src < 0 || src >= av.rows()) continue;
    std::copy(av.row(src).begin(), av.row(src).end(), out.row(r).begin());
  }
  const int ia = a.id();
  return t.push(std::move(out), t.requires_grad(ia), [ia, offset](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad_ref(ia);
    for (int r = 0; r < g.rows(); ++r) {
      const int src = r - offset;
      if (src < 0 || src >= g.rows()) continue;
      for (int c = 0; c < g.cols(); ++c) ga(src, c) += g(r, c);
    }
  });
}

// --- verification -------------------------------------------------------------

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1e-2)) throw std::invalid_argument("grad_check eps must be in (0, 1e-2]");
}

double scalar_of(Var v) {
  const double x = v.value().item();
  if (!std::isfinite(x)) throw Error(ErrorKind::kNonFiniteValue, "objective is not finite");
  return x;
}

double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic));
}

}  // namespace

double grad_check(const std::function<Var(Tape&, Var)>& f, const Tensor& x, double eps) {
  check_eps(eps);
  Tensor analytic;
  {
    Tape tape;
    Var xv = tape.variable(x);
    Var y = f(tape, xv);
    scalar_of(y);
    tape.backward(y);
    analytic = tape.grad(xv.id());
  }
  double worst = 0.0;
  Tensor probe = x;
  for (size_t k = 0; k < x.size(); ++k) {
    const double orig = probe[k];
    probe[k] = orig + eps;
    double up, down;
    {
      Tape tape;
      up = scalar_of(f(tape, tape.constant(probe)));
    }
    probe[k] = orig - eps;
    {
      Tape tape;
      down = scalar_of(f(tape, tape.constant(probe)));
    }
    probe[k] = orig;
    worst = std::max(worst, rel_error(analytic[k], (up - down) / (2.0 * eps)));
  }
  return worst;
}

double grad_check(const std::function<Var(Tape&)>& f, std::span<Parameter* const> params,
                  double eps) {
  check_eps(eps);
  std::vector<Tensor> analytic;
  {
    Tape tape;
    Var y = f(tape);
    scalar_of(y);
    tape.backward(y);
    for (Parameter* p : params) {
      const Tensor* g = tape.param_grad(*p);
      analytic.push_back(g ? *g : Tensor(p->value.rows(), p->value.cols()));
    }
  }
  double worst = 0.0;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& v = params[pi]->value;
    for (size_t k = 0; k < v.size(); ++k) {
      const double orig = v[k];
      v[k] = orig + eps;
      double up, down;
      {
        Tape tape;
        up = scalar_of(f(tape));
      }
      v[k] = orig - eps;
      {
        Tape tape;
        down = scalar_of(f(tape));
      }
      v[k] = orig;
      worst = std::max(worst, rel_error(analytic[pi][k], (up - down) / (2.0 * eps)));
    }
  }
  return worst;
}

// --- optimisation -------------------------------------------------------------

void adam_step(std::span<Parameter* const> params, AdamState& state, const AdamConfig& cfg) {
  if (state.m.empty()) {
    for (Parameter* p : params) {
      state.m.emplace_back(p->value.rows(), p->value.cols());
      state.v.emplace_back(p->value.rows(), p->value.cols());
    }
  }
  if (state.m.size() != params.size())
    throw Error(ErrorKind::kShapeMismatch, "optimizer state tracks a different parameter list");
  for (size_t i = 0; i < params.size(); ++i) {
    const Parameter& p = *params[i];
    if (!p.grad.same_shape(p.value) || !state.m[i].same_shape(p.value))
      throw Error(ErrorKind::kShapeMismatch, "parameter " + p.name + " changed shape");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    for (size_t k = 0; k < p.value.size(); ++k) {
      const double g = p.grad[k];
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g;
      v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g * g;
      const double mhat = m[k] / c1;
      const double vhat = v[k] / c2;
      p.value[k] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

// --- randomness -----------------------------------------------------------------

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below(0)");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

Tensor uniform_tensor(int rows, int cols, double bound, Rng& rng) {
  Tensor t(rows, cols);
  for (double& x : t.data()) x = rng.uniform(-bound, bound);
  return t;
}

}  // namespace smile
