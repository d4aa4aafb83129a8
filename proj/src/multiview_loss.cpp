#include "smile/multiview_loss.hpp"

#include <algorithm>
#include <cmath>

#include "smile/error.hpp"

namespace smile {

namespace {

void check_views(Var h_con, Var h_dep) {
  if (h_con.rows() != h_dep.rows() || h_con.cols() != h_dep.cols())
    throw Error(ErrorKind::kShapeMismatch, "const and dep views differ in shape");
  if (h_con.rows() == 0) throw Error(ErrorKind::kEmptyCandidates, "no nodes");
}

void check_adjacency(const Tensor& adj, int n) {
  if (adj.rows() != n || adj.cols() != n)
    throw Error(ErrorKind::kShapeMismatch, "adjacency does not match node count");
}

Tensor transpose(const Tensor& a) {
  Tensor t(a.cols(), a.rows());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
  return t;
}

Tensor identity(int n) {
  Tensor t(n, n);
  for (int i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

}  // namespace

double pairwise_softmax_prob(const Tensor& candidates, int target, std::span<const double> anchor) {
  if (candidates.rows() == 0) throw Error(ErrorKind::kEmptyCandidates, "no candidates");
  if (target < 0 || target >= candidates.rows())
    throw Error(ErrorKind::kShapeMismatch, "target outside candidate set");
  if (static_cast<int>(anchor.size()) != candidates.cols())
    throw Error(ErrorKind::kShapeMismatch, "anchor width differs from candidates");
  std::vector<double> logits(static_cast<size_t>(candidates.rows()));
  for (int k = 0; k < candidates.rows(); ++k) {
    double s = 0.0;
    for (int c = 0; c < candidates.cols(); ++c) s += anchor[static_cast<size_t>(c)] * candidates(k, c);
    logits[static_cast<size_t>(k)] = s;
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double x : logits) z += std::exp(x - mx);
  return std::exp(logits[static_cast<size_t>(target)] - mx) / z;
}

Tensor pair_weights(const Tensor& adjacency, bool exclude_self_loops) {
  Tensor w = adjacency;
  if (exclude_self_loops)
    for (int i = 0; i < std::min(w.rows(), w.cols()); ++i) w(i, i) = 0.0;
  return w;
}

Var loss_r1(Var h_con, Var h_dep, const Tensor& adj_con, const Tensor& adj_dep,
            bool exclude_self_loops) {
  check_views(h_con, h_dep);
  check_adjacency(adj_con, h_con.rows());
  check_adjacency(adj_dep, h_dep.rows());
  // Row i of log_softmax(H H^T) holds log P(h_j | anchor h_i) over j.
  Var con = weighted_sum(log_softmax_rows(matmul_transposed(h_con, h_con)),
                         pair_weights(adj_con, exclude_self_loops));
  Var dep = weighted_sum(log_softmax_rows(matmul_transposed(h_dep, h_dep)),
                         pair_weights(adj_dep, exclude_self_loops));
  return scalar_mul(add(con, dep), -1.0);
}

Var loss_r2(Var h_con, Var h_dep) {
  check_views(h_con, h_dep);
  const Tensor diag = identity(h_con.rows());
  // anchors from one view, candidates from the other
  Var con_to_dep = weighted_sum(log_softmax_rows(matmul_transposed(h_con, h_dep)), diag);
  Var dep_to_con = weighted_sum(log_softmax_rows(matmul_transposed(h_dep, h_con)), diag);
  return scalar_mul(add(con_to_dep, dep_to_con), -1.0);
}

Var loss_r3(Var h_con, Var h_dep, const Tensor& adj_con, const Tensor& adj_dep,
            bool exclude_self_loops) {
  check_views(h_con, h_dep);
  check_adjacency(adj_con, h_con.rows());
  check_adjacency(adj_dep, h_dep.rows());
  // Row j of log_softmax(H^z H^z'^T) is log P(. | anchor h^z_j) over view z';
  // the (j, i) entry is weighted by e^z_ij.
  Var con = weighted_sum(log_softmax_rows(matmul_transposed(h_con, h_dep)),
                         transpose(pair_weights(adj_con, exclude_self_loops)));
  Var dep = weighted_sum(log_softmax_rows(matmul_transposed(h_dep, h_con)),
                         transpose(pair_weights(adj_dep, exclude_self_loops)));
  return scalar_mul(add(con, dep), -1.0);
}

Var tagging_loss(Var logits, std::span<const int> gold) {
  return cross_entropy_with_logits(logits, gold);
}

Var combined_loss(Var l_ce, Var l_r1, Var l_r2, Var l_r3, const LossWeights& w) {
  if (!(w.alpha >= 0.0 && w.beta >= 0.0 && w.gamma >= 0.0) || !std::isfinite(w.alpha) ||
      !std::isfinite(w.beta) || !std::isfinite(w.gamma))
    throw std::invalid_argument("loss weights must be finite and non-negative");
  Var total = l_ce;
  const std::pair<Var, double> terms[] = {{l_r1, w.alpha}, {l_r2, w.beta}, {l_r3, w.gamma}};
  for (const auto& [term, weight] : terms) {
    if (!term.valid() || weight == 0.0) continue;
    total = add(total, scalar_mul(term, weight));
  }
  return total;
}

}  // namespace smile
