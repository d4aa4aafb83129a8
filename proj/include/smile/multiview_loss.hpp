#pragma once

// Multi-view relationship losses over the const and dep node
// representations, and the combined training objective.
//
// P(target | anchor) is a softmax of anchor . candidate over a candidate set
// of node vectors. R1 pulls connected nodes of one view together, R2 pulls a
// node's two views together, and R3 pulls node j of view z towards node i of
// the other view wherever i and j are connected in view z.

#include <span>

#include "smile/numerics.hpp"

namespace smile {

struct LossWeights {
  double alpha = 0.024;
  double beta = 0.012;
  double gamma = 0.012;
};

// exp(anchor . candidates[target]) / sum_k exp(anchor . candidates[k]).
// Throws EmptyCandidates.
double pairwise_softmax_prob(const Tensor& candidates, int target, std::span<const double> anchor);

// Adjacency with the diagonal cleared when exclude_self_loops is set.
Tensor pair_weights(const Tensor& adjacency, bool exclude_self_loops);

// -sum_z sum_ij e^z_ij log P(h^z_j | anchor h^z_i, candidates h^z)
Var loss_r1(Var h_con, Var h_dep, const Tensor& adj_con, const Tensor& adj_dep,
            bool exclude_self_loops);
// -sum_z sum_i log P(h^z'_i | anchor h^z_i, candidates h^z')
Var loss_r2(Var h_con, Var h_dep);
// -sum_z sum_ij e^z_ij log P(h^z'_i | anchor h^z_j, candidates h^z')
Var loss_r3(Var h_con, Var h_dep, const Tensor& adj_con, const Tensor& adj_dep,
            bool exclude_self_loops);

// Mean token cross-entropy.
Var tagging_loss(Var logits, std::span<const int> gold);

// L_CE + alpha L_R1 + beta L_R2 + gamma L_R3; invalid Vars count as absent.
// A zero weight drops its term from the graph, so all-zero weights return
// l_ce itself.
Var combined_loss(Var l_ce, Var l_r1, Var l_r2, Var l_r3, const LossWeights& w);

}  // namespace smile
