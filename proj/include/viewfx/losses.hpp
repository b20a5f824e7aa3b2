#pragma once

#include <vector>

#include "viewfx/common.hpp"

namespace viewfx {

/// What to do with an anchor whose positive set is empty (a group reduced to
/// one row by sampling). Strict raises; Skip drops the anchor and rescales the
/// sum by the surviving anchor count.
enum class AnchorPolicy { kStrict, kSkip };

/// Where the redundancy-reduction term is attached. kFinal exists for the
/// ablation harness only; the shipped configuration is kIntermediate.
enum class BtPlacement { kOff, kIntermediate, kFinal };

struct LossConfig {
  double tau = 0.1;     // temperature on similarity logits
  double alpha = 0.005; // off-diagonal weight inside the redundancy loss
  double gamma = 0.5;   // weight of the view-invariant term in the total
  double beta = 0.9;    // weight of the redundancy terms in the total
  bool normalize_embeddings = true;
  bool logit_stabilization = true;
  bool center_cross_correlation = false;
  AnchorPolicy anchor_policy = AnchorPolicy::kStrict;

  void validate() const;
};

/// Which loss terms participate in the total. Weights stay fixed at
/// (1, gamma, beta); ablation drops terms rather than re-weighting.
struct LossMode {
  bool use_sup = true;
  bool use_view = true;
  BtPlacement bt = BtPlacement::kIntermediate;
};

/// A batch of 2N projection embeddings: two augmentations per image, with the
/// sibling map kappa and per-row class / capture / view annotations.
struct ContrastBatch {
  Matrix embeddings;              // 2N x d
  std::vector<int> pair_index;    // kappa: row index of the sibling augmentation
  std::vector<int> labels;        // class id per row; negative = unlabeled
  std::vector<int> instance_ids;  // capture id, constant across views and augmentations
  std::vector<int> view_ids;      // view id per row

  int rows() const { return static_cast<int>(embeddings.rows()); }
  int dim() const { return static_cast<int>(embeddings.cols()); }

  /// Checks the structural invariants: kappa is a fixed-point-free involution,
  /// siblings agree on all annotations, and every capture group has >= 2 rows.
  void validate() const;
};

/// Pairwise similarity logits (z_i . z_k) / tau, optionally on L2-normalized
/// rows. The diagonal is set to -infinity: marked excluded, so it can never
/// enter a softmax denominator.
Matrix similarity_logits(const Matrix& z, double tau, bool normalize);

struct ContrastiveLoss {
  double value = 0.0;
  Matrix grad;              // d(value)/d(embeddings), same shape as the input
  int skipped_anchors = 0;  // only under AnchorPolicy::kSkip
};

/// Instance-discrimination loss: the only positive of row i is its sibling
/// kappa(i). Requires N >= 2 (each anchor needs at least one negative).
ContrastiveLoss self_contrastive_loss(const ContrastBatch& batch, const LossConfig& cfg);

/// Shared kernel for the group-positive losses: every row j != i with
/// group_ids[j] == group_ids[i] is a positive of anchor i, each log-ratio
/// weighted by 1/P_i with P_i the positive count. Rows with a negative group
/// id are anchors without positives and are never positives of others.
ContrastiveLoss group_contrastive_loss(const ContrastBatch& batch,
                                       const std::vector<int>& group_ids,
                                       const LossConfig& cfg);

/// Group loss with groups = capture ids: pulls all views (and augmentations)
/// of one capture together.
ContrastiveLoss view_loss(const ContrastBatch& batch, const LossConfig& cfg);

/// Group loss with groups = class labels: pulls all images of one expression
/// class together.
ContrastiveLoss sup_loss(const ContrastBatch& batch, const LossConfig& cfg);

struct CrossCorrMatrix {
  Matrix c;           // d x d, every entry in [-1, 1]
  int batch_size = 0; // rows of the branch matrices
};

/// Cross-correlation between two branch embeddings along the batch dimension:
/// C_ij = sum_b a_bi b_bj / (|a_:i| |b_:j|). Mean-centering is off by default
/// (the normalization is applied to the raw columns); `center` subtracts the
/// per-column mean first.
CrossCorrMatrix cross_correlation(const Matrix& wa, const Matrix& wb, bool center = false);

struct BarlowTwinsLoss {
  double value = 0.0;
  Matrix grad_a;
  Matrix grad_b;
};

/// Invariance + redundancy-reduction loss on the cross-correlation matrix:
/// sum_i (1 - C_ii)^2 + alpha * sum_{i != j} C_ij^2. Zero iff C is exactly
/// the identity.
BarlowTwinsLoss barlow_twins_loss(const Matrix& wa, const Matrix& wb, double alpha,
                                  bool center = false);

struct TotalLoss {
  double total = 0.0;
  // Unweighted component values, for logging and ablation tables.
  double sup = 0.0;
  double view = 0.0;
  double bt1 = 0.0;
  double bt2 = 0.0;
  Matrix grad_z1, grad_z2;
  Matrix grad_w1a, grad_w2a;
  Matrix grad_w1b, grad_w2b;
  int skipped_anchors = 0;
};

/// The combined objective: sup + gamma * view + beta * (bt1 + bt2), assembled
/// from row-aligned branch outputs (row b of z1 and z2 are the two
/// augmentations of image b). Inactive terms under `mode` contribute exactly
/// zero and are not computed. Under BtPlacement::kFinal the redundancy loss is
/// taken on (z1, z2) instead of the intermediate pairs.
TotalLoss total_loss(const Matrix& z1, const Matrix& z2,
                     const Matrix& w1a, const Matrix& w2a,
                     const Matrix& w1b, const Matrix& w2b,
                     const std::vector<int>& labels,
                     const std::vector<int>& phi_ids,
                     const LossConfig& cfg,
                     const LossMode& mode = LossMode{});

/// Interleaves two row-aligned branch matrices into a ContrastBatch
/// (row 2b = z1[b], row 2b+1 = z2[b]) with sibling kappa and duplicated
/// annotations.
ContrastBatch make_contrast_batch(const Matrix& z1, const Matrix& z2,
                                  const std::vector<int>& labels,
                                  const std::vector<int>& phi_ids,
                                  const std::vector<int>& view_ids = {});

}  // namespace viewfx
