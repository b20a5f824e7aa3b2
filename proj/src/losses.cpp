#include "viewfx/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace viewfx {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_config_field(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

}  // namespace

void LossConfig::validate() const {
  check_config_field(std::isfinite(tau) && tau > 0.0, "loss.tau must be a positive finite value");
  check_config_field(std::isfinite(alpha) && alpha >= 0.0, "loss.alpha must be non-negative");
  check_config_field(std::isfinite(gamma) && gamma >= 0.0, "loss.gamma must be non-negative");
  check_config_field(std::isfinite(beta) && beta >= 0.0, "loss.beta must be non-negative");
}

void ContrastBatch::validate() const {
  const int n = rows();
  check_input(n >= 4 && n % 2 == 0,
              "contrast batch needs an even row count of at least 4, got " + std::to_string(n));
  check_input(dim() >= 1, "contrast batch embeddings need at least one column");
  check_input(static_cast<int>(pair_index.size()) == n, "pair_index size does not match rows");
  check_input(static_cast<int>(labels.size()) == n, "labels size does not match rows");
  check_input(static_cast<int>(instance_ids.size()) == n, "instance_ids size does not match rows");
  check_input(static_cast<int>(view_ids.size()) == n, "view_ids size does not match rows");
  check_input(embeddings.allFinite(), "contrast batch embeddings contain non-finite values");
  for (int i = 0; i < n; ++i) {
    const int j = pair_index[i];
    check_input(j >= 0 && j < n, "pair_index out of range at row " + std::to_string(i));
    check_input(j != i, "pair_index maps row " + std::to_string(i) + " to itself");
    check_input(pair_index[j] == i, "pair_index is not an involution at row " + std::to_string(i));
    check_input(labels[i] == labels[j],
                "augmentation siblings disagree on label at row " + std::to_string(i));
    check_input(instance_ids[i] == instance_ids[j],
                "augmentation siblings disagree on instance id at row " + std::to_string(i));
    check_input(view_ids[i] == view_ids[j],
                "augmentation siblings disagree on view id at row " + std::to_string(i));
    check_input(instance_ids[i] >= 0, "instance ids must be non-negative");
  }
}

Matrix similarity_logits(const Matrix& z, double tau, bool normalize) {
  check_input(std::isfinite(tau) && tau > 0.0, "temperature must be a positive finite value");
  check_input(z.rows() >= 2, "similarity logits need at least two rows");
  Matrix zh = z;
  if (normalize) {
    for (int i = 0; i < zh.rows(); ++i) {
      const double norm = zh.row(i).norm();
      check_input(norm > 0.0, "cannot normalize zero embedding at row " + std::to_string(i));
      zh.row(i) /= norm;
    }
  }
  Matrix s = (zh * zh.transpose()) / tau;
  s.diagonal().setConstant(kNegInf);
  return s;
}

namespace {

/// Shared softmax-contrastive kernel. `positives[i]` lists the positive rows
/// for anchor i; an empty list with eligible[i] == false means the row never
/// anchors a term (it still serves as a negative for everyone else).
ContrastiveLoss contrastive_kernel(const Matrix& z,
                                   const std::vector<std::vector<int>>& positives,
                                   const std::vector<bool>& eligible,
                                   const LossConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(z.rows());
  const int d = static_cast<int>(z.cols());

  Matrix zh = z;
  Vector norms = Vector::Ones(n);
  if (cfg.normalize_embeddings) {
    for (int i = 0; i < n; ++i) {
      norms(i) = zh.row(i).norm();
      check_input(norms(i) > 0.0, "cannot normalize zero embedding at row " + std::to_string(i));
      zh.row(i) /= norms(i);
    }
  }
  Matrix s = (zh * zh.transpose()) / cfg.tau;
  s.diagonal().setConstant(kNegInf);

  ContrastiveLoss out;
  Matrix g = Matrix::Zero(n, n);
  int eligible_count = 0;
  int surviving = 0;
  for (int i = 0; i < n; ++i) {
    if (!eligible[i]) continue;
    ++eligible_count;
    const int p_count = static_cast<int>(positives[i].size());
    if (p_count == 0) {
      if (cfg.anchor_policy == AnchorPolicy::kStrict) {
        throw InvalidInputError("anchor row " + std::to_string(i) +
                                " has no positives; strict anchor policy forbids this");
      }
      ++out.skipped_anchors;
      continue;
    }
    ++surviving;

    double lse;
    if (cfg.logit_stabilization) {
      const double m = s.row(i).maxCoeff();
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == i) continue;
        acc += std::exp(s(i, k) - m);
      }
      lse = m + std::log(acc);
    } else {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == i) continue;
        acc += std::exp(s(i, k));
      }
      lse = std::log(acc);
    }

    const double inv_p = 1.0 / static_cast<double>(p_count);
    for (int p : positives[i]) {
      out.value += inv_p * (lse - s(i, p));
    }
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      g(i, k) = std::exp(s(i, k) - lse);
    }
    for (int p : positives[i]) {
      g(i, p) -= inv_p;
    }
  }

  check_input(surviving > 0, "every anchor in the batch lost its positives");
  if (out.skipped_anchors > 0) {
    // Rescale so the sum keeps the magnitude of a fully populated batch.
    const double scale = static_cast<double>(eligible_count) / static_cast<double>(surviving);
    out.value *= scale;
    g *= scale;
  }

  const Matrix gh = ((g + g.transpose()) * zh) / cfg.tau;
  if (cfg.normalize_embeddings) {
    out.grad = Matrix::Zero(n, d);
    for (int i = 0; i < n; ++i) {
      const double dot = gh.row(i).dot(zh.row(i));
      out.grad.row(i) = (gh.row(i) - dot * zh.row(i)) / norms(i);
    }
  } else {
    out.grad = gh;
  }
  return out;
}

}  // namespace

ContrastiveLoss self_contrastive_loss(const ContrastBatch& batch, const LossConfig& cfg) {
  batch.validate();
  const int n = batch.rows();
  std::vector<std::vector<int>> positives(n);
  for (int i = 0; i < n; ++i) positives[i] = {batch.pair_index[i]};
  return contrastive_kernel(batch.embeddings, positives, std::vector<bool>(n, true), cfg);
}

ContrastiveLoss group_contrastive_loss(const ContrastBatch& batch,
                                       const std::vector<int>& group_ids,
                                       const LossConfig& cfg) {
  batch.validate();
  const int n = batch.rows();
  check_input(static_cast<int>(group_ids.size()) == n, "group_ids size does not match batch rows");
  std::vector<std::vector<int>> positives(n);
  std::vector<bool> eligible(n, false);
  for (int i = 0; i < n; ++i) {
    if (group_ids[i] < 0) continue;  // unlabeled rows stay negatives-only
    eligible[i] = true;
    for (int j = 0; j < n; ++j) {
      if (j != i && group_ids[j] == group_ids[i]) positives[i].push_back(j);
    }
  }
  check_input(std::any_of(eligible.begin(), eligible.end(), [](bool e) { return e; }),
              "group contrastive loss needs at least one row with a non-negative group id");
  return contrastive_kernel(batch.embeddings, positives, eligible, cfg);
}

ContrastiveLoss view_loss(const ContrastBatch& batch, const LossConfig& cfg) {
  return group_contrastive_loss(batch, batch.instance_ids, cfg);
}

ContrastiveLoss sup_loss(const ContrastBatch& batch, const LossConfig& cfg) {
  return group_contrastive_loss(batch, batch.labels, cfg);
}

namespace {

struct NormalizedBranches {
  Matrix a_hat, b_hat;
  Vector a_norm, b_norm;
  Matrix a_centered, b_centered;  // only used when centering is on
};

NormalizedBranches normalize_branches(const Matrix& wa, const Matrix& wb, bool center) {
  check_input(wa.rows() == wb.rows() && wa.cols() == wb.cols(),
              "cross-correlation branches must have identical shapes");
  check_input(wa.rows() >= 2, "cross-correlation needs at least two batch rows");
  check_input(wa.cols() >= 1, "cross-correlation needs at least one feature column");
  check_input(wa.allFinite() && wb.allFinite(),
              "cross-correlation inputs contain non-finite values");

  NormalizedBranches nb;
  nb.a_hat = wa;
  nb.b_hat = wb;
  if (center) {
    nb.a_hat.rowwise() -= wa.colwise().mean();
    nb.b_hat.rowwise() -= wb.colwise().mean();
  }
  const int d = static_cast<int>(wa.cols());
  nb.a_norm.resize(d);
  nb.b_norm.resize(d);
  for (int j = 0; j < d; ++j) {
    nb.a_norm(j) = nb.a_hat.col(j).norm();
    nb.b_norm(j) = nb.b_hat.col(j).norm();
    check_input(nb.a_norm(j) > 0.0 && nb.b_norm(j) > 0.0,
                "cross-correlation feature column " + std::to_string(j) + " has zero norm");
    nb.a_hat.col(j) /= nb.a_norm(j);
    nb.b_hat.col(j) /= nb.b_norm(j);
  }
  return nb;
}

}  // namespace

CrossCorrMatrix cross_correlation(const Matrix& wa, const Matrix& wb, bool center) {
  const NormalizedBranches nb = normalize_branches(wa, wb, center);
  CrossCorrMatrix out;
  out.c = nb.a_hat.transpose() * nb.b_hat;
  out.batch_size = static_cast<int>(wa.rows());
  return out;
}

BarlowTwinsLoss barlow_twins_loss(const Matrix& wa, const Matrix& wb, double alpha,
                                  bool center) {
  check_input(std::isfinite(alpha) && alpha >= 0.0, "alpha must be non-negative and finite");
  const NormalizedBranches nb = normalize_branches(wa, wb, center);
  const Matrix c = nb.a_hat.transpose() * nb.b_hat;
  const int d = static_cast<int>(c.rows());

  BarlowTwinsLoss out;
  Matrix g = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i == j) {
        const double r = 1.0 - c(i, i);
        out.value += r * r;
        g(i, i) = -2.0 * r;
      } else {
        out.value += alpha * c(i, j) * c(i, j);
        g(i, j) = 2.0 * alpha * c(i, j);
      }
    }
  }

  const Matrix ga_hat = nb.b_hat * g.transpose();
  const Matrix gb_hat = nb.a_hat * g;
  out.grad_a.resizeLike(wa);
  out.grad_b.resizeLike(wb);
  for (int j = 0; j < d; ++j) {
    const double da = ga_hat.col(j).dot(nb.a_hat.col(j));
    const double db = gb_hat.col(j).dot(nb.b_hat.col(j));
    out.grad_a.col(j) = (ga_hat.col(j) - da * nb.a_hat.col(j)) / nb.a_norm(j);
    out.grad_b.col(j) = (gb_hat.col(j) - db * nb.b_hat.col(j)) / nb.b_norm(j);
  }
  if (center) {
    // Centering has Jacobian I - (1/n) 11^T per column.
    out.grad_a.rowwise() -= out.grad_a.colwise().mean();
    out.grad_b.rowwise() -= out.grad_b.colwise().mean();
  }
  return out;
}

ContrastBatch make_contrast_batch(const Matrix& z1, const Matrix& z2,
                                  const std::vector<int>& labels,
                                  const std::vector<int>& phi_ids,
                                  const std::vector<int>& view_ids) {
  check_input(z1.rows() == z2.rows() && z1.cols() == z2.cols(),
              "branch embeddings must have identical shapes");
  const int n = static_cast<int>(z1.rows());
  check_input(static_cast<int>(labels.size()) == n, "labels size does not match batch size");
  check_input(static_cast<int>(phi_ids.size()) == n, "phi_ids size does not match batch size");
  check_input(view_ids.empty() || static_cast<int>(view_ids.size()) == n,
              "view_ids size does not match batch size");

  ContrastBatch batch;
  batch.embeddings.resize(2 * n, z1.cols());
  batch.pair_index.resize(2 * n);
  batch.labels.resize(2 * n);
  batch.instance_ids.resize(2 * n);
  batch.view_ids.resize(2 * n);
  for (int b = 0; b < n; ++b) {
    batch.embeddings.row(2 * b) = z1.row(b);
    batch.embeddings.row(2 * b + 1) = z2.row(b);
    batch.pair_index[2 * b] = 2 * b + 1;
    batch.pair_index[2 * b + 1] = 2 * b;
    batch.labels[2 * b] = batch.labels[2 * b + 1] = labels[b];
    batch.instance_ids[2 * b] = batch.instance_ids[2 * b + 1] = phi_ids[b];
    const int v = view_ids.empty() ? 0 : view_ids[b];
    batch.view_ids[2 * b] = batch.view_ids[2 * b + 1] = v;
  }
  return batch;
}

TotalLoss total_loss(const Matrix& z1, const Matrix& z2,
                     const Matrix& w1a, const Matrix& w2a,
                     const Matrix& w1b, const Matrix& w2b,
                     const std::vector<int>& labels,
                     const std::vector<int>& phi_ids,
                     const LossConfig& cfg,
                     const LossMode& mode) {
  cfg.validate();
  const int n = static_cast<int>(z1.rows());
  check_input(n >= 2, "total loss needs a batch of at least two images");

  TotalLoss out;
  out.grad_z1 = Matrix::Zero(z1.rows(), z1.cols());
  out.grad_z2 = Matrix::Zero(z2.rows(), z2.cols());
  out.grad_w1a = Matrix::Zero(w1a.rows(), w1a.cols());
  out.grad_w2a = Matrix::Zero(w2a.rows(), w2a.cols());
  out.grad_w1b = Matrix::Zero(w1b.rows(), w1b.cols());
  out.grad_w2b = Matrix::Zero(w2b.rows(), w2b.cols());

  if (mode.use_sup || mode.use_view) {
    const ContrastBatch batch = make_contrast_batch(z1, z2, labels, phi_ids);
    if (mode.use_sup) {
      const ContrastiveLoss sup = sup_loss(batch, cfg);
      out.sup = sup.value;
      out.skipped_anchors += sup.skipped_anchors;
      for (int b = 0; b < n; ++b) {
        out.grad_z1.row(b) += sup.grad.row(2 * b);
        out.grad_z2.row(b) += sup.grad.row(2 * b + 1);
      }
    }
    if (mode.use_view) {
      const ContrastiveLoss view = view_loss(batch, cfg);
      out.view = view.value;
      out.skipped_anchors += view.skipped_anchors;
      for (int b = 0; b < n; ++b) {
        out.grad_z1.row(b) += cfg.gamma * view.grad.row(2 * b);
        out.grad_z2.row(b) += cfg.gamma * view.grad.row(2 * b + 1);
      }
    }
  }

  if (mode.bt == BtPlacement::kIntermediate) {
    check_input(w1a.rows() == n && w2a.rows() == n && w1b.rows() == n && w2b.rows() == n,
                "intermediate embeddings must have one row per batch image");
    const BarlowTwinsLoss bt1 =
        barlow_twins_loss(w1a, w2a, cfg.alpha, cfg.center_cross_correlation);
    const BarlowTwinsLoss bt2 =
        barlow_twins_loss(w1b, w2b, cfg.alpha, cfg.center_cross_correlation);
    out.bt1 = bt1.value;
    out.bt2 = bt2.value;
    out.grad_w1a = cfg.beta * bt1.grad_a;
    out.grad_w2a = cfg.beta * bt1.grad_b;
    out.grad_w1b = cfg.beta * bt2.grad_a;
    out.grad_w2b = cfg.beta * bt2.grad_b;
  } else if (mode.bt == BtPlacement::kFinal) {
    const BarlowTwinsLoss bt =
        barlow_twins_loss(z1, z2, cfg.alpha, cfg.center_cross_correlation);
    out.bt1 = bt.value;
    out.grad_z1 += cfg.beta * bt.grad_a;
    out.grad_z2 += cfg.beta * bt.grad_b;
  }

  out.total = (mode.use_sup ? out.sup : 0.0) + cfg.gamma * (mode.use_view ? out.view : 0.0) +
              cfg.beta * (out.bt1 + out.bt2);
  if (!std::isfinite(out.total)) {
    throw NonFiniteLossError("total loss is not finite");
  }
  return out;
}

}  // namespace viewfx
