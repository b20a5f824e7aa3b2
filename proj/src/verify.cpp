#include "viewfx/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "viewfx/rng.hpp"

namespace viewfx {

namespace {

/// Row-normalized copy built with explicit loops (no Eigen reductions), so the
/// oracle path shares no arithmetic with the vectorized implementation.
std::vector<std::vector<double>> naive_rows(const Matrix& z, bool normalize) {
  const int n = static_cast<int>(z.rows());
  const int d = static_cast<int>(z.cols());
  std::vector<std::vector<double>> rows(n, std::vector<double>(d, 0.0));
  for (int i = 0; i < n; ++i) {
    long double sq = 0.0L;
    for (int m = 0; m < d; ++m) sq += static_cast<long double>(z(i, m)) * z(i, m);
    const long double norm = normalize ? std::sqrt(sq) : 1.0L;
    check_input(!normalize || norm > 0.0L, "oracle: zero-norm row " + std::to_string(i));
    for (int m = 0; m < d; ++m) {
      rows[i][m] = static_cast<double>(z(i, m) / norm);
    }
  }
  return rows;
}

double naive_logit(const std::vector<std::vector<double>>& rows, int i, int k, double tau) {
  long double dot = 0.0L;
  for (size_t m = 0; m < rows[i].size(); ++m) {
    dot += static_cast<long double>(rows[i][m]) * rows[k][m];
  }
  return static_cast<double>(dot / tau);
}

double naive_lse(const std::vector<std::vector<double>>& rows, int i, double tau,
                 bool stabilize) {
  const int n = static_cast<int>(rows.size());
  if (stabilize) {
    double m = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      if (k != i) m = std::max(m, naive_logit(rows, i, k, tau));
    }
    long double acc = 0.0L;
    for (int k = 0; k < n; ++k) {
      if (k != i) acc += std::exp(static_cast<long double>(naive_logit(rows, i, k, tau) - m));
    }
    return m + static_cast<double>(std::log(acc));
  }
  long double acc = 0.0L;
  for (int k = 0; k < n; ++k) {
    if (k != i) acc += std::exp(static_cast<long double>(naive_logit(rows, i, k, tau)));
  }
  return static_cast<double>(std::log(acc));
}

}  // namespace

double naive_self_loss(const Matrix& z, const std::vector<int>& pair_index,
                       const LossConfig& cfg) {
  const int n = static_cast<int>(z.rows());
  check_input(static_cast<int>(pair_index.size()) == n, "oracle: pair_index size mismatch");
  const auto rows = naive_rows(z, cfg.normalize_embeddings);
  long double total = 0.0L;
  for (int i = 0; i < n; ++i) {
    const double lse = naive_lse(rows, i, cfg.tau, cfg.logit_stabilization);
    total += lse - naive_logit(rows, i, pair_index[i], cfg.tau);
  }
  return static_cast<double>(total);
}

double naive_group_loss(const Matrix& z, const std::vector<int>& group_ids,
                        const LossConfig& cfg) {
  const int n = static_cast<int>(z.rows());
  check_input(static_cast<int>(group_ids.size()) == n, "oracle: group_ids size mismatch");
  const auto rows = naive_rows(z, cfg.normalize_embeddings);
  long double total = 0.0L;
  int eligible = 0;
  int surviving = 0;
  for (int i = 0; i < n; ++i) {
    if (group_ids[i] < 0) continue;
    ++eligible;
    int p_count = 0;
    for (int j = 0; j < n; ++j) {
      if (j != i && group_ids[j] == group_ids[i]) ++p_count;
    }
    if (p_count == 0) {
      if (cfg.anchor_policy == AnchorPolicy::kStrict) {
        throw InvalidInputError("oracle: anchor row " + std::to_string(i) + " has no positives");
      }
      continue;
    }
    ++surviving;
    const double lse = naive_lse(rows, i, cfg.tau, cfg.logit_stabilization);
    long double anchor = 0.0L;
    for (int j = 0; j < n; ++j) {
      if (j != i && group_ids[j] == group_ids[i]) {
        anchor += lse - naive_logit(rows, i, j, cfg.tau);
      }
    }
    total += anchor / p_count;
  }
  check_input(surviving > 0, "oracle: every anchor lost its positives");
  if (surviving < eligible) {
    total *= static_cast<long double>(eligible) / surviving;
  }
  return static_cast<double>(total);
}

double naive_bt_loss(const Matrix& wa, const Matrix& wb, double alpha, bool center) {
  check_input(wa.rows() == wb.rows() && wa.cols() == wb.cols(),
              "oracle: branch shapes must match");
  const int n = static_cast<int>(wa.rows());
  const int d = static_cast<int>(wa.cols());

  std::vector<std::vector<double>> a(n, std::vector<double>(d)), b(n, std::vector<double>(d));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < d; ++c) {
      a[r][c] = wa(r, c);
      b[r][c] = wb(r, c);
    }
  }
  if (center) {
    for (int c = 0; c < d; ++c) {
      long double ma = 0.0L, mb = 0.0L;
      for (int r = 0; r < n; ++r) {
        ma += a[r][c];
        mb += b[r][c];
      }
      ma /= n;
      mb /= n;
      for (int r = 0; r < n; ++r) {
        a[r][c] -= static_cast<double>(ma);
        b[r][c] -= static_cast<double>(mb);
      }
    }
  }

  std::vector<long double> na(d, 0.0L), nb(d, 0.0L);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < n; ++r) {
      na[c] += static_cast<long double>(a[r][c]) * a[r][c];
      nb[c] += static_cast<long double>(b[r][c]) * b[r][c];
    }
    na[c] = std::sqrt(na[c]);
    nb[c] = std::sqrt(nb[c]);
    check_input(na[c] > 0.0L && nb[c] > 0.0L,
                "oracle: zero-norm feature column " + std::to_string(c));
  }

  long double total = 0.0L;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      long double cij = 0.0L;
      for (int r = 0; r < n; ++r) {
        cij += static_cast<long double>(a[r][i]) * b[r][j];
      }
      cij /= na[i] * nb[j];
      if (i == j) {
        total += (1.0L - cij) * (1.0L - cij);
      } else {
        total += alpha * cij * cij;
      }
    }
  }
  return static_cast<double>(total);
}

GradCheckResult gradcheck(const std::function<double(const Matrix&)>& f, const Matrix& x,
                          const Matrix& analytic_grad, double eps) {
  check_input(x.rows() == analytic_grad.rows() && x.cols() == analytic_grad.cols(),
              "gradcheck: analytic gradient shape does not match input");
  check_input(eps > 0.0, "gradcheck: eps must be positive");
  if (!analytic_grad.allFinite()) {
    throw IntegrityError("gradcheck: analytic gradient contains non-finite values");
  }
  GradCheckResult res;
  Matrix xp = x;
  for (int r = 0; r < x.rows(); ++r) {
    for (int c = 0; c < x.cols(); ++c) {
      const double orig = xp(r, c);
      xp(r, c) = orig + eps;
      const double fp = f(xp);
      xp(r, c) = orig - eps;
      const double fm = f(xp);
      xp(r, c) = orig;
      if (!std::isfinite(fp) || !std::isfinite(fm)) {
        throw IntegrityError("gradcheck: loss returned a non-finite value at (" +
                             std::to_string(r) + "," + std::to_string(c) + ")");
      }
      const double numeric = (fp - fm) / (2.0 * eps);
      const double analytic = analytic_grad(r, c);
      const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
      res.max_rel_error = std::max(res.max_rel_error, std::abs(numeric - analytic) / denom);
      ++res.coords_checked;
    }
  }
  return res;
}

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.pass; });
}

namespace {

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

ContrastBatch random_batch(uint64_t seed, int n_images, int d) {
  RngStream rng = RngStream::derive(seed, 0x7E51F1EDULL, static_cast<uint64_t>(n_images),
                                    static_cast<uint64_t>(d));
  Matrix z1(n_images, d), z2(n_images, d);
  for (int r = 0; r < n_images; ++r) {
    for (int c = 0; c < d; ++c) {
      z1(r, c) = rng.normal();
      z2(r, c) = rng.normal();
    }
  }
  std::vector<int> labels(n_images), phis(n_images), views(n_images);
  const int n_classes = std::max(1, n_images / 2);
  for (int b = 0; b < n_images; ++b) {
    labels[b] = b % n_classes;           // every class gets >= 2 images
    phis[b] = b / 2;                     // two images per capture group
    views[b] = b % 2;
  }
  return make_contrast_batch(z1, z2, labels, phis, views);
}

struct Battery {
  VerifyReport report;

  void add(const std::string& name, double worst, double threshold) {
    report.checks.push_back({name, worst <= threshold, worst, threshold});
  }
  void add_bool(const std::string& name, bool pass, double worst, double threshold) {
    report.checks.push_back({name, pass, worst, threshold});
  }
};

}  // namespace

VerifyReport run_verification(uint64_t base_seed) {
  Battery bat;
  LossConfig cfg;  // defaults: tau 0.1, normalize on, stabilized

  // Closed-form fixture: all rows identical, N=2. Every anchor sees equal
  // logits so each log ratio is ln 3 and the sum over 4 anchors is 4 ln 3.
  {
    Matrix z1(2, 3), z2(2, 3);
    z1 << 0.3, -1.2, 0.5, 0.3, -1.2, 0.5;
    z2 = z1;
    const ContrastBatch batch = make_contrast_batch(z1, z2, {0, 0}, {0, 1});
    const double expected = 4.0 * std::log(3.0);
    bat.add("fixture_self_all_identical_4ln3",
            rel_err(self_contrastive_loss(batch, cfg).value, expected), 1e-12);
    bat.add("fixture_self_all_identical_4ln3_oracle",
            rel_err(naive_self_loss(batch.embeddings, batch.pair_index, cfg), expected), 1e-12);
  }

  // Closed-form fixture: two orthogonal unit pairs at tau = 1. Each anchor has
  // one logit of 1 (its sibling) and two of 0, so the loss is
  // 4 (log(e + 2) - 1) = 4 ln((e + 2) / e).
  {
    Matrix z1(2, 4), z2(2, 4);
    z1.setZero();
    z2.setZero();
    z1(0, 0) = 1.0;
    z2(0, 0) = 1.0;
    z1(1, 1) = 1.0;
    z2(1, 1) = 1.0;
    LossConfig unit_tau = cfg;
    unit_tau.tau = 1.0;
    const ContrastBatch batch = make_contrast_batch(z1, z2, {0, 1}, {0, 1});
    const double expected = 4.0 * std::log((std::exp(1.0) + 2.0) / std::exp(1.0));
    bat.add("fixture_self_orthogonal_pairs",
            rel_err(self_contrastive_loss(batch, unit_tau).value, expected), 1e-12);
    bat.add("fixture_self_orthogonal_pairs_oracle",
            rel_err(naive_self_loss(batch.embeddings, batch.pair_index, unit_tau), expected),
            1e-12);
  }

  // Barlow-twins fixtures: orthonormal columns against themselves give C = I
  // (loss 0); duplicated feature columns give C = all-ones (loss 2 alpha).
  {
    Matrix wa = Matrix::Zero(8, 4);
    for (int j = 0; j < 4; ++j) wa(j, j) = 1.0;
    bat.add("fixture_bt_identity_zero",
            std::abs(barlow_twins_loss(wa, wa, cfg.alpha).value), 1e-12);

    RngStream rng = RngStream::derive(base_seed, 0xB7, 0, 0);
    Matrix dup(6, 2);
    for (int r = 0; r < 6; ++r) {
      dup(r, 0) = rng.normal();
      dup(r, 1) = dup(r, 0);
    }
    bat.add("fixture_bt_duplicate_columns",
            rel_err(barlow_twins_loss(dup, dup, cfg.alpha).value, 2.0 * cfg.alpha), 1e-12);
  }

  // Oracle equivalence over seeds {0..19} x N {2,4,6,8} x d {4,8,16}, run
  // once with normalization (the shipped default) and once without (the
  // literal unnormalized reading).
  for (const bool normalize : {true, false}) {
    LossConfig c = cfg;
    c.normalize_embeddings = normalize;
    const std::string suffix = normalize ? "_normalized" : "_unnormalized";
    double worst_self = 0.0, worst_view = 0.0, worst_sup = 0.0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
      for (int n_images : {2, 4, 6, 8}) {
        for (int d : {4, 8, 16}) {
          const ContrastBatch batch = random_batch(base_seed + seed, n_images, d);
          worst_self = std::max(
              worst_self, rel_err(self_contrastive_loss(batch, c).value,
                                  naive_self_loss(batch.embeddings, batch.pair_index, c)));
          worst_view = std::max(
              worst_view, rel_err(view_loss(batch, c).value,
                                  naive_group_loss(batch.embeddings, batch.instance_ids, c)));
          worst_sup = std::max(
              worst_sup, rel_err(sup_loss(batch, c).value,
                                 naive_group_loss(batch.embeddings, batch.labels, c)));
        }
      }
    }
    bat.add("oracle_self" + suffix, worst_self, 1e-9);
    bat.add("oracle_view" + suffix, worst_view, 1e-9);
    bat.add("oracle_sup" + suffix, worst_sup, 1e-9);
  }

  for (const bool center : {false, true}) {
    double worst = 0.0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
      for (int n : {2, 4, 6, 8}) {
        for (int d : {4, 8, 16}) {
          RngStream rng = RngStream::derive(base_seed + seed, 0xB7BA, n, d);
          Matrix wa(n, d), wb(n, d);
          for (int r = 0; r < n; ++r) {
            for (int c2 = 0; c2 < d; ++c2) {
              wa(r, c2) = rng.normal();
              wb(r, c2) = rng.normal();
            }
          }
          worst = std::max(worst, rel_err(barlow_twins_loss(wa, wb, cfg.alpha, center).value,
                                          naive_bt_loss(wa, wb, cfg.alpha, center)));
        }
      }
    }
    bat.add(center ? "oracle_bt_centered" : "oracle_bt", worst, 1e-9);
  }

  // Permutation invariance: permuting rows together with all annotations
  // leaves every loss value unchanged.
  {
    double worst = 0.0;
    for (uint64_t seed = 0; seed < 5; ++seed) {
      const ContrastBatch batch = random_batch(base_seed + 100 + seed, 4, 8);
      const int n = batch.rows();
      std::vector<int> perm(n);
      for (int i = 0; i < n; ++i) perm[i] = i;
      RngStream rng = RngStream::derive(base_seed + 100 + seed, 0x9E, 0, 0);
      rng.shuffle(perm);
      std::vector<int> inverse(n);
      for (int i = 0; i < n; ++i) inverse[perm[i]] = i;

      ContrastBatch permuted;
      permuted.embeddings.resize(n, batch.dim());
      permuted.pair_index.resize(n);
      permuted.labels.resize(n);
      permuted.instance_ids.resize(n);
      permuted.view_ids.resize(n);
      for (int i = 0; i < n; ++i) {
        permuted.embeddings.row(inverse[i]) = batch.embeddings.row(i);
        permuted.pair_index[inverse[i]] = inverse[batch.pair_index[i]];
        permuted.labels[inverse[i]] = batch.labels[i];
        permuted.instance_ids[inverse[i]] = batch.instance_ids[i];
        permuted.view_ids[inverse[i]] = batch.view_ids[i];
      }
      worst = std::max(worst, rel_err(self_contrastive_loss(batch, cfg).value,
                                      self_contrastive_loss(permuted, cfg).value));
      worst = std::max(worst, rel_err(view_loss(batch, cfg).value,
                                      view_loss(permuted, cfg).value));
      worst = std::max(worst,
                       rel_err(sup_loss(batch, cfg).value, sup_loss(permuted, cfg).value));
    }
    bat.add("invariance_permutation", worst, 1e-12);
  }

  // Scale invariance under normalization, and the reduction identity
  // (singleton-image groups reproduce the self loss).
  {
    double worst_scale = 0.0, worst_reduction = 0.0, min_value = 1e300;
    for (uint64_t seed = 0; seed < 5; ++seed) {
      ContrastBatch batch = random_batch(base_seed + 200 + seed, 4, 8);
      const double base_self = self_contrastive_loss(batch, cfg).value;
      const double base_view = view_loss(batch, cfg).value;
      const double base_sup = sup_loss(batch, cfg).value;
      min_value = std::min({min_value, base_self, base_view, base_sup});

      ContrastBatch scaled = batch;
      scaled.embeddings *= 3.7;
      worst_scale = std::max(worst_scale,
                             rel_err(base_self, self_contrastive_loss(scaled, cfg).value));
      worst_scale = std::max(worst_scale, rel_err(base_view, view_loss(scaled, cfg).value));
      worst_scale = std::max(worst_scale, rel_err(base_sup, sup_loss(scaled, cfg).value));

      std::vector<int> singleton_groups(batch.rows());
      for (int i = 0; i < batch.rows(); ++i) singleton_groups[i] = i / 2;
      worst_reduction = std::max(
          worst_reduction,
          rel_err(base_self, group_contrastive_loss(batch, singleton_groups, cfg).value));
    }
    bat.add("invariance_scale", worst_scale, 1e-12);
    bat.add("reduction_identity", worst_reduction, 1e-12);
    bat.add_bool("positivity", min_value > 0.0, min_value, 0.0);
  }

  // Positive per-column rescaling of either branch leaves the
  // cross-correlation (and hence the loss) unchanged.
  {
    double worst = 0.0;
    for (uint64_t seed = 0; seed < 5; ++seed) {
      RngStream rng = RngStream::derive(base_seed + 300 + seed, 0xC0, 0, 0);
      Matrix wa(6, 4), wb(6, 4);
      for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 4; ++c) {
          wa(r, c) = rng.normal();
          wb(r, c) = rng.normal();
        }
      }
      const double base = barlow_twins_loss(wa, wb, cfg.alpha).value;
      Matrix was = wa, wbs = wb;
      for (int c = 0; c < 4; ++c) {
        was.col(c) *= 0.25 + rng.uniform() * 4.0;
        wbs.col(c) *= 0.25 + rng.uniform() * 4.0;
      }
      worst = std::max(worst, rel_err(base, barlow_twins_loss(was, wbs, cfg.alpha).value));
    }
    bat.add("bt_rescale_invariance", worst, 1e-12);
  }

  // Gradcheck harness self-test on an exactly differentiable quadratic.
  {
    RngStream rng = RngStream::derive(base_seed, 0x4D, 0, 0);
    Matrix x(5, 7);
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 7; ++c) x(r, c) = rng.normal();
    }
    const auto quad = [](const Matrix& m) { return m.squaredNorm(); };
    bat.add("gradcheck_quadratic", gradcheck(quad, x, 2.0 * x).max_rel_error, 1e-8);
  }

  // Gradient checks for each contrastive loss on random batches (N <= 6,
  // d <= 16), both normalization settings.
  {
    double worst = 0.0;
    for (const bool normalize : {true, false}) {
      LossConfig c = cfg;
      c.normalize_embeddings = normalize;
      for (uint64_t seed = 0; seed < 3; ++seed) {
        const ContrastBatch batch = random_batch(base_seed + 400 + seed, 3, 8);
        const auto check = [&](auto loss_fn, const char*) {
          const ContrastiveLoss out = loss_fn(batch, c);
          const auto f = [&](const Matrix& x) {
            ContrastBatch b = batch;
            b.embeddings = x;
            return loss_fn(b, c).value;
          };
          worst = std::max(worst, gradcheck(f, batch.embeddings, out.grad).max_rel_error);
        };
        check([](const ContrastBatch& b, const LossConfig& lc) {
          return self_contrastive_loss(b, lc);
        }, "self");
        check([](const ContrastBatch& b, const LossConfig& lc) { return view_loss(b, lc); },
              "view");
        check([](const ContrastBatch& b, const LossConfig& lc) { return sup_loss(b, lc); },
              "sup");
      }
    }
    bat.add("gradcheck_contrastive", worst, 1e-4);
  }

  // Gradient checks for the redundancy loss, both branches, both centering
  // settings.
  {
    double worst = 0.0;
    for (const bool center : {false, true}) {
      for (uint64_t seed = 0; seed < 3; ++seed) {
        RngStream rng = RngStream::derive(base_seed + 500 + seed, 0xBB, 0, 0);
        Matrix wa(8, 4), wb(8, 4);
        for (int r = 0; r < 8; ++r) {
          for (int c = 0; c < 4; ++c) {
            wa(r, c) = rng.normal();
            wb(r, c) = rng.normal();
          }
        }
        const BarlowTwinsLoss out = barlow_twins_loss(wa, wb, cfg.alpha, center);
        const auto fa = [&](const Matrix& x) {
          return barlow_twins_loss(x, wb, cfg.alpha, center).value;
        };
        const auto fb = [&](const Matrix& x) {
          return barlow_twins_loss(wa, x, cfg.alpha, center).value;
        };
        worst = std::max(worst, gradcheck(fa, wa, out.grad_a).max_rel_error);
        worst = std::max(worst, gradcheck(fb, wb, out.grad_b).max_rel_error);
      }
    }
    bat.add("gradcheck_bt", worst, 1e-4);
  }

  // At the C = I point the gradient must be orthogonal to every column
  // (column rescaling preserves C, so the directional derivative vanishes).
  {
    Matrix wa = Matrix::Zero(8, 4);
    for (int j = 0; j < 4; ++j) wa(j, j) = 2.5;
    const BarlowTwinsLoss out = barlow_twins_loss(wa, wa, cfg.alpha);
    double worst = 0.0;
    for (int j = 0; j < 4; ++j) {
      worst = std::max(worst, std::abs(out.grad_a.col(j).dot(wa.col(j))));
      worst = std::max(worst, std::abs(out.grad_b.col(j).dot(wa.col(j))));
    }
    bat.add("gradcheck_bt_identity_point", worst, 1e-12);
  }

  // Full objective: every gradient output checked against finite differences
  // on a random N=4, d=8 batch.
  {
    RngStream rng = RngStream::derive(base_seed + 600, 0x70, 0, 0);
    const int n = 4, d = 8, dw = 6;
    Matrix z1(n, d), z2(n, d), w1a(n, dw), w2a(n, dw), w1b(n, dw), w2b(n, dw);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < d; ++c) {
        z1(r, c) = rng.normal();
        z2(r, c) = rng.normal();
      }
      for (int c = 0; c < dw; ++c) {
        w1a(r, c) = rng.normal();
        w2a(r, c) = rng.normal();
        w1b(r, c) = rng.normal();
        w2b(r, c) = rng.normal();
      }
    }
    const std::vector<int> labels = {0, 0, 1, 1};
    const std::vector<int> phis = {0, 0, 1, 1};
    const TotalLoss out = total_loss(z1, z2, w1a, w2a, w1b, w2b, labels, phis, cfg);
    double worst = 0.0;
    const auto check = [&](const Matrix& x, const Matrix& grad, int slot) {
      const auto f = [&, slot](const Matrix& v) {
        Matrix a1 = z1, a2 = z2, b1 = w1a, b2 = w2a, c1 = w1b, c2 = w2b;
        (slot == 0 ? a1 : slot == 1 ? a2 : slot == 2 ? b1 : slot == 3 ? b2
                                                     : slot == 4 ? c1 : c2) = v;
        return total_loss(a1, a2, b1, b2, c1, c2, labels, phis, cfg).total;
      };
      worst = std::max(worst, gradcheck(f, x, grad).max_rel_error);
    };
    check(z1, out.grad_z1, 0);
    check(z2, out.grad_z2, 1);
    check(w1a, out.grad_w1a, 2);
    check(w2a, out.grad_w2a, 3);
    check(w1b, out.grad_w1b, 4);
    check(w2b, out.grad_w2b, 5);
    bat.add("gradcheck_total", worst, 1e-4);
  }

  return bat.report;
}

void write_verify_report(const VerifyReport& report, const std::string& path) {
  nlohmann::json j;
  j["all_pass"] = report.all_pass();
  j["checks"] = nlohmann::json::array();
  for (const VerifyCheck& c : report.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"pass", c.pass},
                           {"worst_error", c.worst_error},
                           {"threshold", c.threshold}});
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open verify report path: " + path);
  }
  out << j.dump(2) << "\n";
}

}  // namespace viewfx
