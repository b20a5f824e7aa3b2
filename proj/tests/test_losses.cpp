#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "viewfx/losses.hpp"
#include "viewfx/rng.hpp"

using namespace viewfx;

namespace {

ContrastBatch random_batch(uint64_t seed, int n_images, int d) {
  RngStream rng = RngStream::derive(seed, 0x10, n_images, d);
  Matrix z1(n_images, d), z2(n_images, d);
  for (int r = 0; r < n_images; ++r) {
    for (int c = 0; c < d; ++c) {
      z1(r, c) = rng.normal();
      z2(r, c) = rng.normal();
    }
  }
  std::vector<int> labels(n_images), phis(n_images);
  for (int b = 0; b < n_images; ++b) {
    labels[b] = b % std::max(1, n_images / 2);
    phis[b] = b / 2;
  }
  return make_contrast_batch(z1, z2, labels, phis);
}

}  // namespace

TEST_CASE("loss config rejects out-of-range fields") {
  LossConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.tau = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = LossConfig{};
  cfg.alpha = -0.1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = LossConfig{};
  cfg.gamma = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = LossConfig{};
  cfg.beta = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("contrast batch validation enforces the sibling structure") {
  ContrastBatch batch = random_batch(0, 4, 8);
  CHECK_NOTHROW(batch.validate());

  SUBCASE("kappa must not map a row to itself") {
    batch.pair_index[0] = 0;
    CHECK_THROWS_AS(batch.validate(), InvalidInputError);
  }
  SUBCASE("kappa must be an involution") {
    batch.pair_index[0] = 3;
    CHECK_THROWS_AS(batch.validate(), InvalidInputError);
  }
  SUBCASE("siblings must share labels") {
    batch.labels[1] = 99;
    CHECK_THROWS_AS(batch.validate(), InvalidInputError);
  }
  SUBCASE("siblings must share instance ids") {
    batch.instance_ids[1] = 99;
    CHECK_THROWS_AS(batch.validate(), InvalidInputError);
  }
  SUBCASE("annotation arrays must match the row count") {
    batch.labels.pop_back();
    CHECK_THROWS_AS(batch.validate(), InvalidInputError);
  }
  SUBCASE("tiny batches are rejected") {
    ContrastBatch small;
    small.embeddings = Matrix::Ones(2, 3);
    small.pair_index = {1, 0};
    small.labels = {0, 0};
    small.instance_ids = {0, 0};
    small.view_ids = {0, 0};
    CHECK_THROWS_AS(small.validate(), InvalidInputError);
  }
}

TEST_CASE("similarity logits have an excluded diagonal and bounded entries") {
  RngStream rng(3);
  Matrix z(6, 5);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 5; ++c) z(r, c) = rng.normal();
  }
  const double tau = 0.1;
  const Matrix s = similarity_logits(z, tau, true);
  for (int i = 0; i < 6; ++i) {
    CHECK(s(i, i) == -std::numeric_limits<double>::infinity());
    for (int k = 0; k < 6; ++k) {
      if (k == i) continue;
      CHECK(s(i, k) == doctest::Approx(s(k, i)));
      CHECK(std::abs(s(i, k)) <= 1.0 / tau + 1e-9);
    }
  }
  CHECK_THROWS_AS(similarity_logits(z, 0.0, true), InvalidInputError);
}

TEST_CASE("all-identical embeddings give 4 ln 3 for every contrastive loss") {
  Matrix z1(2, 3), z2(2, 3);
  z1 << 0.5, -0.25, 2.0, 0.5, -0.25, 2.0;
  z2 = z1;
  const double expected = 4.0 * std::log(3.0);

  for (double tau : {0.05, 0.1, 1.0}) {
    LossConfig cfg;
    cfg.tau = tau;
    // One class, one capture per image pair: self and view positives coincide.
    const ContrastBatch batch = make_contrast_batch(z1, z2, {0, 0}, {0, 1});
    CHECK(self_contrastive_loss(batch, cfg).value == doctest::Approx(expected).epsilon(1e-12));
    CHECK(view_loss(batch, cfg).value == doctest::Approx(expected).epsilon(1e-12));
    CHECK(sup_loss(batch, cfg).value == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("orthogonal unit pairs at tau 1 give 4 ln((e+2)/e)") {
  Matrix z1 = Matrix::Zero(2, 4), z2 = Matrix::Zero(2, 4);
  z1(0, 0) = z2(0, 0) = 1.0;
  z1(1, 1) = z2(1, 1) = 1.0;
  LossConfig cfg;
  cfg.tau = 1.0;
  const ContrastBatch batch = make_contrast_batch(z1, z2, {0, 1}, {0, 1});
  const double expected = 4.0 * std::log((std::exp(1.0) + 2.0) / std::exp(1.0));
  CHECK(self_contrastive_loss(batch, cfg).value == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("contrastive losses are strictly positive on random batches") {
  LossConfig cfg;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const ContrastBatch batch = random_batch(seed, 4, 8);
    CHECK(self_contrastive_loss(batch, cfg).value > 0.0);
    CHECK(view_loss(batch, cfg).value > 0.0);
    CHECK(sup_loss(batch, cfg).value > 0.0);
  }
}

TEST_CASE("strict anchor policy rejects groups without positives") {
  const ContrastBatch batch = random_batch(5, 4, 6);
  LossConfig cfg;
  const std::vector<int> groups = {0, 0, 0, 0, 1, 2, 3, 4};  // rows 4..7 are singletons
  CHECK_THROWS_AS(group_contrastive_loss(batch, groups, cfg), InvalidInputError);
}

TEST_CASE("skip anchor policy drops empty anchors and rescales the sum") {
  const ContrastBatch batch = random_batch(6, 4, 6);
  LossConfig skip_cfg;
  skip_cfg.anchor_policy = AnchorPolicy::kSkip;

  // Rows 4..7 become singleton anchors; under skip they are dropped and the
  // surviving sum is rescaled from 4 anchors back to 8.
  const std::vector<int> with_singletons = {0, 0, 0, 0, 1, 2, 3, 4};
  const ContrastiveLoss skipped = group_contrastive_loss(batch, with_singletons, skip_cfg);
  CHECK(skipped.skipped_anchors == 4);

  // Same surviving anchors, declared ineligible instead: no rescale applied.
  LossConfig strict_cfg;
  const std::vector<int> ineligible = {0, 0, 0, 0, -1, -1, -1, -1};
  const ContrastiveLoss base = group_contrastive_loss(batch, ineligible, strict_cfg);
  CHECK(base.skipped_anchors == 0);
  CHECK(skipped.value == doctest::Approx(2.0 * base.value).epsilon(1e-12));
}

TEST_CASE("rows with negative group ids still serve as negatives") {
  const ContrastBatch batch = random_batch(7, 4, 6);
  LossConfig cfg;
  const std::vector<int> partial = {0, 0, 0, 0, -1, -1, -1, -1};
  const ContrastiveLoss with_neg = group_contrastive_loss(batch, partial, cfg);

  // Removing the unlabeled rows entirely must change the value: they shrink
  // the softmax denominators. Original interleave is (2b, 2b+1).
  Matrix z1(2, 6), z2(2, 6);
  for (int b = 0; b < 2; ++b) {
    z1.row(b) = batch.embeddings.row(2 * b);
    z2.row(b) = batch.embeddings.row(2 * b + 1);
  }
  const ContrastBatch reduced = make_contrast_batch(z1, z2, {0, 0}, {0, 1});
  const ContrastiveLoss without = group_contrastive_loss(reduced, {0, 0, 0, 0}, cfg);
  CHECK(with_neg.value != doctest::Approx(without.value).epsilon(1e-9));
}

TEST_CASE("logit stabilization survives magnitudes that overflow the naive path") {
  Matrix z1(2, 4), z2(2, 4);
  RngStream rng(8);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 4; ++c) {
      z1(r, c) = rng.normal() * 400.0;
      z2(r, c) = rng.normal() * 400.0;
    }
  }
  const ContrastBatch batch = make_contrast_batch(z1, z2, {0, 0}, {0, 1});
  LossConfig cfg;
  cfg.normalize_embeddings = false;
  cfg.tau = 1.0;

  cfg.logit_stabilization = true;
  const double stable = self_contrastive_loss(batch, cfg).value;
  CHECK(std::isfinite(stable));

  cfg.logit_stabilization = false;
  const double naive = self_contrastive_loss(batch, cfg).value;
  CHECK_FALSE(std::isfinite(naive));
}

TEST_CASE("zero embeddings cannot be normalized") {
  Matrix z1 = Matrix::Zero(2, 4), z2 = Matrix::Ones(2, 4);
  const ContrastBatch batch = make_contrast_batch(z1, z2, {0, 0}, {0, 1});
  LossConfig cfg;
  CHECK_THROWS_AS(self_contrastive_loss(batch, cfg), InvalidInputError);
}

TEST_CASE("cross correlation is bounded and identity for orthonormal columns") {
  Matrix wa = Matrix::Zero(8, 4);
  for (int j = 0; j < 4; ++j) wa(j, j) = 3.0;
  const CrossCorrMatrix cc = cross_correlation(wa, wa);
  CHECK(cc.batch_size == 8);
  CHECK((cc.c - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);

  RngStream rng(9);
  Matrix ra(10, 5), rb(10, 5);
  for (int r = 0; r < 10; ++r) {
    for (int c = 0; c < 5; ++c) {
      ra(r, c) = rng.normal();
      rb(r, c) = rng.normal();
    }
  }
  const CrossCorrMatrix rc = cross_correlation(ra, rb);
  CHECK(rc.c.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("barlow twins fixtures: identity gives zero, duplicates give 2 alpha") {
  const double alpha = 0.005;
  Matrix wa = Matrix::Zero(8, 4);
  for (int j = 0; j < 4; ++j) wa(j, j) = 1.0;
  CHECK(barlow_twins_loss(wa, wa, alpha).value == doctest::Approx(0.0).epsilon(1e-15));

  RngStream rng(10);
  Matrix dup(6, 2);
  for (int r = 0; r < 6; ++r) {
    dup(r, 0) = rng.normal();
    dup(r, 1) = dup(r, 0);
  }
  CHECK(barlow_twins_loss(dup, dup, alpha).value ==
        doctest::Approx(2.0 * alpha).epsilon(1e-12));
}

TEST_CASE("barlow twins loss is invariant to positive per-column rescaling") {
  RngStream rng(11);
  Matrix wa(6, 4), wb(6, 4);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 4; ++c) {
      wa(r, c) = rng.normal();
      wb(r, c) = rng.normal();
    }
  }
  const double base = barlow_twins_loss(wa, wb, 0.005).value;
  for (int c = 0; c < 4; ++c) {
    wa.col(c) *= 0.5 + rng.uniform() * 3.0;
    wb.col(c) *= 0.5 + rng.uniform() * 3.0;
  }
  CHECK(barlow_twins_loss(wa, wb, 0.005).value == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("centering flag changes the cross-correlation in general") {
  RngStream rng(12);
  Matrix wa(6, 3), wb(6, 3);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 3; ++c) {
      wa(r, c) = rng.normal() + 2.0;  // common offset makes centering matter
      wb(r, c) = rng.normal() + 2.0;
    }
  }
  const double raw = barlow_twins_loss(wa, wb, 0.005, false).value;
  const double centered = barlow_twins_loss(wa, wb, 0.005, true).value;
  CHECK(raw != doctest::Approx(centered).epsilon(1e-6));
}

TEST_CASE("total loss recombines its components with the fixed weights") {
  // The combination rule itself, on the frozen component example.
  CHECK(1.0 + 0.5 * 2.0 + 0.9 * (0.3 + 0.2) == doctest::Approx(2.45));

  RngStream rng(13);
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
  LossConfig cfg;
  const TotalLoss out = total_loss(z1, z2, w1a, w2a, w1b, w2b, labels, phis, cfg);
  CHECK(out.total ==
        doctest::Approx(out.sup + cfg.gamma * out.view + cfg.beta * (out.bt1 + out.bt2))
            .epsilon(1e-12));
  CHECK(out.sup > 0.0);
  CHECK(out.view > 0.0);
  CHECK(out.bt1 > 0.0);
  CHECK(out.bt2 > 0.0);

  SUBCASE("gamma = beta = 0 reduces the total to the supervised term") {
    LossConfig reduced = cfg;
    reduced.gamma = 0.0;
    reduced.beta = 0.0;
    const TotalLoss r = total_loss(z1, z2, w1a, w2a, w1b, w2b, labels, phis, reduced);
    CHECK(r.total == doctest::Approx(r.sup).epsilon(1e-15));
  }

  SUBCASE("disabled terms report exactly zero") {
    LossMode mode;
    mode.use_view = false;
    mode.bt = BtPlacement::kOff;
    const TotalLoss r = total_loss(z1, z2, w1a, w2a, w1b, w2b, labels, phis, cfg, mode);
    CHECK(r.view == 0.0);
    CHECK(r.bt1 == 0.0);
    CHECK(r.bt2 == 0.0);
    CHECK(r.total == doctest::Approx(r.sup).epsilon(1e-15));
    CHECK(r.grad_w1a.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("final placement attaches the redundancy loss to the projections") {
    LossMode mode;
    mode.bt = BtPlacement::kFinal;
    const TotalLoss r = total_loss(z1, z2, w1a, w2a, w1b, w2b, labels, phis, cfg, mode);
    CHECK(r.bt1 == doctest::Approx(barlow_twins_loss(z1, z2, cfg.alpha).value));
    CHECK(r.bt2 == 0.0);
    CHECK(r.grad_w1a.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("total loss raises on non-finite values") {
  Matrix z1(2, 4), z2(2, 4);
  RngStream rng(14);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 4; ++c) {
      z1(r, c) = rng.normal() * 500.0;
      z2(r, c) = rng.normal() * 500.0;
    }
  }
  LossConfig cfg;
  cfg.normalize_embeddings = false;
  cfg.logit_stabilization = false;
  cfg.tau = 1.0;
  LossMode mode;
  mode.bt = BtPlacement::kOff;
  CHECK_THROWS_AS(
      total_loss(z1, z2, Matrix(), Matrix(), Matrix(), Matrix(), {0, 0}, {0, 1}, cfg, mode),
      NonFiniteLossError);
}

TEST_CASE("make_contrast_batch interleaves branches with sibling kappa") {
  Matrix z1(3, 2), z2(3, 2);
  for (int b = 0; b < 3; ++b) {
    z1.row(b) << b, b;
    z2.row(b) << b + 10, b + 10;
  }
  const ContrastBatch batch = make_contrast_batch(z1, z2, {4, 5, 6}, {7, 8, 9}, {1, 2, 3});
  REQUIRE(batch.rows() == 6);
  for (int b = 0; b < 3; ++b) {
    CHECK(batch.embeddings(2 * b, 0) == doctest::Approx(b));
    CHECK(batch.embeddings(2 * b + 1, 0) == doctest::Approx(b + 10));
    CHECK(batch.pair_index[2 * b] == 2 * b + 1);
    CHECK(batch.pair_index[2 * b + 1] == 2 * b);
    CHECK(batch.labels[2 * b] == 4 + b);
    CHECK(batch.instance_ids[2 * b + 1] == 7 + b);
    CHECK(batch.view_ids[2 * b] == 1 + b);
  }
}
