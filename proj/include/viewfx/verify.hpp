#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "viewfx/common.hpp"
#include "viewfx/losses.hpp"

namespace viewfx {

/// Naive double-loop references. These transcribe the loss summations
/// literally, with explicit loops and no shared code with the vectorized
/// implementations. Intended for small inputs (2N <= 32).
double naive_self_loss(const Matrix& z, const std::vector<int>& pair_index,
                       const LossConfig& cfg);
double naive_group_loss(const Matrix& z, const std::vector<int>& group_ids,
                        const LossConfig& cfg);
double naive_bt_loss(const Matrix& wa, const Matrix& wb, double alpha, bool center = false);

struct GradCheckResult {
  double max_rel_error = 0.0;
  long coords_checked = 0;
};

/// Central finite differences (f(x+eps e) - f(x-eps e)) / (2 eps) per
/// coordinate against the supplied analytic gradient. Relative error is
/// |numeric - analytic| / max(|numeric|, |analytic|, 1e-8), maximized over
/// coordinates. Non-finite values anywhere raise IntegrityError.
GradCheckResult gradcheck(const std::function<double(const Matrix&)>& f, const Matrix& x,
                          const Matrix& analytic_grad, double eps = 1e-5);

struct VerifyCheck {
  std::string name;
  bool pass = false;
  double worst_error = 0.0;
  double threshold = 0.0;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_pass() const;
};

/// Runs the full oracle / fixture / gradient-check battery: closed-form
/// fixtures, oracle equivalence over seeds {0..19} x N {2,4,6,8} x
/// d {4,8,16} (normalized and unnormalized passes), invariance properties,
/// and finite-difference gradient checks for every loss.
VerifyReport run_verification(uint64_t base_seed = 0);

/// Serializes the report as JSON: {"all_pass": bool, "checks": [...]}.
void write_verify_report(const VerifyReport& report, const std::string& path);

}  // namespace viewfx
