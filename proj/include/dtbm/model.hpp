#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dtbm/clustering.hpp"
#include "dtbm/linalg.hpp"
#include "dtbm/tensor.hpp"

namespace dtbm {

// Generating triple of a degree-corrected block tensor: per-mode clustering,
// core of block means, per-mode positive degree vectors, noise scale.
struct DtbmParams {
  Clustering z;
  DenseTensor core;                        // r_1 x ... x r_K
  std::vector<std::vector<double>> theta;  // theta[k] has length p_k
  double sigma = 1.0;

  int order() const { return z.order(); }
  int dim(int mode) const { return z.num_items(mode); }
};

// Output of the estimation pipeline.
struct FitResult {
  Clustering z_hat;
  DenseTensor core_hat;
  std::vector<std::vector<double>> theta_hat;  // per mode; entries sum to 1 inside each cluster
  int iterations_run = 0;
  std::vector<int> trace;                      // assignment changes per sweep, all modes combined
  std::vector<std::vector<int>> degenerate_rows;  // per mode, rows assigned at random (last sweep)
  std::vector<std::vector<int>> empty_clusters;   // per mode, clusters with no members in z_hat
};

// p_k x r_k matrix with theta_k(i) at (i, z_k(i)); realizes Theta_k M_k.
inline DenseMatrix membership_factor(const DtbmParams& params, int mode) {
  const auto& labels = params.z.assignments[mode];
  const auto& th = params.theta[mode];
  detail::require(labels.size() == th.size(), "membership_factor: theta length mismatch");
  DenseMatrix F(static_cast<int>(labels.size()), params.z.num_clusters[mode]);
  for (std::size_t i = 0; i < labels.size(); ++i) F(static_cast<int>(i), labels[i]) = th[i];
  return F;
}

// E[Y] = S x_1 Theta_1 M_1 ... x_K Theta_K M_K. Only structural consistency
// is required here; parameter-space conformance is reported by validate().
inline DenseTensor mean_tensor(const DtbmParams& params) {
  const int K = params.order();
  detail::require(params.core.order() == K, "mean_tensor: core order mismatch");
  for (int k = 0; k < K; ++k)
    detail::require(params.core.dim(k) == params.z.num_clusters[k],
                    "mean_tensor: core dims must match cluster counts");
  std::vector<std::pair<DenseMatrix, int>> factors;
  factors.reserve(K);
  for (int k = 0; k < K; ++k) factors.emplace_back(membership_factor(params, k), k);
  return multilinear_multiply(params.core, factors);
}

// Minimal distance between distinct l2-normalized rows of the mode-k
// unfolding of the core; 1.0 by convention when that mode has one cluster.
inline double angle_gap(const DenseTensor& core, int mode) {
  const int r = core.dim(mode);
  if (r == 1) return 1.0;
  DenseMatrix S = matricize(core, mode);
  const std::size_t d = static_cast<std::size_t>(S.cols());
  std::vector<std::vector<double>> rows(r);
  for (int a = 0; a < r; ++a) rows[a] = normalize({S.row_ptr(a), d});
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b) {
      double acc = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        double diff = rows[a][i] - rows[b][i];
        acc += diff * diff;
      }
      best = std::min(best, std::sqrt(acc));
    }
  return best;
}

struct SnrInfo {
  double snr = 0.0;    // Delta_min^2 / sigma^2; +inf when sigma == 0
  double gamma = 0.0;  // log_p(snr) for cubical data; NaN otherwise
  double delta_min = 0.0;
};

inline SnrInfo snr(const DtbmParams& params) {
  SnrInfo info;
  info.delta_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < params.order(); ++k)
    info.delta_min = std::min(info.delta_min, angle_gap(params.core, k));
  if (params.sigma == 0.0) {
    info.snr = std::numeric_limits<double>::infinity();
    info.gamma = std::numeric_limits<double>::infinity();
    return info;
  }
  info.snr = info.delta_min * info.delta_min / (params.sigma * params.sigma);
  bool cubical = true;
  for (int k = 1; k < params.order(); ++k)
    if (params.dim(k) != params.dim(0)) cubical = false;
  info.gamma = (cubical && params.dim(0) > 1) ? std::log(info.snr) / std::log(params.dim(0))
                                              : std::numeric_limits<double>::quiet_NaN();
  return info;
}

// ---------------------------------------------------------------------------
// Parameter-space validation. Report-based: callers decide how to act, since
// estimation must also run on data that violates these conditions.
// ---------------------------------------------------------------------------

struct ValidationOptions {
  double c1 = 0.3;   // cluster sizes within [c1 p/r, c2 p/r]
  double c2 = 3.0;
  double c3 = 0.1;   // core unfolding row norms within [c3, c4]
  double c4 = 10.0;
  double balance_ratio = 1.5;  // max/min per-cluster ||theta||_2, advisory
  double l1_tol = 1e-10;
  double gap_tol = 1e-12;
};

struct ValidationCheck {
  std::string name;
  bool ok = false;
  bool enforced = true;  // advisory checks are reported but do not fail the whole report
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool passed() const {
    for (const auto& c : checks)
      if (c.enforced && !c.ok) return false;
    return true;
  }
  const ValidationCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

inline ValidationReport validate(const DtbmParams& params, const ValidationOptions& opt = {}) {
  ValidationReport rep;
  const int K = params.order();

  bool positive = true;
  for (int k = 0; k < K; ++k)
    for (double t : params.theta[k])
      if (!(t > 0.0) || !std::isfinite(t)) positive = false;
  rep.checks.push_back({"theta_positive", positive, true, ""});

  bool l1_ok = true;
  for (int k = 0; k < K; ++k) {
    auto members = params.z.members(k);
    for (int a = 0; a < params.z.num_clusters[k]; ++a) {
      if (members[a].empty()) continue;
      double sum = 0.0;
      for (int i : members[a]) sum += std::abs(params.theta[k][i]);
      double size = static_cast<double>(members[a].size());
      if (std::abs(sum / size - 1.0) > opt.l1_tol) l1_ok = false;
    }
  }
  rep.checks.push_back({"theta_l1_normalized", l1_ok, true, ""});

  bool norms_ok = true;
  for (int k = 0; k < K; ++k) {
    DenseMatrix S = matricize(params.core, k);
    for (int a = 0; a < S.rows(); ++a) {
      double n = norm2({S.row_ptr(a), static_cast<std::size_t>(S.cols())});
      if (n < opt.c3 || n > opt.c4) norms_ok = false;
    }
  }
  rep.checks.push_back({"core_row_norms", norms_ok, true, ""});

  bool sizes_ok = true;
  for (int k = 0; k < K; ++k) {
    double p = static_cast<double>(params.dim(k));
    double r = static_cast<double>(params.z.num_clusters[k]);
    for (int s : params.z.cluster_sizes(k))
      if (s < opt.c1 * p / r || s > opt.c2 * p / r) sizes_ok = false;
  }
  rep.checks.push_back({"cluster_sizes_balanced", sizes_ok, true, ""});

  bool gap_ok = true;
  for (int k = 0; k < K; ++k)
    if (angle_gap(params.core, k) <= opt.gap_tol) gap_ok = false;
  rep.checks.push_back({"angle_gap_positive", gap_ok, true, ""});

  // Degree balance across clusters; advisory because the bound is asymptotic.
  bool balance_ok = true;
  for (int k = 0; k < K; ++k) {
    auto members = params.z.members(k);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& cluster : members) {
      if (cluster.empty()) continue;
      double n = 0.0;
      for (int i : cluster) n += params.theta[k][i] * params.theta[k][i];
      n = std::sqrt(n);
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
    if (lo > 0.0 && hi / lo > opt.balance_ratio) balance_ok = false;
  }
  rep.checks.push_back({"degree_balance", balance_ok, false, ""});

  return rep;
}

}  // namespace dtbm
