#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "tucb/types.hpp"

namespace tucb {

// Rank-1 factored context X = phi_1 o phi_2 o ... o phi_D. Never
// materialized densely; ops only ever touch the mode vectors.
struct ContextTensor {
  std::vector<Vec> modes;

  ContextTensor() = default;
  explicit ContextTensor(std::vector<Vec> m) : modes(std::move(m)) {}

  int order() const { return static_cast<int>(modes.size()); }
};

// Gaussian posterior state of one CP factor w^{l,r}: mean, covariance,
// and the data accumulator b. log_det_precision tracks
// sum_tau log(1 + kappa_tau^2 / sigma^2) across effective updates.
struct FactorState {
  Vec mean;
  Mat cov;
  Vec accum;
  double log_det_precision = 0.0;
  std::int64_t update_count = 0;

  int dim() const { return static_cast<int>(mean.size()); }

  // One online observation with effective weight beta and pseudo-response
  // pseudo_y. Rank-1 covariance downdate (Woodbury form), accumulator
  // increment, mean recompute. ||beta * phi|| = 0 is a no-op.
  // Returns kappa = sqrt((beta phi)^T Sigma_before (beta phi)).
  double apply_update(const Vec& phi, double beta, double pseudo_y, double noise_var);
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

// Mean-field Gaussian posterior over the rank-R CP expansion of the
// susceptibility tensor, maintained online one sample at a time.
class SusceptibilityPosterior {
 public:
  struct Options {
    bool jitter = true;            // rank symmetry breaking at init
    double jitter_scale = 0.01;    // means = ones + U[-scale, scale]
    double sweep_tolerance = 1e-6; // optional means-refresh loop
    int max_sweeps = 50;
    bool refresh_means = false;    // off by default
  };

  SusceptibilityPosterior(int order, int rank, std::vector<int> dims,
                          double noise_var, std::uint64_t rng_seed,
                          Options opt = Options{});

  int order() const { return order_; }
  int rank() const { return rank_; }
  const std::vector<int>& dims() const { return dims_; }
  double noise_variance() const { return noise_var_; }
  const Options& options() const { return opt_; }

  const FactorState& factor(int l, int r) const { return factors_[index(l, r)]; }
  FactorState& factor(int l, int r) { return factors_[index(l, r)]; }

  // Warm-start / test hook; dimension-checked.
  void set_mean(int l, int r, const Vec& mean);

  // sum_r prod_l phi_l^T mean^{l,r}
  double inner_product(const ContextTensor& x) const;

  // beta^{l,r} = prod_{l' != l} phi_{l'}^T mean^{l',r}; empty product (D=1) is 1.
  double beta(const ContextTensor& x, int l, int r) const;

  // y^{l,r} = y - sum_{r' != r} (phi_l^T mean^{l,r'}) beta^{l,r'}
  double pseudo_response(const ContextTensor& x, double y, int l, int r) const;

  // Absorb one observation: all beta^{l,r} and y^{l,r} are evaluated on
  // the means as of sample arrival, then every factor is updated exactly
  // once (l outer ascending, r inner ascending). Returns the kappa
  // recorded for each (l,r), row-major by l.
  std::vector<double> absorb(const ContextTensor& x, double y);

  // Predictive Gaussian: mean = inner_product, variance =
  // sigma^2 + sum_{l,r} (beta phi)^T Sigma (beta phi). Always >= sigma^2.
  Prediction predict(const ContextTensor& x) const;

  // sqrt((beta^{l,r} phi_l)^T Sigma^{l,r} (beta^{l,r} phi_l)) for all (l,r),
  // row-major by l. The UCB width sums these; the predictive variance sums
  // their squares.
  std::vector<double> confidence_terms(const ContextTensor& x) const;

  // max_{l,r} ||mean^{l,r}||_2
  double max_mean_norm() const;

  // Re-evaluate means from fixed Sigma, b in sweep order until stable.
  // Only touches factors that have absorbed data.
  void refresh_means();

  // Versioned JSON snapshot (campaign resume).
  std::string to_json() const;
  static SusceptibilityPosterior from_json(const std::string& text);
  void save(const std::string& path) const;
  static SusceptibilityPosterior load(const std::string& path);

 private:
  int index(int l, int r) const;
  void check_context(const ContextTensor& x) const;
  // phi_l . mean^{l,r} for all (l,r), row-major by l
  std::vector<double> mode_dots(const ContextTensor& x) const;
  static double beta_from_dots(const std::vector<double>& dots, int order, int rank,
                               int l, int r);

  int order_ = 0;
  int rank_ = 0;
  std::vector<int> dims_;
  double noise_var_ = 0.0;
  Options opt_;
  std::vector<FactorState> factors_;  // D x R, row-major by l
};

}  // namespace tucb
