#include "tucb/tensor_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tucb/rng.hpp"

namespace tucb {

double FactorState::apply_update(const Vec& phi, double beta, double pseudo_y,
                                 double noise_var) {
  if (phi.size() != mean.size()) {
    throw std::invalid_argument("factor update: phi dimension mismatch");
  }
  if (!std::isfinite(beta) || !std::isfinite(pseudo_y) || !phi.allFinite()) {
    throw std::runtime_error("factor update: non-finite input");
  }
  const double weight2 = beta * beta * phi.squaredNorm();
  if (weight2 == 0.0) {
    return 0.0;  // zero-information sample, keep state (incl. warm mean)
  }

  Vec cov_phi = cov * phi;
  const double quad = phi.dot(cov_phi);                 // phi^T Sigma phi
  const double kappa2 = beta * beta * quad;             // (beta phi)^T Sigma (beta phi)
  const double denom = noise_var / (beta * beta) + quad;
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    throw std::runtime_error("factor update: covariance lost positive definiteness");
  }

  cov.noalias() -= (cov_phi * cov_phi.transpose()) / denom;
  cov = 0.5 * (cov + cov.transpose());  // keep exact symmetry
  accum.noalias() += phi * (beta * pseudo_y);
  mean.noalias() = cov * accum / noise_var;

  if (!cov.allFinite() || !mean.allFinite()) {
    throw std::runtime_error("factor update: non-finite state after update");
  }
  log_det_precision += std::log1p(kappa2 / noise_var);
  ++update_count;
  return std::sqrt(kappa2);
}

SusceptibilityPosterior::SusceptibilityPosterior(int order, int rank,
                                                 std::vector<int> dims,
                                                 double noise_var,
                                                 std::uint64_t rng_seed,
                                                 Options opt)
    : order_(order), rank_(rank), dims_(std::move(dims)), noise_var_(noise_var), opt_(opt) {
  if (order_ < 1 || rank_ < 1) {
    throw std::invalid_argument("posterior: order and rank must be >= 1");
  }
  if (static_cast<int>(dims_.size()) != order_) {
    throw std::invalid_argument("posterior: dims size must equal order");
  }
  for (int d : dims_) {
    if (d < 1) throw std::invalid_argument("posterior: mode dimensions must be >= 1");
  }
  if (!(noise_var_ > 0.0)) {
    throw std::invalid_argument("posterior: noise variance must be positive");
  }

  Rng jitter_rng = stream_rng(rng_seed, {0x6a17});
  factors_.reserve(static_cast<std::size_t>(order_) * rank_);
  for (int l = 0; l < order_; ++l) {
    for (int r = 0; r < rank_; ++r) {
      FactorState f;
      f.mean = Vec::Ones(dims_[l]);
      if (opt_.jitter) {
        for (int i = 0; i < dims_[l]; ++i) {
          f.mean[i] += jitter_rng.uniform(-opt_.jitter_scale, opt_.jitter_scale);
        }
      }
      f.cov = Mat::Identity(dims_[l], dims_[l]);
      // Accumulator starts empty: the prior is zero-mean, the ones vector
      // only seeds the first beta evaluations.
      f.accum = Vec::Zero(dims_[l]);
      factors_.push_back(std::move(f));
    }
  }
}

int SusceptibilityPosterior::index(int l, int r) const {
  if (l < 0 || l >= order_ || r < 0 || r >= rank_) {
    throw std::out_of_range("posterior: factor index out of range");
  }
  return l * rank_ + r;
}

void SusceptibilityPosterior::check_context(const ContextTensor& x) const {
  if (x.order() != order_) {
    throw std::invalid_argument("context order does not match posterior order");
  }
  for (int l = 0; l < order_; ++l) {
    if (x.modes[l].size() != dims_[l]) {
      throw std::invalid_argument("context mode " + std::to_string(l) +
                                  " has wrong dimension");
    }
  }
}

void SusceptibilityPosterior::set_mean(int l, int r, const Vec& mean) {
  FactorState& f = factor(l, r);
  if (mean.size() != f.mean.size()) {
    throw std::invalid_argument("set_mean: dimension mismatch");
  }
  f.mean = mean;
}

std::vector<double> SusceptibilityPosterior::mode_dots(const ContextTensor& x) const {
  std::vector<double> dots(static_cast<std::size_t>(order_) * rank_);
  for (int l = 0; l < order_; ++l) {
    for (int r = 0; r < rank_; ++r) {
      dots[l * rank_ + r] = x.modes[l].dot(factors_[l * rank_ + r].mean);
    }
  }
  return dots;
}

double SusceptibilityPosterior::beta_from_dots(const std::vector<double>& dots,
                                               int order, int rank, int l, int r) {
  double prod = 1.0;
  for (int m = 0; m < order; ++m) {
    if (m == l) continue;
    prod *= dots[m * rank + r];
  }
  return prod;
}

double SusceptibilityPosterior::inner_product(const ContextTensor& x) const {
  check_context(x);
  std::vector<double> dots = mode_dots(x);
  double total = 0.0;
  for (int r = 0; r < rank_; ++r) {
    double term = 1.0;
    for (int l = 0; l < order_; ++l) term *= dots[l * rank_ + r];
    total += term;
  }
  return total;
}

double SusceptibilityPosterior::beta(const ContextTensor& x, int l, int r) const {
  check_context(x);
  index(l, r);  // range check
  std::vector<double> dots = mode_dots(x);
  return beta_from_dots(dots, order_, rank_, l, r);
}

double SusceptibilityPosterior::pseudo_response(const ContextTensor& x, double y,
                                                int l, int r) const {
  check_context(x);
  index(l, r);
  std::vector<double> dots = mode_dots(x);
  double correction = 0.0;
  for (int r2 = 0; r2 < rank_; ++r2) {
    if (r2 == r) continue;
    correction += dots[l * rank_ + r2] * beta_from_dots(dots, order_, rank_, l, r2);
  }
  return y - correction;
}

std::vector<double> SusceptibilityPosterior::absorb(const ContextTensor& x, double y) {
  check_context(x);
  if (!std::isfinite(y)) {
    throw std::runtime_error("absorb: non-finite response");
  }

  // Snapshot of the means at sample arrival: one accumulation pass, every
  // beta/pseudo-response evaluated on this snapshot, one rank-1 precision
  // term and one accumulator increment per factor.
  const std::vector<double> dots = mode_dots(x);
  std::vector<double> betas(dots.size());
  std::vector<double> pseudo(dots.size());
  for (int l = 0; l < order_; ++l) {
    for (int r = 0; r < rank_; ++r) {
      betas[l * rank_ + r] = beta_from_dots(dots, order_, rank_, l, r);
    }
  }
  for (int l = 0; l < order_; ++l) {
    for (int r = 0; r < rank_; ++r) {
      double correction = 0.0;
      for (int r2 = 0; r2 < rank_; ++r2) {
        if (r2 == r) continue;
        correction += dots[l * rank_ + r2] * betas[l * rank_ + r2];
      }
      pseudo[l * rank_ + r] = y - correction;
    }
  }

  std::vector<double> kappas(dots.size());
  for (int l = 0; l < order_; ++l) {
    for (int r = 0; r < rank_; ++r) {
      const int i = l * rank_ + r;
      kappas[i] = factors_[i].apply_update(x.modes[l], betas[i], pseudo[i], noise_var_);
    }
  }

  if (opt_.refresh_means) refresh_means();
  return kappas;
}

void SusceptibilityPosterior::refresh_means() {
  for (int sweep = 0; sweep < opt_.max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (FactorState& f : factors_) {
      if (f.update_count == 0) continue;  // keep warm-start means
      Vec updated = f.cov * f.accum / noise_var_;
      max_delta = std::max(max_delta, (updated - f.mean).lpNorm<Eigen::Infinity>());
      f.mean = std::move(updated);
    }
    if (max_delta < opt_.sweep_tolerance) break;
  }
}

Prediction SusceptibilityPosterior::predict(const ContextTensor& x) const {
  check_context(x);
  Prediction out;
  out.mean = inner_product(x);
  double var = noise_var_;
  const std::vector<double> dots = mode_dots(x);
  for (int l = 0; l < order_; ++l) {
    for (int r = 0; r < rank_; ++r) {
      const double b = beta_from_dots(dots, order_, rank_, l, r);
      const FactorState& f = factors_[l * rank_ + r];
      var += b * b * x.modes[l].dot(f.cov * x.modes[l]);
    }
  }
  out.variance = var;
  return out;
}

std::vector<double> SusceptibilityPosterior::confidence_terms(const ContextTensor& x) const {
  check_context(x);
  const std::vector<double> dots = mode_dots(x);
  std::vector<double> terms(dots.size());
  for (int l = 0; l < order_; ++l) {
    for (int r = 0; r < rank_; ++r) {
      const double b = beta_from_dots(dots, order_, rank_, l, r);
      const FactorState& f = factors_[l * rank_ + r];
      const double quad = b * b * x.modes[l].dot(f.cov * x.modes[l]);
      terms[l * rank_ + r] = std::sqrt(std::max(0.0, quad));
    }
  }
  return terms;
}

double SusceptibilityPosterior::max_mean_norm() const {
  double m = 0.0;
  for (const FactorState& f : factors_) m = std::max(m, f.mean.norm());
  return m;
}

namespace {

nlohmann::json vec_to_json(const Vec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const nlohmann::json& a) {
  Vec v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

}  // namespace

std::string SusceptibilityPosterior::to_json() const {
  nlohmann::json j;
  j["format"] = "tensorim.posterior";
  j["version"] = 1;
  j["order"] = order_;
  j["rank"] = rank_;
  j["dims"] = dims_;
  j["noise_variance"] = noise_var_;
  j["options"] = {{"jitter", opt_.jitter},
                  {"jitter_scale", opt_.jitter_scale},
                  {"sweep_tolerance", opt_.sweep_tolerance},
                  {"max_sweeps", opt_.max_sweeps},
                  {"refresh_means", opt_.refresh_means}};
  nlohmann::json grid = nlohmann::json::array();
  for (int l = 0; l < order_; ++l) {
    for (int r = 0; r < rank_; ++r) {
      const FactorState& f = factor(l, r);
      nlohmann::json cov = nlohmann::json::array();
      for (int a = 0; a < f.cov.rows(); ++a) {
        for (int b = 0; b < f.cov.cols(); ++b) cov.push_back(f.cov(a, b));
      }
      grid.push_back({{"mode", l},
                      {"rank", r},
                      {"mean", vec_to_json(f.mean)},
                      {"cov", std::move(cov)},
                      {"accum", vec_to_json(f.accum)},
                      {"log_det_precision", f.log_det_precision},
                      {"update_count", f.update_count}});
    }
  }
  j["factors"] = std::move(grid);
  return j.dump(2);
}

SusceptibilityPosterior SusceptibilityPosterior::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "tensorim.posterior" || j.value("version", 0) != 1) {
    throw std::runtime_error("posterior snapshot: unknown format or version");
  }
  Options opt;
  opt.jitter = j["options"]["jitter"].get<bool>();
  opt.jitter_scale = j["options"]["jitter_scale"].get<double>();
  opt.sweep_tolerance = j["options"]["sweep_tolerance"].get<double>();
  opt.max_sweeps = j["options"]["max_sweeps"].get<int>();
  opt.refresh_means = j["options"]["refresh_means"].get<bool>();

  SusceptibilityPosterior p(j["order"].get<int>(), j["rank"].get<int>(),
                            j["dims"].get<std::vector<int>>(),
                            j["noise_variance"].get<double>(), /*rng_seed=*/0, opt);
  for (const auto& fj : j["factors"]) {
    FactorState& f = p.factor(fj["mode"].get<int>(), fj["rank"].get<int>());
    f.mean = vec_from_json(fj["mean"]);
    f.accum = vec_from_json(fj["accum"]);
    const int d = f.dim();
    const auto& cov = fj["cov"];
    if (static_cast<int>(cov.size()) != d * d) {
      throw std::runtime_error("posterior snapshot: covariance size mismatch");
    }
    f.cov = Mat(d, d);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) f.cov(a, b) = cov[a * d + b].get<double>();
    }
    f.log_det_precision = fj["log_det_precision"].get<double>();
    f.update_count = fj["update_count"].get<std::int64_t>();
  }
  return p;
}

void SusceptibilityPosterior::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << to_json() << '\n';
}

SusceptibilityPosterior SusceptibilityPosterior::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace tucb
