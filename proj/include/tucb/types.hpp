#pragma once

#include <Eigen/Dense>
#include <vector>

namespace tucb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// node id -> feature vector
using FeatureTable = std::vector<Vec>;

// Scale a feature vector so that ||v||_2 <= 1 (ingestion normalization).
inline Vec clamp_norm(Vec v) {
  double n = v.norm();
  if (n > 1.0) v /= n;
  return v;
}

}  // namespace tucb
