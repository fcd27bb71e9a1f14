#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace frontlab {

/// Largest system size the library is instantiated for.
inline constexpr int kMaxDim = 2;

/// A point in state space. Dynamic size with a fixed upper bound, no heap use.
using State = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// Small dense matrix (Jacobians, eigenvector bases).
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                             kMaxDim, kMaxDim>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline State scalar_state(double u) {
  State s(1);
  s(0) = u;
  return s;
}

inline State pair_state(double a, double b) {
  State s(2);
  s(0) = a;
  s(1) = b;
  return s;
}

/// Euclidean distance between states; every L1 and TV quantity uses this norm.
inline double distance(const State& a, const State& b) { return (a - b).norm(); }

}  // namespace frontlab
