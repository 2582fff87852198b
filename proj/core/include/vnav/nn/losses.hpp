#pragma once

#include <vector>

#include "vnav/nn/matrix.hpp"

namespace vnav::nn {

struct ScalarLoss {
  double loss = 0.0;
  double d_loss = 0.0;  // derivative w.r.t. the residual
};

// Huber-smoothed pinball loss rho_tau^kappa(u) and its derivative in u.
ScalarLoss quantile_huber(double delta, double tau, double kappa = 1.0);

struct MatrixLoss {
  double loss = 0.0;
  Matrix grad;
};

// (1/N') sum_ij rho_{tau_i}(delta_ij) over an N x N' residual matrix.
MatrixLoss iqn_loss(const Matrix& deltas, const std::vector<double>& taus, double kappa = 1.0);

struct VectorLoss {
  double loss = 0.0;
  std::vector<double> grad;
};

// Mean squared error over taken-action Q values.
VectorLoss dqn_loss(const std::vector<double>& q_values, const std::vector<double>& targets);

}  // namespace vnav::nn
