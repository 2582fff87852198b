#include "vnav/nn/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace vnav::nn {

ScalarLoss quantile_huber(double delta, double tau, double kappa) {
  const double weight = std::abs(tau - (delta < 0.0 ? 1.0 : 0.0));
  const double abs_delta = std::abs(delta);
  double huber, d_huber;
  if (abs_delta <= kappa) {
    huber = 0.5 * delta * delta;
    d_huber = delta;
  } else {
    huber = kappa * (abs_delta - 0.5 * kappa);
    d_huber = kappa * (delta > 0.0 ? 1.0 : -1.0);
  }
  return {weight * huber / kappa, weight * d_huber / kappa};
}

MatrixLoss iqn_loss(const Matrix& deltas, const std::vector<double>& taus, double kappa) {
  if (deltas.rows() != static_cast<int>(taus.size()))
    throw std::invalid_argument("iqn_loss: tau count must match delta rows");
  MatrixLoss result;
  result.grad = Matrix(deltas.rows(), deltas.cols());
  const double scale = 1.0 / deltas.cols();
  for (int i = 0; i < deltas.rows(); ++i) {
    for (int j = 0; j < deltas.cols(); ++j) {
      const ScalarLoss rho = quantile_huber(deltas(i, j), taus[i], kappa);
      result.loss += scale * rho.loss;
      result.grad(i, j) = scale * rho.d_loss;
    }
  }
  return result;
}

VectorLoss dqn_loss(const std::vector<double>& q_values, const std::vector<double>& targets) {
  if (q_values.size() != targets.size()) throw std::invalid_argument("dqn_loss: size mismatch");
  if (q_values.empty()) throw std::invalid_argument("dqn_loss: empty batch");
  VectorLoss result;
  result.grad.resize(q_values.size());
  const double scale = 1.0 / q_values.size();
  for (std::size_t i = 0; i < q_values.size(); ++i) {
    const double err = q_values[i] - targets[i];
    result.loss += scale * err * err;
    result.grad[i] = 2.0 * scale * err;
  }
  return result;
}

}  // namespace vnav::nn
