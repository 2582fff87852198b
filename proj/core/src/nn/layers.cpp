#include "vnav/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace vnav::nn {

Linear make_linear(int in_dim, int out_dim, std::mt19937_64& rng) {
  Linear layer;
  layer.weights = Matrix(out_dim, in_dim);
  layer.bias.assign(out_dim, 0.0);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (std::size_t i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = dist(rng);
  return layer;
}

LinearGrad make_linear_grad(const Linear& layer) {
  return {Matrix(layer.weights.rows(), layer.weights.cols()),
          std::vector<double>(layer.bias.size(), 0.0)};
}

Matrix linear_forward(const Linear& layer, const Matrix& input) {
  if (input.cols() != layer.in_dim()) throw std::invalid_argument("linear_forward: shape");
  Matrix out = matmul(input, layer.weights, false, true);  // batch x out
  for (int i = 0; i < out.rows(); ++i) {
    double* row = out.row(i);
    for (int j = 0; j < out.cols(); ++j) row[j] += layer.bias[j];
  }
  return out;
}

Matrix linear_backward(const Linear& layer, const Matrix& input, const Matrix& upstream,
                       LinearGrad& grad) {
  if (upstream.rows() != input.rows() || upstream.cols() != layer.out_dim() ||
      input.cols() != layer.in_dim())
    throw std::invalid_argument("linear_backward: shape");
  matmul_accumulate(upstream, input, grad.d_weights, true, false);  // out x in
  for (int i = 0; i < upstream.rows(); ++i) {
    const double* row = upstream.row(i);
    for (int j = 0; j < upstream.cols(); ++j) grad.d_bias[j] += row[j];
  }
  return matmul(upstream, layer.weights);  // batch x in
}

Matrix relu(const Matrix& x) {
  Matrix out = x;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.data()[i] < 0.0) out.data()[i] = 0.0;
  }
  return out;
}

Matrix relu_backward(const Matrix& pre_activation, const Matrix& upstream) {
  Matrix out = upstream;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (pre_activation.data()[i] <= 0.0) out.data()[i] = 0.0;
  }
  return out;
}

Matrix cosine_embedding(const std::vector<double>& taus, double phi, int num_features) {
  if (!(phi > 0.0 && phi <= 1.0)) throw std::domain_error("cosine_embedding: phi not in (0,1]");
  for (const double tau : taus) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::domain_error("cosine_embedding: tau not in [0,1]");
  }
  Matrix out(static_cast<int>(taus.size()), num_features);
  for (int k = 0; k < out.rows(); ++k) {
    const double scaled = phi * taus[k];
    double* row = out.row(k);
    for (int i = 0; i < num_features; ++i) row[i] = std::cos(M_PI * i * scaled);
  }
  return out;
}

}  // namespace vnav::nn
