#pragma once

#include <random>
#include <vector>

#include "vnav/nn/matrix.hpp"

namespace vnav::nn {

// Fully connected layer y = W x + b, weights stored out x in.
struct Linear {
  Matrix weights;
  std::vector<double> bias;

  int in_dim() const { return weights.cols(); }
  int out_dim() const { return weights.rows(); }
};

struct LinearGrad {
  Matrix d_weights;
  std::vector<double> d_bias;
};

Linear make_linear(int in_dim, int out_dim, std::mt19937_64& rng);
LinearGrad make_linear_grad(const Linear& layer);

// input: batch x in -> batch x out
Matrix linear_forward(const Linear& layer, const Matrix& input);

// Accumulates parameter gradients, returns the input gradient.
Matrix linear_backward(const Linear& layer, const Matrix& input, const Matrix& upstream,
                       LinearGrad& grad);

// Elementwise max(0, x); backward masks where the pre-activation was <= 0.
Matrix relu(const Matrix& x);
Matrix relu_backward(const Matrix& pre_activation, const Matrix& upstream);

// Cosine quantile features: row k, column i = cos(pi * i * phi * tau_k),
// i = 0..num_features-1. Requires tau in [0,1] and phi in (0,1].
Matrix cosine_embedding(const std::vector<double>& taus, double phi, int num_features = 64);

}  // namespace vnav::nn
