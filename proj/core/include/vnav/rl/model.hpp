#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "vnav/nn/layers.hpp"
#include "vnav/world.hpp"

namespace vnav::rl {

enum class ModelKind { Dqn, Iqn };

// Observation encoders (ego 4->64, static 15->64, dynamic 20->64), a cosine
// quantile encoder (64 -> 192, IQN only), and a two-hidden-layer head
// (192 -> 128 -> 128 -> 9). Observation and quantile features are combined
// by elementwise product.
struct Model {
  ModelKind kind = ModelKind::Iqn;
  nn::Linear ego_encoder;
  nn::Linear static_encoder;
  nn::Linear dynamic_encoder;
  nn::Linear quantile_encoder;
  nn::Linear head1;
  nn::Linear head2;
  nn::Linear head3;
};

struct ModelGrad {
  nn::LinearGrad ego_encoder;
  nn::LinearGrad static_encoder;
  nn::LinearGrad dynamic_encoder;
  nn::LinearGrad quantile_encoder;
  nn::LinearGrad head1;
  nn::LinearGrad head2;
  nn::LinearGrad head3;
};

inline constexpr int kEgoInput = 4;
inline constexpr int kStaticInput = 15;
inline constexpr int kDynamicInput = 20;
inline constexpr int kEncoderWidth = 64;
inline constexpr int kFeatureWidth = 192;
inline constexpr int kQuantileFeatures = 64;
inline constexpr int kHeadWidth = 128;

Model make_model(ModelKind kind, std::mt19937_64& rng);
ModelGrad make_model_grad(const Model& model);

// Fixed parameter-tensor traversal order shared by the optimizer and the
// checkpoint format.
void visit_params(Model& model, const std::function<void(double*, std::size_t)>& fn);
void visit_params(const Model& model, const std::function<void(const double*, std::size_t)>& fn);
void visit_grads(ModelGrad& grad, const std::function<void(double*, std::size_t)>& fn);
std::size_t param_count(const Model& model);

std::vector<double> flatten_params(const Model& model);
void unflatten_params(Model& model, const std::vector<double>& flat);

// Intermediate activations kept for the backward pass.
struct ForwardCache {
  nn::Matrix ego_in, static_in, dynamic_in;
  nn::Matrix ego_pre, static_pre, dynamic_pre;
  nn::Matrix feature;  // n x 192
  nn::Matrix quantile_cos;                    // (n*K) x 64
  nn::Matrix quantile_pre, quantile_feature;  // (n*K) x 192
  nn::Matrix combined;                        // head input
  nn::Matrix head1_pre, head1_out, head2_pre, head2_out;
  int taus_per_sample = 1;
};

// Batched IQN forward: observations (n x 39) with taus_per_sample quantile
// samples each (taus.size() == n * taus_per_sample). Returns quantile
// returns, (n * taus_per_sample) x 9.
nn::Matrix iqn_forward_batch(const Model& model, const nn::Matrix& observations,
                             const std::vector<double>& taus, int taus_per_sample, double phi,
                             ForwardCache* cache = nullptr);

// DQN forward: n x 39 -> n x 9 action values.
nn::Matrix dqn_forward_batch(const Model& model, const nn::Matrix& observations,
                             ForwardCache* cache = nullptr);

void iqn_backward_batch(const Model& model, const ForwardCache& cache,
                        const nn::Matrix& upstream, ModelGrad& grad);
void dqn_backward_batch(const Model& model, const ForwardCache& cache,
                        const nn::Matrix& upstream, ModelGrad& grad);

// Single-observation conveniences.
nn::Matrix iqn_forward(const Model& model, const Observation& obs,
                       const std::vector<double>& taus, double phi);
std::vector<double> dqn_forward(const Model& model, const Observation& obs);

struct RiskConfig {
  enum class Mode { Greedy, Fixed, Adaptive };
  Mode mode = Mode::Greedy;
  double phi = 1.0;  // CVaR threshold, (0, 1]
  double d0 = 10.0;  // m, adaptive-mode distance scale
};

// Risk-distorted action selection: K tau samples from U[0,1], per-action
// mean of the distorted quantiles, argmax with lowest-index tie-break.
int iqn_select_action(const Model& model, const Observation& obs, double phi,
                      std::mt19937_64& rng, int num_tau_samples = 32);

int dqn_select_action(const Model& model, const Observation& obs);

// CVaR threshold from the distance to the nearest obstacle or robot:
// phi = min(d, d0) / d0, and 1.0 when nothing is detected.
double adaptive_cvar_threshold(const WorldView& view, double d0);

nn::Matrix observation_matrix(const Observation& obs);

}  // namespace vnav::rl
