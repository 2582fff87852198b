#include "vnav/rl/model.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace vnav::rl {

using nn::Matrix;

Model make_model(ModelKind kind, std::mt19937_64& rng) {
  Model m;
  m.kind = kind;
  m.ego_encoder = nn::make_linear(kEgoInput, kEncoderWidth, rng);
  m.static_encoder = nn::make_linear(kStaticInput, kEncoderWidth, rng);
  m.dynamic_encoder = nn::make_linear(kDynamicInput, kEncoderWidth, rng);
  if (kind == ModelKind::Iqn) {
    m.quantile_encoder = nn::make_linear(kQuantileFeatures, kFeatureWidth, rng);
  }
  m.head1 = nn::make_linear(kFeatureWidth, kHeadWidth, rng);
  m.head2 = nn::make_linear(kHeadWidth, kHeadWidth, rng);
  m.head3 = nn::make_linear(kHeadWidth, kNumActions, rng);
  return m;
}

ModelGrad make_model_grad(const Model& model) {
  ModelGrad g;
  g.ego_encoder = nn::make_linear_grad(model.ego_encoder);
  g.static_encoder = nn::make_linear_grad(model.static_encoder);
  g.dynamic_encoder = nn::make_linear_grad(model.dynamic_encoder);
  if (model.kind == ModelKind::Iqn) g.quantile_encoder = nn::make_linear_grad(model.quantile_encoder);
  g.head1 = nn::make_linear_grad(model.head1);
  g.head2 = nn::make_linear_grad(model.head2);
  g.head3 = nn::make_linear_grad(model.head3);
  return g;
}

namespace {

template <typename M, typename Fn>
void visit_impl(M& model, const Fn& fn) {
  auto layer = [&](auto& l) {
    fn(l.weights.data(), l.weights.size());
    fn(l.bias.data(), l.bias.size());
  };
  layer(model.ego_encoder);
  layer(model.static_encoder);
  layer(model.dynamic_encoder);
  if (model.kind == ModelKind::Iqn) layer(model.quantile_encoder);
  layer(model.head1);
  layer(model.head2);
  layer(model.head3);
}

}  // namespace

void visit_params(Model& model, const std::function<void(double*, std::size_t)>& fn) {
  visit_impl(model, fn);
}

void visit_params(const Model& model, const std::function<void(const double*, std::size_t)>& fn) {
  visit_impl(model, fn);
}

void visit_grads(ModelGrad& grad, const std::function<void(double*, std::size_t)>& fn) {
  auto layer = [&](nn::LinearGrad& g) {
    fn(g.d_weights.data(), g.d_weights.size());
    fn(g.d_bias.data(), g.d_bias.size());
  };
  layer(grad.ego_encoder);
  layer(grad.static_encoder);
  layer(grad.dynamic_encoder);
  if (grad.quantile_encoder.d_weights.size() > 0) layer(grad.quantile_encoder);
  layer(grad.head1);
  layer(grad.head2);
  layer(grad.head3);
}

std::size_t param_count(const Model& model) {
  std::size_t total = 0;
  visit_params(model, [&](const double*, std::size_t n) { total += n; });
  return total;
}

std::vector<double> flatten_params(const Model& model) {
  std::vector<double> flat;
  flat.reserve(param_count(model));
  visit_params(model, [&](const double* p, std::size_t n) { flat.insert(flat.end(), p, p + n); });
  return flat;
}

void unflatten_params(Model& model, const std::vector<double>& flat) {
  if (flat.size() != param_count(model))
    throw std::invalid_argument("unflatten_params: size mismatch");
  std::size_t offset = 0;
  visit_params(model, [&](double* p, std::size_t n) {
    std::memcpy(p, flat.data() + offset, n * sizeof(double));
    offset += n;
  });
}

namespace {

void split_observation(const Matrix& obs, Matrix& ego, Matrix& statics, Matrix& dynamics) {
  if (obs.cols() != kObservationSize)
    throw std::invalid_argument("observation length must be 39");
  const int n = obs.rows();
  ego = Matrix(n, kEgoInput);
  statics = Matrix(n, kStaticInput);
  dynamics = Matrix(n, kDynamicInput);
  for (int i = 0; i < n; ++i) {
    const double* row = obs.row(i);
    std::copy(row, row + kEgoInput, ego.row(i));
    std::copy(row + kEgoInput, row + kEgoInput + kStaticInput, statics.row(i));
    std::copy(row + kEgoInput + kStaticInput, row + kObservationSize, dynamics.row(i));
  }
}

// Shared encoder trunk: n x 39 -> n x 192 concatenated features.
Matrix encode_observations(const Model& model, const Matrix& obs, ForwardCache* cache) {
  Matrix ego, statics, dynamics;
  split_observation(obs, ego, statics, dynamics);

  Matrix ego_pre = nn::linear_forward(model.ego_encoder, ego);
  Matrix static_pre = nn::linear_forward(model.static_encoder, statics);
  Matrix dynamic_pre = nn::linear_forward(model.dynamic_encoder, dynamics);

  const int n = obs.rows();
  Matrix feature(n, kFeatureWidth);
  for (int i = 0; i < n; ++i) {
    double* out = feature.row(i);
    const double* e = ego_pre.row(i);
    const double* s = static_pre.row(i);
    const double* d = dynamic_pre.row(i);
    for (int j = 0; j < kEncoderWidth; ++j) out[j] = std::max(0.0, e[j]);
    for (int j = 0; j < kEncoderWidth; ++j) out[kEncoderWidth + j] = std::max(0.0, s[j]);
    for (int j = 0; j < kEncoderWidth; ++j) out[2 * kEncoderWidth + j] = std::max(0.0, d[j]);
  }

  if (cache) {
    cache->ego_in = std::move(ego);
    cache->static_in = std::move(statics);
    cache->dynamic_in = std::move(dynamics);
    cache->ego_pre = std::move(ego_pre);
    cache->static_pre = std::move(static_pre);
    cache->dynamic_pre = std::move(dynamic_pre);
    cache->feature = feature;
  }
  return feature;
}

Matrix run_head(const Model& model, const Matrix& combined, ForwardCache* cache) {
  Matrix h1_pre = nn::linear_forward(model.head1, combined);
  Matrix h1 = nn::relu(h1_pre);
  Matrix h2_pre = nn::linear_forward(model.head2, h1);
  Matrix h2 = nn::relu(h2_pre);
  Matrix out = nn::linear_forward(model.head3, h2);
  if (cache) {
    cache->combined = combined;
    cache->head1_pre = std::move(h1_pre);
    cache->head1_out = std::move(h1);
    cache->head2_pre = std::move(h2_pre);
    cache->head2_out = std::move(h2);
  }
  return out;
}

// Backward through the head; returns the gradient at the head input.
Matrix head_backward(const Model& model, const ForwardCache& cache, const Matrix& upstream,
                     ModelGrad& grad) {
  Matrix d_h2 = nn::linear_backward(model.head3, cache.head2_out, upstream, grad.head3);
  d_h2 = nn::relu_backward(cache.head2_pre, d_h2);
  Matrix d_h1 = nn::linear_backward(model.head2, cache.head1_out, d_h2, grad.head2);
  d_h1 = nn::relu_backward(cache.head1_pre, d_h1);
  return nn::linear_backward(model.head1, cache.combined, d_h1, grad.head1);
}

void encoders_backward(const Model& model, const ForwardCache& cache, const Matrix& d_feature,
                       ModelGrad& grad) {
  const int n = d_feature.rows();
  Matrix d_ego(n, kEncoderWidth), d_static(n, kEncoderWidth), d_dynamic(n, kEncoderWidth);
  for (int i = 0; i < n; ++i) {
    const double* df = d_feature.row(i);
    for (int j = 0; j < kEncoderWidth; ++j) {
      d_ego(i, j) = cache.ego_pre(i, j) > 0.0 ? df[j] : 0.0;
      d_static(i, j) = cache.static_pre(i, j) > 0.0 ? df[kEncoderWidth + j] : 0.0;
      d_dynamic(i, j) = cache.dynamic_pre(i, j) > 0.0 ? df[2 * kEncoderWidth + j] : 0.0;
    }
  }
  nn::linear_backward(model.ego_encoder, cache.ego_in, d_ego, grad.ego_encoder);
  nn::linear_backward(model.static_encoder, cache.static_in, d_static, grad.static_encoder);
  nn::linear_backward(model.dynamic_encoder, cache.dynamic_in, d_dynamic, grad.dynamic_encoder);
}

}  // namespace

nn::Matrix iqn_forward_batch(const Model& model, const Matrix& observations,
                             const std::vector<double>& taus, int taus_per_sample, double phi,
                             ForwardCache* cache) {
  if (model.kind != ModelKind::Iqn) throw std::invalid_argument("iqn_forward: not an IQN model");
  const int n = observations.rows();
  if (static_cast<int>(taus.size()) != n * taus_per_sample)
    throw std::invalid_argument("iqn_forward: tau count mismatch");
  for (double t : taus) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("iqn_forward: tau outside [0,1]");
  }

  const Matrix feature = encode_observations(model, observations, cache);

  const Matrix cos = nn::cosine_embedding(taus, phi, kQuantileFeatures);
  Matrix q_pre = nn::linear_forward(model.quantile_encoder, cos);
  Matrix q_feature = nn::relu(q_pre);

  const int rows = n * taus_per_sample;
  Matrix combined(rows, kFeatureWidth);
  for (int r = 0; r < rows; ++r) {
    const double* f = feature.row(r / taus_per_sample);
    const double* q = q_feature.row(r);
    double* out = combined.row(r);
    for (int j = 0; j < kFeatureWidth; ++j) out[j] = f[j] * q[j];
  }

  if (cache) {
    cache->taus_per_sample = taus_per_sample;
    cache->quantile_cos = cos;
    cache->quantile_pre = std::move(q_pre);
    cache->quantile_feature = q_feature;
  }
  return run_head(model, combined, cache);
}

nn::Matrix dqn_forward_batch(const Model& model, const Matrix& observations, ForwardCache* cache) {
  if (model.kind != ModelKind::Dqn) throw std::invalid_argument("dqn_forward: not a DQN model");
  const Matrix feature = encode_observations(model, observations, cache);
  if (cache) cache->taus_per_sample = 1;
  return run_head(model, feature, cache);
}

void iqn_backward_batch(const Model& model, const ForwardCache& cache, const Matrix& upstream,
                        ModelGrad& grad) {
  const Matrix d_combined = head_backward(model, cache, upstream, grad);

  const int K = cache.taus_per_sample;
  const int n = d_combined.rows() / K;
  Matrix d_feature(n, kFeatureWidth);
  Matrix d_qf(d_combined.rows(), kFeatureWidth);
  for (int r = 0; r < d_combined.rows(); ++r) {
    const double* dc = d_combined.row(r);
    const double* q = cache.quantile_feature.row(r);
    const double* f = cache.feature.row(r / K);
    double* df = d_feature.row(r / K);
    double* dq = d_qf.row(r);
    for (int j = 0; j < kFeatureWidth; ++j) {
      df[j] += dc[j] * q[j];
      dq[j] = dc[j] * f[j];
    }
  }
  const Matrix d_qpre = nn::relu_backward(cache.quantile_pre, d_qf);
  nn::linear_backward(model.quantile_encoder, cache.quantile_cos, d_qpre, grad.quantile_encoder);

  encoders_backward(model, cache, d_feature, grad);
}

void dqn_backward_batch(const Model& model, const ForwardCache& cache, const Matrix& upstream,
                        ModelGrad& grad) {
  const Matrix d_feature = head_backward(model, cache, upstream, grad);
  encoders_backward(model, cache, d_feature, grad);
}

nn::Matrix observation_matrix(const Observation& obs) {
  Matrix m(1, kObservationSize);
  std::copy(obs.begin(), obs.end(), m.row(0));
  return m;
}

nn::Matrix iqn_forward(const Model& model, const Observation& obs,
                       const std::vector<double>& taus, double phi) {
  return iqn_forward_batch(model, observation_matrix(obs), taus,
                           static_cast<int>(taus.size()), phi);
}

std::vector<double> dqn_forward(const Model& model, const Observation& obs) {
  const Matrix out = dqn_forward_batch(model, observation_matrix(obs));
  return std::vector<double>(out.row(0), out.row(0) + kNumActions);
}

int iqn_select_action(const Model& model, const Observation& obs, double phi,
                      std::mt19937_64& rng, int num_tau_samples) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> taus(num_tau_samples);
  for (double& t : taus) t = unit(rng);

  const Matrix z = iqn_forward(model, obs, taus, phi);
  std::array<double, kNumActions> mean{};
  for (int k = 0; k < z.rows(); ++k) {
    for (int a = 0; a < kNumActions; ++a) mean[a] += z(k, a);
  }
  int best = 0;
  for (int a = 1; a < kNumActions; ++a) {
    if (mean[a] > mean[best]) best = a;
  }
  return best;
}

int dqn_select_action(const Model& model, const Observation& obs) {
  const std::vector<double> q = dqn_forward(model, obs);
  int best = 0;
  for (int a = 1; a < kNumActions; ++a) {
    if (q[a] > q[best]) best = a;
  }
  return best;
}

double adaptive_cvar_threshold(const WorldView& view, double d0) {
  double min_dist = std::numeric_limits<double>::infinity();
  for (const auto& o : view.statics) min_dist = std::min(min_dist, (o.center - view.position).norm());
  for (const auto& d : view.dynamics) min_dist = std::min(min_dist, (d.position - view.position).norm());
  if (!std::isfinite(min_dist) || min_dist > d0) return 1.0;
  return std::max(min_dist / d0, 1e-6);
}

}  // namespace vnav::rl
