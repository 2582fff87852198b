#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vnav::nn {

// Bias-corrected adaptive-moment optimizer over one flat parameter vector.
class Adam {
 public:
  explicit Adam(double learning_rate = 1e-4, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  void step(std::span<double> params, std::span<const double> grads);

  std::int64_t step_count() const { return step_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::int64_t step_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace vnav::nn
