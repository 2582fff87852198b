#pragma once

#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include "vnav/world.hpp"

namespace vnav::train {

struct Transition {
  Observation state{};
  int action = 0;
  double reward = 0.0;
  Observation next_state{};
  bool terminal = false;
};

// Fixed-capacity ring buffer with FIFO eviction and uniform batch sampling
// without replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: zero capacity");
    storage_.reserve(capacity);
  }

  void push(const Transition& t) {
    if (storage_.size() < capacity_) {
      storage_.push_back(t);
    } else {
      storage_[cursor_] = t;
    }
    cursor_ = (cursor_ + 1) % capacity_;
  }

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return storage_[i]; }

  // Distinct uniform indices; requires batch_size <= size().
  std::vector<std::size_t> sample_indices(std::size_t batch_size, std::mt19937_64& rng) const {
    if (batch_size > storage_.size())
      throw std::invalid_argument("ReplayBuffer: batch larger than buffer");
    std::vector<std::size_t> picked;
    picked.reserve(batch_size);
    std::uniform_int_distribution<std::size_t> dist(0, storage_.size() - 1);
    while (picked.size() < batch_size) {
      const std::size_t idx = dist(rng);
      bool duplicate = false;
      for (std::size_t p : picked) {
        if (p == idx) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) picked.push_back(idx);
    }
    return picked;
  }

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> storage_;
};

}  // namespace vnav::train
