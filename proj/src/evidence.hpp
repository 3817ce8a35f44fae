#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "trustlens/checkers.hpp"

namespace trustlens::detail {

// Keeps the n highest-valued evidence items; equal values keep corpus order.
class TopEvidence {
 public:
  explicit TopEvidence(std::size_t n) : n_(n) {}

  void offer(Evidence e) {
    if (n_ == 0) return;
    items_.push_back(std::move(e));
    if (items_.size() > 4 * n_ + 64) prune();
  }

  std::vector<Evidence> take() {
    prune();
    return std::move(items_);
  }

 private:
  void prune() {
    std::stable_sort(items_.begin(), items_.end(), [](const Evidence& a, const Evidence& b) {
      if (a.value != b.value) return a.value > b.value;
      return a.locator < b.locator;
    });
    if (items_.size() > n_) items_.resize(n_);
  }

  std::size_t n_;
  std::vector<Evidence> items_;
};

}  // namespace trustlens::detail
