// Ring buffer over the last M * c_eta chain states.  thinned_view() exposes
// the M past states theta_{k - j*c_eta}, j = 1..M, where k is the number of
// states pushed so far.

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace srld {

class HistoryWindow {
 public:
  HistoryWindow(Eigen::Index window_size, Eigen::Index thinning)
      : window_size_(window_size), thinning_(thinning) {
    if (window_size < 1 || thinning < 1)
      throw std::invalid_argument(
          "HistoryWindow: window size and thinning must be >= 1");
    slots_.resize(static_cast<std::size_t>(capacity()));
  }

  Eigen::Index capacity() const { return window_size_ * thinning_; }
  Eigen::Index window_size() const { return window_size_; }
  Eigen::Index thinning() const { return thinning_; }
  // number of states pushed so far == index of the next state
  Eigen::Index pushed() const { return pushed_; }
  bool full() const { return pushed_ >= capacity(); }

  void push(const Eigen::VectorXd& state) {
    slots_[static_cast<std::size_t>(pushed_ % capacity())] = state;
    ++pushed_;
  }

  // Fills out[j-1] = theta_{pushed - j * thinning}, j = 1..M (newest first).
  void thinned_into(std::vector<Eigen::VectorXd>& out) const {
    if (!full())
      throw std::logic_error(
          "HistoryWindow: thinned view requested with only " +
          std::to_string(pushed_) + " of " + std::to_string(capacity()) +
          " states collected");
    out.resize(static_cast<std::size_t>(window_size_));
    for (Eigen::Index j = 1; j <= window_size_; ++j)
      out[static_cast<std::size_t>(j - 1)] =
          slots_[static_cast<std::size_t>((pushed_ - j * thinning_) %
                                          capacity())];
  }

  std::vector<Eigen::VectorXd> thinned_view() const {
    std::vector<Eigen::VectorXd> out;
    thinned_into(out);
    return out;
  }

 private:
  Eigen::Index window_size_;
  Eigen::Index thinning_;
  Eigen::Index pushed_ = 0;
  std::vector<Eigen::VectorXd> slots_;
};

}  // namespace srld
