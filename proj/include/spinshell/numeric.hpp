#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace spinshell {

/// Neumaier-compensated accumulator. Used wherever a sum feeds a tight
/// tolerance (Page's finite sum, sample statistics), and wherever the
/// summation order is part of the determinism contract.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n-1); 0 when n < 2
};

/// Two-pass compensated mean and sample standard deviation. The reduction
/// order is fixed by the element order, so results do not depend on how the
/// values were produced (e.g. by how many worker threads).
MeanStd sample_mean_std(std::span<const double> values);

}  // namespace spinshell
