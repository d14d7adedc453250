#include "spinshell/numeric.hpp"

namespace spinshell {

MeanStd sample_mean_std(std::span<const double> values) {
  MeanStd result;
  const std::size_t n = values.size();
  if (n == 0) return result;

  CompensatedSum sum;
  for (double v : values) sum.add(v);
  result.mean = sum.value() / static_cast<double>(n);

  if (n < 2) return result;
  CompensatedSum sq;
  for (double v : values) {
    const double d = v - result.mean;
    sq.add(d * d);
  }
  result.stddev = std::sqrt(sq.value() / static_cast<double>(n - 1));
  return result;
}

}  // namespace spinshell
