#include "upb/jackknife.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "upb/error.hpp"

namespace upb::master {
namespace {

const char* kModule = "master";

template <class Stat>
Estimate leave_one_out(std::size_t n, double full, Stat&& stat) {
  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) theta[i] = stat(i);
  const double bar = std::accumulate(theta.begin(), theta.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : theta) ss += (v - bar) * (v - bar);
  return {full, std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n) * ss)};
}

}  // namespace

Estimate jackknife(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw ValidationError(kModule, "jackknife needs at least 2 samples");
  const double sum = std::accumulate(samples.begin(), samples.end(), 0.0);
  const double m = static_cast<double>(n - 1);
  return leave_one_out(n, sum / static_cast<double>(n),
                       [&](std::size_t i) { return (sum - samples[i]) / m; });
}

Estimate jackknife_g2(std::span<const double> pair, std::span<const double> occupation) {
  const std::size_t n = pair.size();
  if (n != occupation.size()) throw ValidationError(kModule, "jackknife_g2: sample length mismatch");
  if (n < 2) throw ValidationError(kModule, "jackknife needs at least 2 samples");
  const double sp = std::accumulate(pair.begin(), pair.end(), 0.0);
  const double so = std::accumulate(occupation.begin(), occupation.end(), 0.0);
  if (!(so > 0.0)) throw UndefinedCorrelationError(kModule, "g2 undefined: zero mean occupation");
  const double nn = static_cast<double>(n);
  const double m = nn - 1.0;
  const double full = (sp / nn) / ((so / nn) * (so / nn));
  return leave_one_out(n, full, [&](std::size_t i) {
    const double o = (so - occupation[i]) / m;
    return ((sp - pair[i]) / m) / (o * o);
  });
}

}  // namespace upb::master
