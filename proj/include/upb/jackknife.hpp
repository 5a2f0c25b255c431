#pragma once

#include <span>

namespace upb::master {

struct Estimate {
  double mean = 0.0;
  double error = 0.0;
};

/// Leave-one-out jackknife of the sample mean. Needs at least 2 samples.
Estimate jackknife(std::span<const double> samples);

/// Jackknife of mean(pair) / mean(occupation)^2 over paired samples.
Estimate jackknife_g2(std::span<const double> pair, std::span<const double> occupation);

}  // namespace upb::master
