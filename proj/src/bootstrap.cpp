#include "sisgoal/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include <boost/math/distributions/normal.hpp>

namespace sisgoal {

Interval normal_ci(double point, double se, double level) {
  if (se < 0.0) throw std::invalid_argument("standard error must be non-negative");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
  const double z = level == 0.95
                       ? 1.96
                       : boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
  return {point - z * se, point + z * se};
}

TrimmedSummary trimmed_summary(std::span<const double> values, double lower_pct,
                               double upper_pct) {
  if (!(lower_pct >= 0.0 && lower_pct < upper_pct && upper_pct <= 100.0)) {
    throw std::invalid_argument("need 0 <= lower_pct < upper_pct <= 100");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  const auto drop_low = static_cast<std::size_t>(std::floor(n * lower_pct / 100.0));
  const auto drop_high = static_cast<std::size_t>(std::floor(n * (100.0 - upper_pct) / 100.0));
  if (drop_low + drop_high >= sorted.size()) throw std::invalid_argument("trimming leaves no values");

  const std::span<const double> kept(sorted.data() + drop_low, sorted.size() - drop_low - drop_high);
  TrimmedSummary s;
  s.retained = static_cast<Index>(kept.size());
  s.mean = std::accumulate(kept.begin(), kept.end(), 0.0) / static_cast<double>(kept.size());
  double ss = 0.0;
  for (double v : kept) ss += (v - s.mean) * (v - s.mean);
  s.sd = kept.size() > 1 ? std::sqrt(ss / static_cast<double>(kept.size() - 1)) : 0.0;
  s.min = kept.front();
  s.max = kept.back();
  return s;
}

std::vector<double> feature_inclusion(const std::vector<std::vector<bool>>& masks) {
  if (masks.empty()) throw std::invalid_argument("feature_inclusion needs at least one mask");
  std::vector<double> freq(masks.front().size(), 0.0);
  for (const auto& mask : masks) {
    if (mask.size() != freq.size()) throw std::invalid_argument("masks must have equal length");
    for (std::size_t j = 0; j < mask.size(); ++j) freq[j] += mask[j] ? 1.0 : 0.0;
  }
  for (double& f : freq) f /= static_cast<double>(masks.size());
  return freq;
}

Resampler multinomial_resampler(std::uint64_t seed) {
  return [seed](Index b, Index n) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
    std::uniform_int_distribution<Index> pick(0, n - 1);
    std::vector<Index> rows(static_cast<std::size_t>(n));
    for (auto& r : rows) r = pick(rng);
    return rows;
  };
}

BootstrapResult bootstrap_ate(const Dataset& d, const BootstrapOptions& options,
                              const Resampler& resampler) {
  if (options.B < 2) throw std::invalid_argument("bootstrap needs B >= 2");
  const Resampler draw = resampler ? resampler : multinomial_resampler(options.seed);

  BootstrapResult out;
  out.method = options.method;
  out.B = options.B;
  out.feature_names = d.feature_names;
  out.point = estimate_ate(d, options.method, options.grid, options.fit, options.exec).sample.ate;

  struct Draw {
    std::optional<double> ate;
    std::vector<bool> mask;
  };
  std::vector<Draw> draws(static_cast<std::size_t>(options.B));
  const bool parallel = options.exec == Execution::parallel;
#pragma omp parallel for schedule(dynamic) num_threads(worker_count()) if (parallel)
  for (Index b = 0; b < options.B; ++b) {
    try {
      const Dataset resample = d.select_rows(draw(b, d.n()));
      const PipelineEstimate est =
          estimate_ate(resample, options.method, options.grid, options.fit, Execution::serial);
      if (std::isfinite(est.sample.ate)) {
        draws[b].ate = est.sample.ate;
        draws[b].mask = est.tuning.best.selected_mask;
      }
    } catch (const std::exception&) {
      // counted as excluded below
    }
  }

  for (auto& dr : draws) {
    if (!dr.ate) {
      ++out.excluded;
      continue;
    }
    out.resample_ates.push_back(*dr.ate);
    out.masks.push_back(std::move(dr.mask));
  }
  if (out.resample_ates.size() < 2) {
    throw ConvergenceError("fewer than two bootstrap resamples succeeded");
  }
  const double count = static_cast<double>(out.resample_ates.size());
  out.boot_mean = std::accumulate(out.resample_ates.begin(), out.resample_ates.end(), 0.0) / count;
  double ss = 0.0;
  for (double v : out.resample_ates) ss += (v - out.boot_mean) * (v - out.boot_mean);
  out.se = std::sqrt(ss / (count - 1.0));
  out.bias = out.boot_mean - out.point;
  out.mse = out.bias * out.bias + out.se * out.se;
  out.ci = normal_ci(out.point, out.se);
  out.ci_length = out.ci.length();
  out.inclusion_freq = feature_inclusion(out.masks);
  return out;
}

}  // namespace sisgoal
