#include "sisgoal/pipeline.hpp"

#include <algorithm>

namespace sisgoal {

PreparedFeatures prepare_features(const Dataset& raw, const PrepareOptions& options) {
  raw.validate();
  FeatureFilterResult nonconstant = drop_constant_features(raw);
  std::vector<Index> original;  // column in raw for each non-constant feature
  for (const auto& m : nonconstant.features) {
    if (m.kept) original.push_back(m.index);
  }
  const Dataset& d = nonconstant.data;
  if (d.p() == 0) throw DataError("no non-constant features");

  const Index q = std::min(options.q.value_or(screening_size(d.n())), d.p());
  if (q < 1) throw std::invalid_argument("screening size must be positive");

  PreparedFeatures out;
  out.features = std::move(nonconstant.features);
  out.screening = sis_screen(d, q, options.exec);

  std::vector<bool> screened(static_cast<std::size_t>(d.p()), false);
  for (Index j : out.screening.selected) screened[j] = true;
  for (Index j = 0; j < d.p(); ++j) {
    if (!screened[j]) out.features[original[j]].kept = false;
  }

  std::vector<Index> kept = out.screening.selected;
  if (options.cutoff) {
    const FeatureFilterResult filtered =
        correlation_filter(standardize(d.select_features(kept)), *options.cutoff);
    std::vector<Index> survivors;
    for (std::size_t k = 0; k < kept.size(); ++k) {
      if (filtered.features[k].kept) {
        survivors.push_back(kept[k]);
      } else {
        auto& meta = out.features[original[kept[k]]];
        meta.kept = false;
        meta.removal_reason = RemovalReason::redundant_correlation;
      }
    }
    kept = std::move(survivors);
  }
  out.data = d.select_features(kept);
  return out;
}

PipelineEstimate estimate_ate(const Dataset& d, Method method, const TuningGrid& grid,
                              const PropensityOptions& options, Execution exec) {
  d.validate();
  const Dataset z = standardize(d);
  PipelineEstimate est;
  est.outcome = fit_outcome(z);
  est.tuning = select_by_wamd(z.X, z.A, est.outcome, grid, method, options, exec);
  const SelectionResult& best = est.tuning.best;
  est.sample.pi = propensity(best.alpha, best.intercept, z.X, options.clip);
  est.sample.tau = iptw_weights(z.A, est.sample.pi);
  est.sample.ate = ate_iptw(z.Y, z.A, est.sample.tau);
  est.sample.wamd = best.wamd;
  est.positivity = positivity_report(est.sample.pi, z.A, options.clip);
  return est;
}

}  // namespace sisgoal
