#include "abo/gpi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace abo {

NominalValues NominalValues::geometric(ParamKind kind) {
  ParamBounds b = ParamBounds::of(kind);
  return {b.lo, std::sqrt(b.lo * b.hi), b.hi};
}

void GpiConfig::validate() const {
  if (kernel_set.empty()) throw ConfigError("gpi: kernel set must be non-empty");
  if (trial_threshold < 1) throw ConfigError("gpi: trial threshold must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ConfigError("gpi: test fraction must lie in (0, 1)");
  if (max_fixture_depth < 0 || max_fixture_depth > 2)
    throw ConfigError("gpi: fixture depth must be 0, 1 or 2");
  for (const auto& nv : nominals)
    if (!(nv.low > 0.0) || !(nv.mid > 0.0) || !(nv.high > 0.0))
      throw ConfigError("gpi: nominal fixture values must be positive");
}

namespace {

double nominal_value(const GpiConfig& config, KernelFamily family, int index,
                     int which) {
  const auto& nv =
      config.nominals[static_cast<std::size_t>(param_kind(family, index))];
  return which == 0 ? nv.low : which == 1 ? nv.mid : nv.high;
}

KernelSpec skeleton(KernelFamily family) {
  KernelSpec spec;
  spec.family = family;
  // start parameters at the geometric midpoints; fitting redraws anyway
  spec.params.c = NominalValues::geometric(ParamKind::C).mid;
  spec.params.lambda = NominalValues::geometric(ParamKind::Lambda).mid;
  spec.params.s2 = NominalValues::geometric(ParamKind::S2).mid;
  spec.params.alpha = NominalValues::geometric(ParamKind::Alpha).mid;
  return spec;
}

}  // namespace

std::vector<KernelSpec> enumerate_rlds(const GpiConfig& config) {
  config.validate();
  std::vector<KernelSpec> out;
  for (KernelFamily family : config.kernel_set) out.push_back(skeleton(family));

  if (config.max_fixture_depth >= 1) {
    for (KernelFamily family : config.kernel_set) {
      const int T = param_count(family);
      for (int t = 0; t < T; ++t) {
        for (int v = 0; v < 3; ++v) {
          KernelSpec spec = skeleton(family);
          spec.fixed[static_cast<std::size_t>(t)] =
              nominal_value(config, family, t, v);
          out.push_back(spec);
        }
      }
    }
  }
  if (config.max_fixture_depth >= 2) {
    for (KernelFamily family : config.kernel_set) {
      const int T = param_count(family);
      for (int t1 = 0; t1 < T; ++t1) {
        for (int t2 = t1 + 1; t2 < T; ++t2) {
          // first coordinate cycles fastest
          for (int v2 = 0; v2 < 3; ++v2) {
            for (int v1 = 0; v1 < 3; ++v1) {
              KernelSpec spec = skeleton(family);
              spec.fixed[static_cast<std::size_t>(t1)] =
                  nominal_value(config, family, t1, v1);
              spec.fixed[static_cast<std::size_t>(t2)] =
                  nominal_value(config, family, t2, v2);
              out.push_back(spec);
            }
          }
        }
      }
    }
  }
  return out;
}

GpiResult gpi_search(const Doe& train, const Doe& test, const GpiConfig& config,
                     RngStream& rng,
                     const std::optional<KernelSpec>& warm_start) {
  config.validate();
  train.validate();
  test.validate();

  std::vector<KernelSpec> trial_specs;
  if (warm_start) trial_specs.push_back(*warm_start);
  for (KernelSpec& spec : enumerate_rlds(config)) {
    if (warm_start && warm_start->same_domain(spec)) continue;
    trial_specs.push_back(std::move(spec));
  }

  std::optional<GpiResult> best;
  int trials = 0;
  for (const KernelSpec& candidate : trial_specs) {
    if (trials >= config.trial_threshold) break;
    ++trials;
    QualityScore score;
    std::shared_ptr<const Rpd> rpd;
    try {
      auto fitted = std::make_shared<const Rpd>(
          fit_mle(train, candidate, config.fit, rng));
      Vector preds(test.n());
      for (Index j = 0; j < test.n(); ++j)
        preds(j) = fitted->predict(test.X.row(j)).first;
      score.relmse = relmse(test.y, preds);
      score.tll = tll(test, *fitted);
      rpd = std::move(fitted);
    } catch (const Error&) {
      continue;  // failed trial still consumes budget
    }
    if (!best || prefers_second(best->score, score, config.relmse_threshold)) {
      best = GpiResult{rpd->spec(), score, trials, std::move(rpd)};
    }
    if (best && best->score.relmse < config.relmse_threshold) break;
  }
  if (!best)
    throw SurrogateUnavailableError("every surrogate trial failed to fit");
  best->trials_used = trials;
  return *best;
}

std::pair<Doe, Doe> split_train_test(const Doe& doe, double fraction,
                                     RngStream& rng) {
  doe.validate();
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ConfigError("split fraction must lie in (0, 1)");
  const Index n = doe.n();
  const Index n_test = static_cast<Index>(
      std::floor(fraction * static_cast<double>(n)));
  if (n_test < 1 || n - n_test < 1)
    throw DegenerateDataError("design too small to split");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::size_t j = rng.index_below(i + 1);
    std::swap(order[i], order[j]);
  }
  std::vector<Index> test_idx(order.begin(), order.begin() + n_test);
  std::vector<Index> train_idx(order.begin() + n_test, order.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  auto gather = [&](const std::vector<Index>& idx) {
    Doe part;
    part.X.resize(static_cast<Index>(idx.size()), doe.dim());
    part.y.resize(static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      part.X.row(static_cast<Index>(i)) = doe.X.row(idx[i]);
      part.y(static_cast<Index>(i)) = doe.y(idx[i]);
    }
    return part;
  };
  return {gather(train_idx), gather(test_idx)};
}

}  // namespace abo
