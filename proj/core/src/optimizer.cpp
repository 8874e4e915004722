#include "abo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace abo {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::BO:
      return "bo";
    case Variant::BO_GPi:
      return "bo-gpi";
    case Variant::BO_Ada:
      return "bo-ada";
    case Variant::BO_iAda:
      return "bo-iada";
    case Variant::BO_GPi_Ada:
      return "bo-gpi-ada";
    case Variant::BO_GPi_iAda:
      return "bo-gpi-iada";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "bo") return Variant::BO;
  if (name == "bo-gpi") return Variant::BO_GPi;
  if (name == "bo-ada") return Variant::BO_Ada;
  if (name == "bo-iada") return Variant::BO_iAda;
  if (name == "bo-gpi-ada") return Variant::BO_GPi_Ada;
  if (name == "bo-gpi-iada") return Variant::BO_GPi_iAda;
  throw ConfigError("unknown optimizer variant: " + name);
}

bool variant_uses_gpi(Variant v) {
  return v == Variant::BO_GPi || v == Variant::BO_GPi_Ada ||
         v == Variant::BO_GPi_iAda;
}

bool variant_uses_portfolio(Variant v) {
  return v == Variant::BO_Ada || v == Variant::BO_iAda ||
         v == Variant::BO_GPi_Ada || v == Variant::BO_GPi_iAda;
}

bool variant_uses_es_filter(Variant v) {
  return v == Variant::BO_iAda || v == Variant::BO_GPi_iAda;
}

bool GpiCondition::due(int iteration, int last_event,
                       int since_improvement) const {
  switch (mode) {
    case Mode::Periodic:
      return (iteration - 1) % period == 0;
    case Mode::OnStagnation:
      return iteration - last_event >= 1 && since_improvement >= stagnation;
    case Mode::Never:
      return false;
  }
  return false;
}

GpiCondition GpiCondition::periodic(int period) {
  GpiCondition c;
  c.mode = Mode::Periodic;
  c.period = std::max(period, 1);
  return c;
}

GpiCondition GpiCondition::on_stagnation(int k) {
  GpiCondition c;
  c.mode = Mode::OnStagnation;
  c.stagnation = std::max(k, 1);
  return c;
}

GpiCondition GpiCondition::never() {
  GpiCondition c;
  c.mode = Mode::Never;
  return c;
}

void OptimizerConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations: must be >= 1");
  if (acquisitions.empty())
    throw ConfigError("acquisitions: at least one acquisition required");
  for (const Acquisition& a : acquisitions) a.validate();
  if (!variant_uses_portfolio(variant) && acquisitions.size() != 1)
    throw ConfigError(
        "acquisitions: single-acquisition variants take exactly one");
  if (!variant_uses_gpi(variant)) kernel.validate();
  gpi.validate();
}

std::string OptimizerConfig::display_label() const {
  if (!label.empty()) return label;
  std::ostringstream os;
  switch (variant) {
    case Variant::BO:
      os << "BO(" << kernel.domain_label() << "," << acquisitions[0].label()
         << ")";
      break;
    case Variant::BO_GPi:
      os << "BO-GPi(" << acquisitions[0].label() << ")";
      break;
    case Variant::BO_Ada:
    case Variant::BO_iAda:
      os << (variant == Variant::BO_Ada ? "BO-Ada(" : "BO-iAda(")
         << kernel.domain_label() << ","
         << (selection == SelectionStrategy::Uniform ? "SelU" : "SelCat")
         << ")";
      break;
    case Variant::BO_GPi_Ada:
    case Variant::BO_GPi_iAda:
      os << (variant == Variant::BO_GPi_Ada ? "BO-GPi-Ada(" : "BO-GPi-iAda(")
         << (selection == SelectionStrategy::Uniform ? "SelU" : "SelCat")
         << ")";
      break;
  }
  return os.str();
}

namespace {
void put(std::ostringstream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf << ";";
}
}  // namespace

std::string OptimizerConfig::canonical_string() const {
  std::ostringstream os;
  os << "variant=" << variant_name(variant) << ";";
  os << "kernel=" << kernel.domain_label() << ";";
  put(os, kernel.params.c);
  put(os, kernel.params.lambda);
  put(os, kernel.params.s2);
  put(os, kernel.params.alpha);
  os << "acq=";
  for (const Acquisition& a : acquisitions) {
    os << a.label() << ",";
  }
  os << ";sel="
     << (selection == SelectionStrategy::Uniform ? "uniform" : "categorical")
     << ";";
  os << "gpi=";
  for (KernelFamily f : gpi.kernel_set) os << family_name(f) << ",";
  os << "|d" << gpi.max_fixture_depth << "|q" << gpi.trial_threshold << "|";
  put(os, gpi.relmse_threshold);
  put(os, gpi.test_fraction);
  for (const auto& nv : gpi.nominals) {
    put(os, nv.low);
    put(os, nv.mid);
    put(os, nv.high);
  }
  os << "fit=" << gpi.fit.restarts << "," << gpi.fit.max_iterations << ",";
  put(os, gpi.fit.rel_tolerance);
  os << "cond=" << static_cast<int>(gpi_condition.mode) << ","
     << gpi_condition.period << "," << gpi_condition.stagnation << ";";
  os << "es=";
  if (es_schedule.is_explicit()) {
    for (double v : es_schedule.values()) put(os, v);
  } else {
    put(os, es_schedule.start());
    put(os, es_schedule.end());
    os << es_schedule.length() << ";";
  }
  os << "budget=" << acq_budget.seed_count << "," << acq_budget.refine_top
     << "," << acq_budget.refine_steps << ",";
  put(os, acq_budget.initial_step);
  os << "iters=" << iterations << ";";
  return os.str();
}

std::uint64_t OptimizerConfig::digest() const {
  return fnv1a64(canonical_string());
}

std::pair<Vector, double> recommend(const RunHistory& history) {
  if (history.initial.n() < 1 && history.records.empty())
    throw DegenerateDataError("recommendation over an empty history");
  Vector best_x;
  double best_y = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < history.initial.n(); ++i) {
    if (history.initial.y(i) < best_y) {
      best_y = history.initial.y(i);
      best_x = history.initial.X.row(i);
    }
  }
  for (const IterationRecord& rec : history.records) {
    if (rec.y < best_y) {
      best_y = rec.y;
      best_x = rec.x;
    }
  }
  return {best_x, best_y};
}

namespace {

struct Engine {
  const ObjectiveFn& objective;
  const OptimizerConfig& config;

  RunHistory run(const Doe& initial, const Doe& test) {
    config.validate();
    initial.validate();
    const bool uses_gpi = variant_uses_gpi(config.variant);
    const bool uses_filter = variant_uses_es_filter(config.variant);
    const bool categorical =
        variant_uses_portfolio(config.variant) &&
        config.selection == SelectionStrategy::Categorical;
    const int n_acq = static_cast<int>(config.acquisitions.size());
    const std::uint64_t seed = config.seed;

    Doe data = Doe::concat(initial, test.n() > 0 ? test : Doe{Matrix(0, initial.dim()), Vector(0)});
    RunHistory history;
    history.initial = data;

    double incumbent = data.y.minCoeff();
    CatState cat = CatState::uniform(n_acq);
    KernelSpec retained = config.kernel;
    bool have_domain = !uses_gpi;
    int last_event = 0;
    int since_improvement = 0;

    for (int i = 1; i <= config.iterations; ++i) {
      IterationRecord rec;
      Rpd rpd;
      try {
        const bool event =
            uses_gpi &&
            (i == 1 ||
             config.gpi_condition.due(i, last_event, since_improvement));
        if (event) {
          Doe train, held;
          if (i == 1 && test.n() > 0) {
            train = initial;
            held = test;
          } else {
            RngStream split_rng(seed, "split", static_cast<std::uint64_t>(i));
            std::tie(train, held) =
                split_train_test(data, config.gpi.test_fraction, split_rng);
          }
          RngStream gpi_rng(seed, "gpi", static_cast<std::uint64_t>(i));
          GpiResult result = gpi_search(
              train, held, config.gpi, gpi_rng,
              have_domain ? std::optional<KernelSpec>(retained) : std::nullopt);
          retained = result.spec;
          have_domain = true;
          last_event = i;
          rec.gpi_event = true;
          rpd = *result.rpd;  // the searched surrogate drives this iteration
        } else {
          RngStream mle_rng(seed, "mle", static_cast<std::uint64_t>(i));
          rpd = fit_mle(data, retained, config.gpi.fit, mle_rng);
        }
      } catch (const Error& e) {
        history.aborted = true;
        history.abort_reason = e.what();
        break;
      }

      std::vector<Candidate> candidates;
      candidates.reserve(static_cast<std::size_t>(n_acq));
      for (int a = 0; a < n_acq; ++a) {
        RngStream acq_rng(seed, "acq",
                          (static_cast<std::uint64_t>(i) << 16) |
                              static_cast<std::uint64_t>(a));
        Candidate c;
        c.x = acq_maximize(config.acquisitions[static_cast<std::size_t>(a)],
                           rpd, incumbent, config.acq_budget, acq_rng);
        c.acq_index = a;
        candidates.push_back(std::move(c));
      }

      std::vector<Candidate> surviving;
      if (uses_filter) {
        const double threshold = config.es_schedule.at(i);
        surviving = filter_candidates(candidates, data.X, threshold);
        for (const Candidate& c : candidates)
          rec.candidate_es.push_back(exploitation_score(c.x, data.X));
      } else {
        surviving = candidates;
      }

      std::size_t pick = 0;
      if (surviving.size() > 1) {
        RngStream sel_rng(seed, "sel", static_cast<std::uint64_t>(i));
        pick = categorical ? sel_cat(surviving, cat, sel_rng)
                           : sel_uniform(surviving, sel_rng);
      }
      const Candidate& chosen = surviving[pick];

      double y;
      try {
        y = objective(chosen.x);
        if (!std::isfinite(y))
          throw EvaluationError("objective returned a non-finite value");
      } catch (const std::exception& e) {
        history.aborted = true;
        history.abort_reason = e.what();
        break;
      }

      const bool improved = y <= incumbent;
      incumbent = std::min(incumbent, y);
      since_improvement = improved ? 0 : since_improvement + 1;
      data.append(chosen.x, y);
      if (categorical) cat = cat_update(std::move(cat), chosen.acq_index, improved);

      rec.x = chosen.x;
      rec.y = y;
      rec.incumbent = incumbent;
      rec.acq_index = chosen.acq_index;
      history.records.push_back(std::move(rec));
    }

    if (history.initial.n() > 0 || !history.records.empty()) {
      auto [x_rec, y_rec] = recommend(history);
      history.x_rec = x_rec;
      history.y_rec = y_rec;
    }
    return history;
  }
};

}  // namespace

RunHistory run_bo(const ObjectiveFn& objective, const Doe& initial,
                  const OptimizerConfig& config) {
  if (variant_uses_gpi(config.variant) || variant_uses_portfolio(config.variant))
    throw ConfigError("run_bo drives the standard variant only");
  Engine engine{objective, config};
  Doe empty{Matrix(0, initial.dim()), Vector(0)};
  return engine.run(initial, empty);
}

RunHistory run_adaptive_bo(const ObjectiveFn& objective, const Doe& initial,
                           const Doe& test, const OptimizerConfig& config) {
  Engine engine{objective, config};
  return engine.run(initial, test);
}

}  // namespace abo
