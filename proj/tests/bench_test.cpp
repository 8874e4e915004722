#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "abo/bench.hpp"
#include "oracles.hpp"

using namespace abo;

namespace {

OptimizerConfig tiny_config(Variant variant) {
  OptimizerConfig config;
  config.variant = variant;
  config.kernel.family = KernelFamily::Matern32;
  config.kernel.params.s2 = 0.01;
  config.iterations = 3;
  config.es_schedule = EsSchedule::linear(0.5, 2.0, 3);
  config.gpi.fit.restarts = 2;
  config.gpi.trial_threshold = 3;
  config.acq_budget.seed_count = 64;
  config.acq_budget.refine_steps = 10;
  if (variant_uses_portfolio(variant))
    config.acquisitions = {{AcquisitionKind::LogEI, 2.0},
                           {AcquisitionKind::UCB, 2.0}};
  return config;
}

RunHistory synthetic_history(std::initializer_list<double> incumbents) {
  RunHistory history;
  history.initial.X = Matrix::Constant(2, 1, 0.5);
  history.initial.X(1, 0) = 0.25;
  history.initial.y.resize(2);
  history.initial.y << 5.0, 4.0;
  int i = 0;
  for (double v : incumbents) {
    IterationRecord rec;
    rec.x = Vector::Constant(1, 0.1 * ++i);
    rec.y = v;
    rec.incumbent = v;
    history.records.push_back(rec);
  }
  history.x_rec = history.records.back().x;
  history.y_rec = history.records.back().incumbent;
  return history;
}

}  // namespace

TEST_CASE("synthetic objective worked values") {
  SyntheticObjective sphere{SyntheticObjective::Name::Sphere, 3};
  CHECK(objective_eval(sphere, Vector::Constant(3, 0.5)) == 0.0);
  CHECK(objective_eval(sphere, Vector::Constant(3, 0.1)) > 0.0);

  // grid-search oracle for the one-dimensional multimodal objective
  SyntheticObjective alpine1{SyntheticObjective::Name::AlpineN2, 1};
  auto [x_star, f_star] = oracles::grid_min_1d(0.0, 10.0, 200001, [](double x) {
    return -std::sqrt(x) * std::sin(x);
  });
  Vector u_star = Vector::Constant(1, x_star / 10.0);
  CHECK(objective_eval(alpine1, u_star) == doctest::Approx(f_star).epsilon(1e-9));
  CHECK(f_star == doctest::Approx(-2.8081).epsilon(1e-4));

  SyntheticObjective alpine3{SyntheticObjective::Name::AlpineN2, 3};
  Vector u3 = Vector::Constant(3, x_star / 10.0);
  CHECK(objective_eval(alpine3, u3) ==
        doctest::Approx(-std::pow(-f_star, 3)).epsilon(1e-6));
  CHECK(objective_eval(alpine3, u3) == doctest::Approx(-22.1438).epsilon(1e-3));

  // domain edge: any zero coordinate annihilates the product
  Vector edge = Vector::Constant(3, 0.4);
  edge(1) = 0.0;
  CHECK(objective_eval(alpine3, edge) == 0.0);

  CHECK(alpine3.lower_bound() < -22.15);
  CHECK(sphere.lower_bound() == 0.0);
}

TEST_CASE("quantile convention") {
  CHECK(quantile_linear({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile_linear({1, 2, 3}, 0.5) == 2.0);
  CHECK(quantile_linear({3, 1, 2}, 0.0) == 1.0);
  CHECK(quantile_linear({3, 1, 2}, 1.0) == 3.0);
  CHECK(quantile_linear({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
}

TEST_CASE("quartile curves from known histories") {
  RunEnsemble ensemble;
  ensemble.config = tiny_config(Variant::BO);
  ensemble.config.iterations = 3;
  ensemble.histories.push_back(synthetic_history({3.0, 2.0, 1.0}));
  ensemble.histories.push_back(synthetic_history({5.0, 4.0, 3.0}));
  ensemble.seeds = {1, 2};

  Matrix q = quartile_curves(ensemble);
  CHECK(q.rows() == 5);
  CHECK(q.cols() == 3);
  CHECK(q(0, 0) == 3.0);   // min
  CHECK(q(4, 0) == 5.0);   // max
  CHECK(q(2, 0) == 4.0);   // midpoint of the pair
  for (int k = 0; k < 5; ++k)
    for (int i = 1; i < 3; ++i) CHECK(q(k, i) <= q(k, i - 1));

  // identical histories collapse all five curves
  RunEnsemble same;
  same.config = ensemble.config;
  same.histories.push_back(synthetic_history({2.0, 1.5, 1.0}));
  same.histories.push_back(synthetic_history({2.0, 1.5, 1.0}));
  Matrix qq = quartile_curves(same);
  for (int i = 0; i < 3; ++i)
    for (int k = 1; k < 5; ++k) CHECK(qq(k, i) == qq(0, i));

  RunEnsemble lonely;
  lonely.config = ensemble.config;
  lonely.histories.push_back(synthetic_history({1.0, 1.0, 1.0}));
  CHECK_THROWS_AS(quartile_curves(lonely), DegenerateDataError);
}

TEST_CASE("ensembles execute every config-seed pair") {
  auto source =
      make_synthetic_source({SyntheticObjective::Name::Sphere, 2});
  std::vector<OptimizerConfig> configs = {tiny_config(Variant::BO)};
  EnsembleOptions options;
  options.init_samples = 6;
  options.workers = 2;
  auto ensembles = run_ensemble(*source, configs, {1, 2, 3}, options);
  REQUIRE(ensembles.size() == 1);
  CHECK(ensembles[0].histories.size() == 3);
  for (const RunHistory& h : ensembles[0].histories) {
    CHECK_FALSE(h.aborted);
    CHECK(h.records.size() == 3);
  }
}

TEST_CASE("shared initial designs are bit-identical across configs") {
  auto source =
      make_synthetic_source({SyntheticObjective::Name::Sphere, 2});
  std::vector<OptimizerConfig> configs = {tiny_config(Variant::BO),
                                          tiny_config(Variant::BO_Ada)};
  EnsembleOptions options;
  options.init_samples = 6;
  options.workers = 2;
  options.shared_init = true;
  auto ensembles = run_ensemble(*source, configs, {4, 5}, options);
  REQUIRE(ensembles.size() == 2);
  for (std::size_t s = 0; s < 2; ++s) {
    CHECK(ensembles[0].histories[s].initial.X ==
          ensembles[1].histories[s].initial.X);
    CHECK(ensembles[0].histories[s].initial.y ==
          ensembles[1].histories[s].initial.y);
  }
}

TEST_CASE("worker pool merge order is deterministic") {
  auto source =
      make_synthetic_source({SyntheticObjective::Name::Sphere, 2});
  std::vector<OptimizerConfig> configs = {tiny_config(Variant::BO)};
  EnsembleOptions serial;
  serial.init_samples = 6;
  serial.workers = 1;
  EnsembleOptions parallel = serial;
  parallel.workers = 4;
  auto a = run_ensemble(*source, configs, {1, 2, 3, 4}, serial);
  auto b = run_ensemble(*source, configs, {1, 2, 3, 4}, parallel);
  for (std::size_t s = 0; s < 4; ++s) {
    CHECK(a[0].histories[s].y_rec == b[0].histories[s].y_rec);
    CHECK(a[0].histories[s].records.size() == b[0].histories[s].records.size());
  }
}

TEST_CASE("history files round-trip bit-exactly") {
  auto source =
      make_synthetic_source({SyntheticObjective::Name::AlpineN2, 2});
  std::vector<OptimizerConfig> configs = {tiny_config(Variant::BO_iAda)};
  EnsembleOptions options;
  options.init_samples = 6;
  options.workers = 1;
  auto ensembles = run_ensemble(*source, configs, {7, 8}, options);
  const RunEnsemble& ensemble = ensembles[0];

  std::ostringstream stored;
  save_history(stored, ensemble.histories[0], ensemble.config, 7,
               ensemble.objective_label);
  std::istringstream loaded_stream(stored.str());
  SavedRun loaded = load_history(loaded_stream);
  CHECK(loaded.seed == 7);
  CHECK(loaded.objective_label == "alpine_n2-2d");
  CHECK(loaded.history.initial.X == ensemble.histories[0].initial.X);
  CHECK(loaded.history.initial.y == ensemble.histories[0].initial.y);
  REQUIRE(loaded.history.records.size() == ensemble.histories[0].records.size());
  for (std::size_t i = 0; i < loaded.history.records.size(); ++i) {
    CHECK(loaded.history.records[i].x == ensemble.histories[0].records[i].x);
    CHECK(loaded.history.records[i].y == ensemble.histories[0].records[i].y);
    CHECK(loaded.history.records[i].incumbent ==
          ensemble.histories[0].records[i].incumbent);
    CHECK(loaded.history.records[i].candidate_es ==
          ensemble.histories[0].records[i].candidate_es);
  }

  // quartile curves recomputed from reloaded histories match bit-exactly
  std::vector<RunHistory> reloaded;
  for (std::size_t s = 0; s < 2; ++s) {
    std::ostringstream out;
    save_history(out, ensemble.histories[s], ensemble.config,
                 ensemble.seeds[s], ensemble.objective_label);
    std::istringstream in(out.str());
    reloaded.push_back(load_history(in).history);
  }
  Matrix original = quartile_curves(ensemble);
  Matrix recomputed = quartile_curves(reloaded, ensemble.config.iterations);
  CHECK(original == recomputed);
}

TEST_CASE("persistence writes one file per run plus an index") {
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / "abo_bench_test_out";
  fs::remove_all(dir);

  auto source =
      make_synthetic_source({SyntheticObjective::Name::Sphere, 2});
  std::vector<OptimizerConfig> configs = {tiny_config(Variant::BO)};
  EnsembleOptions options;
  options.init_samples = 6;
  options.workers = 1;
  options.out_dir = dir.string();
  auto ensembles = run_ensemble(*source, configs, {1, 2}, options);

  CHECK(fs::exists(dir / "ensembles.tsv"));
  int run_files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "runs"))
    if (entry.is_regular_file()) ++run_files;
  CHECK(run_files == 2);
  CHECK(fs::exists(dir / "runs" / run_file_name(configs[0], 1)));
  fs::remove_all(dir);
}

TEST_CASE("aborted runs are recorded and the ensemble continues") {
  struct FailingSource final : ObjectiveSource {
    ObjectiveFn make() const override {
      return [](const Vector& u) -> double {
        if (u(0) > 0.0 || u(0) <= 1.0) throw std::runtime_error("boom");
        return 0.0;
      };
    }
    int dim() const override { return 2; }
    double lower_bound() const override { return 0.0; }
    std::string label() const override { return "failing"; }
  };
  FailingSource source;
  std::vector<OptimizerConfig> configs = {tiny_config(Variant::BO)};
  EnsembleOptions options;
  options.init_samples = 4;
  options.workers = 1;
  auto ensembles = run_ensemble(source, configs, {1, 2}, options);
  REQUIRE(ensembles.size() == 1);
  for (const RunHistory& h : ensembles[0].histories) CHECK(h.aborted);
}
