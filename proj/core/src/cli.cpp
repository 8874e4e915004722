#include "abo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "abo/report.hpp"

namespace abo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) fail(path, "unknown key '" + key + "'");
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

Acquisition parse_acquisition(const json& j, const std::string& path) {
  reject_unknown(j, path, {"kind", "beta"});
  if (!j.contains("kind")) fail(path, "missing 'kind'");
  Acquisition acq;
  try {
    acq.kind = acquisition_from_name(get_string(j["kind"], path + ".kind"));
  } catch (const ConfigError& e) {
    fail(path + ".kind", e.what());
  }
  if (j.contains("beta")) {
    acq.beta = get_number(j["beta"], path + ".beta");
    if (!(acq.beta >= 0.0)) fail(path + ".beta", "must be >= 0");
  }
  return acq;
}

KernelSpec parse_kernel(const json& j, const std::string& path) {
  reject_unknown(j, path, {"family", "fix"});
  KernelSpec spec;
  spec.family = KernelFamily::Matern32;
  if (j.contains("family")) {
    try {
      spec.family = family_from_name(get_string(j["family"], path + ".family"));
    } catch (const ParameterDomainError& e) {
      fail(path + ".family", e.what());
    }
  }
  if (j.contains("fix")) {
    const json& fix = j["fix"];
    require_object(fix, path + ".fix");
    for (const auto& [key, value] : fix.items()) {
      bool found = false;
      for (int t = 0; t < param_count(spec.family); ++t) {
        if (key == param_name(spec.family, t)) {
          const double v = get_number(value, path + ".fix." + key);
          if (!(v > 0.0) && key != "s2") fail(path + ".fix." + key, "must be > 0");
          if (key == "s2" && v < 0.0) fail(path + ".fix." + key, "must be >= 0");
          spec.fixed[static_cast<std::size_t>(t)] = v;
          found = true;
          break;
        }
      }
      if (!found) fail(path + ".fix", "unknown parameter '" + key + "'");
    }
    if (spec.fixed_count() > 2)
      fail(path + ".fix", "at most two parameters may be fixed");
  }
  return spec;
}

EsSchedule parse_es_schedule(const json& j, const std::string& path,
                             int iterations) {
  reject_unknown(j, path, {"start", "end", "constant", "values"});
  if (j.contains("values")) {
    if (j.size() != 1) fail(path, "'values' excludes other keys");
    if (!j["values"].is_array() || j["values"].empty())
      fail(path + ".values", "expected a non-empty array");
    std::vector<double> values;
    for (std::size_t i = 0; i < j["values"].size(); ++i)
      values.push_back(get_number(j["values"][i],
                                  path + ".values[" + std::to_string(i) + "]"));
    return EsSchedule::explicit_values(std::move(values));
  }
  if (j.contains("constant")) {
    if (j.size() != 1) fail(path, "'constant' excludes other keys");
    return EsSchedule::constant(get_number(j["constant"], path + ".constant"));
  }
  double start = 0.5, end = 2.0;
  if (j.contains("start")) start = get_number(j["start"], path + ".start");
  if (j.contains("end")) end = get_number(j["end"], path + ".end");
  return EsSchedule::linear(start, end, iterations);
}

GpiCondition parse_gpi_condition(const json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "never") return GpiCondition::never();
    fail(path, "expected a period, 'never', or {\"stagnation\": k}");
  }
  if (j.is_number_integer()) {
    const int period = j.get<int>();
    if (period < 1) fail(path, "period must be >= 1");
    return GpiCondition::periodic(period);
  }
  reject_unknown(j, path, {"stagnation"});
  if (!j.contains("stagnation")) fail(path, "missing 'stagnation'");
  const int k = get_int(j["stagnation"], path + ".stagnation");
  if (k < 1) fail(path + ".stagnation", "must be >= 1");
  return GpiCondition::on_stagnation(k);
}

OptimizerConfig parse_optimizer(const json& j, const std::string& path,
                                int iterations) {
  reject_unknown(j, path,
                 {"variant", "kernel", "acquisition", "acquisition_set",
                  "selection", "gpi", "gpi_period", "es_schedule", "label"});
  OptimizerConfig config;
  config.iterations = iterations;
  config.es_schedule = EsSchedule::linear(0.5, 2.0, iterations);
  if (!j.contains("variant")) fail(path, "missing 'variant'");
  try {
    config.variant = variant_from_name(get_string(j["variant"], path + ".variant"));
  } catch (const ConfigError& e) {
    fail(path + ".variant", e.what());
  }

  config.kernel = j.contains("kernel")
                      ? parse_kernel(j["kernel"], path + ".kernel")
                      : parse_kernel(json::object(), path + ".kernel");

  const bool portfolio = variant_uses_portfolio(config.variant);
  if (portfolio) {
    if (j.contains("acquisition"))
      fail(path, "portfolio variants take 'acquisition_set'");
    config.acquisitions = {{AcquisitionKind::LogEI, 2.0},
                           {AcquisitionKind::LogPI, 2.0},
                           {AcquisitionKind::UCB, 2.0}};
    if (j.contains("acquisition_set")) {
      if (!j["acquisition_set"].is_array() || j["acquisition_set"].empty())
        fail(path + ".acquisition_set", "expected a non-empty array");
      config.acquisitions.clear();
      for (std::size_t i = 0; i < j["acquisition_set"].size(); ++i)
        config.acquisitions.push_back(parse_acquisition(
            j["acquisition_set"][i],
            path + ".acquisition_set[" + std::to_string(i) + "]"));
    }
  } else {
    if (j.contains("acquisition_set"))
      fail(path, "single-acquisition variants take 'acquisition'");
    config.acquisitions = {{AcquisitionKind::LogEI, 2.0}};
    if (j.contains("acquisition"))
      config.acquisitions = {
          parse_acquisition(j["acquisition"], path + ".acquisition")};
  }

  if (j.contains("selection")) {
    const std::string sel = get_string(j["selection"], path + ".selection");
    if (sel == "uniform")
      config.selection = SelectionStrategy::Uniform;
    else if (sel == "categorical")
      config.selection = SelectionStrategy::Categorical;
    else
      fail(path + ".selection", "expected 'uniform' or 'categorical'");
  }

  if (j.contains("gpi")) {
    const json& g = j["gpi"];
    reject_unknown(g, path + ".gpi",
                   {"trials", "relmse_threshold", "test_fraction", "restarts",
                    "kernels", "max_fixture_depth"});
    if (g.contains("trials")) {
      config.gpi.trial_threshold = get_int(g["trials"], path + ".gpi.trials");
      if (config.gpi.trial_threshold < 1)
        fail(path + ".gpi.trials", "must be >= 1");
    }
    if (g.contains("relmse_threshold")) {
      config.gpi.relmse_threshold =
          get_number(g["relmse_threshold"], path + ".gpi.relmse_threshold");
      if (!(config.gpi.relmse_threshold > 0.0))
        fail(path + ".gpi.relmse_threshold", "must be > 0");
    }
    if (g.contains("test_fraction")) {
      config.gpi.test_fraction =
          get_number(g["test_fraction"], path + ".gpi.test_fraction");
      if (!(config.gpi.test_fraction > 0.0 && config.gpi.test_fraction < 1.0))
        fail(path + ".gpi.test_fraction", "must lie in (0, 1)");
    }
    if (g.contains("restarts")) {
      config.gpi.fit.restarts = get_int(g["restarts"], path + ".gpi.restarts");
      if (config.gpi.fit.restarts < 1)
        fail(path + ".gpi.restarts", "must be >= 1");
    }
    if (g.contains("max_fixture_depth")) {
      config.gpi.max_fixture_depth =
          get_int(g["max_fixture_depth"], path + ".gpi.max_fixture_depth");
      if (config.gpi.max_fixture_depth < 0 || config.gpi.max_fixture_depth > 2)
        fail(path + ".gpi.max_fixture_depth", "must be 0, 1 or 2");
    }
    if (g.contains("kernels")) {
      if (!g["kernels"].is_array() || g["kernels"].empty())
        fail(path + ".gpi.kernels", "expected a non-empty array");
      config.gpi.kernel_set.clear();
      for (std::size_t i = 0; i < g["kernels"].size(); ++i) {
        try {
          config.gpi.kernel_set.push_back(family_from_name(get_string(
              g["kernels"][i], path + ".gpi.kernels[" + std::to_string(i) + "]")));
        } catch (const ParameterDomainError& e) {
          fail(path + ".gpi.kernels[" + std::to_string(i) + "]", e.what());
        }
      }
    }
  }

  if (j.contains("gpi_period"))
    config.gpi_condition = parse_gpi_condition(j["gpi_period"], path + ".gpi_period");

  if (j.contains("es_schedule"))
    config.es_schedule =
        parse_es_schedule(j["es_schedule"], path + ".es_schedule", iterations);

  if (j.contains("label")) config.label = get_string(j["label"], path + ".label");

  try {
    config.validate();
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
  return config;
}

std::shared_ptr<ObjectiveSource> parse_objective(const json& j,
                                                 const std::string& path,
                                                 std::string& name_out) {
  require_object(j, path);
  if (j.contains("name")) {
    reject_unknown(j, path, {"name", "dim"});
    const std::string name = get_string(j["name"], path + ".name");
    name_out = name;
    int dim = 2;
    if (j.contains("dim")) {
      dim = get_int(j["dim"], path + ".dim");
      if (dim < 1) fail(path + ".dim", "must be >= 1");
    }
    if (name == "sphere")
      return make_synthetic_source({SyntheticObjective::Name::Sphere, dim});
    if (name == "alpine_n2")
      return make_synthetic_source({SyntheticObjective::Name::AlpineN2, dim});
    if (name == "ishigami") {
      // sensitivity-analysis function; exposed through the same interface
      if (j.contains("dim") && dim != 3) fail(path + ".dim", "ishigami has dim 3");
      struct IshigamiSource final : ObjectiveSource {
        AnalysisFunction fn = analysis_function("ishigami", 3);
        ObjectiveFn make() const override { return fn.fn; }
        int dim() const override { return 3; }
        double lower_bound() const override {
          return -1.0 - 0.1 * std::pow(3.14159265358979323846, 4.0);
        }
        std::string label() const override { return "ishigami"; }
      };
      return std::make_shared<IshigamiSource>();
    }
    fail(path + ".name",
         "unknown objective '" + name + "' (sphere, alpine_n2, ishigami)");
  }
  if (j.contains("command")) {
    reject_unknown(j, path,
                   {"command", "dim", "timeout_s", "lower_bound", "serial"});
    if (!j["command"].is_array() || j["command"].empty())
      fail(path + ".command", "expected a non-empty array of strings");
    std::vector<std::string> argv;
    for (std::size_t i = 0; i < j["command"].size(); ++i)
      argv.push_back(get_string(j["command"][i],
                                path + ".command[" + std::to_string(i) + "]"));
    if (!j.contains("dim")) fail(path, "external objectives require 'dim'");
    const int dim = get_int(j["dim"], path + ".dim");
    if (dim < 1) fail(path + ".dim", "must be >= 1");
    double timeout = 300.0;
    if (j.contains("timeout_s")) {
      timeout = get_number(j["timeout_s"], path + ".timeout_s");
      if (!(timeout > 0.0)) fail(path + ".timeout_s", "must be > 0");
    }
    double lower_bound = 0.0;
    if (j.contains("lower_bound"))
      lower_bound = get_number(j["lower_bound"], path + ".lower_bound");
    bool serial = false;
    if (j.contains("serial")) serial = get_bool(j["serial"], path + ".serial");
    name_out = "external";
    return make_external_source(std::move(argv), dim, timeout, lower_bound,
                                serial);
  }
  fail(path, "objective needs either 'name' or 'command'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write output file: " + path.string());
  out << content;
}

}  // namespace

std::vector<OptimizerConfig> standard_reference_configs(int iterations) {
  std::vector<OptimizerConfig> configs;
  const KernelFamily families[] = {KernelFamily::RBF, KernelFamily::Matern32,
                                   KernelFamily::RQ};
  const AcquisitionKind kinds[] = {AcquisitionKind::LogEI,
                                   AcquisitionKind::LogPI,
                                   AcquisitionKind::UCB};
  for (KernelFamily family : families) {
    for (AcquisitionKind kind : kinds) {
      OptimizerConfig config;
      config.variant = Variant::BO;
      config.kernel.family = family;
      config.acquisitions = {{kind, 2.0}};
      config.iterations = iterations;
      config.es_schedule = EsSchedule::linear(0.5, 2.0, iterations);
      configs.push_back(std::move(config));
    }
  }
  return configs;
}

ExperimentSpec parse_config_text(const std::string& text,
                                 const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": invalid JSON: " + e.what());
  }
  reject_unknown(root, origin,
                 {"mode", "objective", "init_samples", "iterations", "seeds",
                  "workers", "delimiter", "out_dir", "optimizer", "optimizers",
                  "benchmark", "sensitivity"});

  ExperimentSpec spec;
  if (root.contains("mode")) {
    const std::string mode = get_string(root["mode"], origin + ".mode");
    if (mode == "optimize")
      spec.mode = ExperimentMode::Optimize;
    else if (mode == "benchmark")
      spec.mode = ExperimentMode::Benchmark;
    else if (mode == "sensitivity")
      spec.mode = ExperimentMode::Sensitivity;
    else
      fail(origin + ".mode", "expected optimize, benchmark or sensitivity");
  }

  if (!root.contains("objective")) fail(origin, "missing 'objective'");
  spec.objective =
      parse_objective(root["objective"], origin + ".objective", spec.objective_name);
  spec.wcri_shift = std::max(0.0, -spec.objective->lower_bound());

  if (root.contains("init_samples")) {
    spec.init_samples = get_int(root["init_samples"], origin + ".init_samples");
    if (spec.init_samples < 2) fail(origin + ".init_samples", "must be >= 2");
  }
  if (root.contains("iterations")) {
    spec.iterations = get_int(root["iterations"], origin + ".iterations");
    if (spec.iterations < 1) fail(origin + ".iterations", "must be >= 1");
  }
  if (root.contains("seeds")) {
    if (!root["seeds"].is_array() || root["seeds"].empty())
      fail(origin + ".seeds", "expected a non-empty array");
    spec.seeds.clear();
    for (std::size_t i = 0; i < root["seeds"].size(); ++i) {
      const json& s = root["seeds"][i];
      if (!s.is_number_integer() || s.get<long long>() < 0)
        fail(origin + ".seeds[" + std::to_string(i) + "]",
             "expected a non-negative integer");
      spec.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (root.contains("workers")) {
    spec.workers = get_int(root["workers"], origin + ".workers");
    if (spec.workers < 1) fail(origin + ".workers", "must be >= 1");
  }
  if (root.contains("delimiter")) {
    const std::string d = get_string(root["delimiter"], origin + ".delimiter");
    if (d == "tab")
      spec.delimiter = '\t';
    else if (d == "comma")
      spec.delimiter = ',';
    else
      fail(origin + ".delimiter", "expected 'tab' or 'comma'");
  }
  if (root.contains("out_dir"))
    spec.out_dir = get_string(root["out_dir"], origin + ".out_dir");

  // optimizer list
  if (root.contains("optimizer") && root.contains("optimizers"))
    fail(origin, "give either 'optimizer' or 'optimizers', not both");
  if (root.contains("optimizer"))
    spec.optimizers.push_back(parse_optimizer(
        root["optimizer"], origin + ".optimizer", spec.iterations));
  if (root.contains("optimizers")) {
    if (!root["optimizers"].is_array() || root["optimizers"].empty())
      fail(origin + ".optimizers", "expected a non-empty array");
    for (std::size_t i = 0; i < root["optimizers"].size(); ++i)
      spec.optimizers.push_back(parse_optimizer(
          root["optimizers"][i],
          origin + ".optimizers[" + std::to_string(i) + "]", spec.iterations));
  }

  if (root.contains("benchmark")) {
    const json& b = root["benchmark"];
    reject_unknown(b, origin + ".benchmark", {"reference", "challengers"});
    if (b.contains("reference") && b["reference"].is_string()) {
      const std::string ref = b["reference"].get<std::string>();
      if (ref != "standard-nine")
        fail(origin + ".benchmark.reference",
             "expected 'standard-nine' or an array");
      spec.reference = standard_reference_configs(spec.iterations);
    } else if (b.contains("reference")) {
      if (!b["reference"].is_array() || b["reference"].empty())
        fail(origin + ".benchmark.reference", "expected a non-empty array");
      for (std::size_t i = 0; i < b["reference"].size(); ++i)
        spec.reference.push_back(parse_optimizer(
            b["reference"][i],
            origin + ".benchmark.reference[" + std::to_string(i) + "]",
            spec.iterations));
    } else {
      spec.reference = standard_reference_configs(spec.iterations);
    }
    if (!b.contains("challengers"))
      fail(origin + ".benchmark", "missing 'challengers'");
    if (!b["challengers"].is_array() || b["challengers"].empty())
      fail(origin + ".benchmark.challengers", "expected a non-empty array");
    for (std::size_t i = 0; i < b["challengers"].size(); ++i) {
      const json& g = b["challengers"][i];
      const std::string gpath =
          origin + ".benchmark.challengers[" + std::to_string(i) + "]";
      reject_unknown(g, gpath, {"label", "optimizers"});
      ChallengerGroup group;
      if (g.contains("label")) group.label = get_string(g["label"], gpath + ".label");
      if (!g.contains("optimizers") || !g["optimizers"].is_array() ||
          g["optimizers"].empty())
        fail(gpath, "missing non-empty 'optimizers' array");
      for (std::size_t k = 0; k < g["optimizers"].size(); ++k)
        group.configs.push_back(parse_optimizer(
            g["optimizers"][k], gpath + ".optimizers[" + std::to_string(k) + "]",
            spec.iterations));
      if (group.label.empty()) group.label = group.configs.front().display_label();
      spec.challengers.push_back(std::move(group));
    }
  }

  if (root.contains("sensitivity")) {
    const json& s = root["sensitivity"];
    reject_unknown(s, origin + ".sensitivity",
                   {"ng", "bootstrap_resamples", "ci_level"});
    if (s.contains("ng")) {
      if (!s["ng"].is_array() || s["ng"].empty())
        fail(origin + ".sensitivity.ng", "expected a non-empty array");
      spec.sensitivity_ng.clear();
      for (std::size_t i = 0; i < s["ng"].size(); ++i) {
        const int ng = get_int(s["ng"][i],
                               origin + ".sensitivity.ng[" + std::to_string(i) + "]");
        if (ng < 4)
          fail(origin + ".sensitivity.ng[" + std::to_string(i) + "]",
               "must be >= 4");
        spec.sensitivity_ng.push_back(ng);
      }
    }
    if (s.contains("bootstrap_resamples")) {
      spec.bootstrap_resamples =
          get_int(s["bootstrap_resamples"], origin + ".sensitivity.bootstrap_resamples");
      if (spec.bootstrap_resamples != 0 && spec.bootstrap_resamples < 100)
        fail(origin + ".sensitivity.bootstrap_resamples",
             "must be 0 (off) or >= 100");
    }
    if (s.contains("ci_level")) {
      spec.ci_level = get_number(s["ci_level"], origin + ".sensitivity.ci_level");
      if (!(spec.ci_level > 0.0 && spec.ci_level < 1.0))
        fail(origin + ".sensitivity.ci_level", "must lie in (0, 1)");
    }
  }

  // mode-specific completeness
  if (spec.mode == ExperimentMode::Optimize && spec.optimizers.empty())
    fail(origin, "optimize mode needs 'optimizer' or 'optimizers'");
  if (spec.mode == ExperimentMode::Benchmark && spec.challengers.empty())
    fail(origin, "benchmark mode needs a 'benchmark' section");
  return spec;
}

ExperimentSpec parse_config(const std::string& path) {
  return parse_config_text(read_file(path), path);
}

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int run_and_persist(const ExperimentSpec& spec,
                    const std::vector<OptimizerConfig>& configs,
                    std::vector<RunEnsemble>& ensembles) {
  EnsembleOptions options;
  options.init_samples = spec.init_samples;
  options.shared_init = true;
  options.workers = spec.workers;
  options.out_dir = spec.out_dir;
  ensembles = run_ensemble(*spec.objective, configs, spec.seeds, options);
  int failures = 0;
  for (const RunEnsemble& ensemble : ensembles)
    for (std::size_t s = 0; s < ensemble.histories.size(); ++s)
      if (ensemble.histories[s].aborted) {
        ++failures;
        std::cerr << "run failed: " << ensemble.config.display_label()
                  << " seed=" << ensemble.seeds[s] << ": "
                  << ensemble.histories[s].abort_reason << "\n";
      }
  return failures;
}

}  // namespace

int cmd_optimize(const ExperimentSpec& spec) {
  std::vector<RunEnsemble> ensembles;
  const int failures = run_and_persist(spec, spec.optimizers, ensembles);
  for (const RunEnsemble& ensemble : ensembles) {
    for (std::size_t s = 0; s < ensemble.histories.size(); ++s) {
      const RunHistory& h = ensemble.histories[s];
      std::cout << ensemble.config.display_label()
                << " seed=" << ensemble.seeds[s];
      if (h.aborted) {
        std::cout << " ABORTED after " << h.iterations_completed()
                  << " iterations (" << h.abort_reason << ")\n";
        continue;
      }
      std::cout << " y_rec=" << fmt17(h.y_rec) << " x_rec=(";
      for (Index d = 0; d < h.x_rec.size(); ++d) {
        if (d > 0) std::cout << ", ";
        std::cout << fmt17(h.x_rec(d));
      }
      std::cout << ")\n";
    }
  }
  return failures == 0 ? 0 : 1;
}

int cmd_benchmark(const ExperimentSpec& spec) {
  std::vector<OptimizerConfig> all_configs = spec.reference;
  for (const ChallengerGroup& group : spec.challengers)
    for (const OptimizerConfig& config : group.configs)
      all_configs.push_back(config);

  std::vector<RunEnsemble> ensembles;
  const int failures = run_and_persist(spec, all_configs, ensembles);

  std::vector<RunEnsemble> reference(
      ensembles.begin(),
      ensembles.begin() + static_cast<std::ptrdiff_t>(spec.reference.size()));

  const std::string objective_label = spec.objective->label();
  std::vector<WcriRow> rows;
  {
    WcriRow row;
    row.objective = objective_label;
    row.model_init = "No GPi";
    row.adaptivity = "No Ada";
    row.sel = "";
    row.report = wcri_report(reference, reference, spec.wcri_shift,
                             "reference", "reference");
    rows.push_back(std::move(row));
  }
  std::size_t offset = spec.reference.size();
  for (const ChallengerGroup& group : spec.challengers) {
    std::vector<RunEnsemble> challenger(
        ensembles.begin() + static_cast<std::ptrdiff_t>(offset),
        ensembles.begin() + static_cast<std::ptrdiff_t>(offset + group.configs.size()));
    offset += group.configs.size();
    WcriRow row;
    row.objective = objective_label;
    table_key(group.configs.front(), row.model_init, row.adaptivity, row.sel);
    row.report = wcri_report(reference, challenger, spec.wcri_shift,
                             "reference", group.label);
    rows.push_back(std::move(row));
  }

  const char* ext = spec.delimiter == ',' ? "csv" : "tsv";
  write_file(fs::path(spec.out_dir) / (std::string("wcri_table.") + ext),
             emit_table(rows, spec.delimiter));

  for (std::size_t e = 0; e < ensembles.size(); ++e) {
    const std::string name = "plotdata/" + std::to_string(e) + "_" +
                             ensembles[e].digest_hex() + "." + ext;
    write_file(fs::path(spec.out_dir) / name,
               emit_history_plotdata(ensembles[e], spec.delimiter));
  }

  // manifest so the report subcommand can recompute tables from disk
  std::ostringstream manifest;
  manifest << "#abo-benchmark v1\n";
  manifest << "objective\t" << objective_label << "\n";
  manifest << "iterations\t" << spec.iterations << "\n";
  manifest << "shift\t" << fmt17(spec.wcri_shift) << "\n";
  for (const RunEnsemble& e : reference)
    manifest << "reference\t" << e.digest_hex() << "\t"
             << e.config.display_label() << "\n";
  offset = spec.reference.size();
  for (const ChallengerGroup& group : spec.challengers) {
    for (std::size_t k = 0; k < group.configs.size(); ++k) {
      manifest << "group\t" << group.label << "\t"
               << ensembles[offset + k].digest_hex() << "\t"
               << ensembles[offset + k].config.display_label() << "\n";
    }
    offset += group.configs.size();
  }
  write_file(fs::path(spec.out_dir) / "benchmark_manifest.tsv", manifest.str());

  std::cout << emit_table(rows, spec.delimiter);
  return failures == 0 ? 0 : 1;
}

int cmd_sensitivity(const ExperimentSpec& spec) {
  ObjectiveFn objective = spec.objective->make();
  const int dim = spec.objective->dim();

  ConvergenceOptions options;
  options.ci_level = spec.ci_level;
  options.bootstrap_resamples = spec.bootstrap_resamples;
  options.seed = spec.seeds.front();
  std::vector<SensitivityReport> reports =
      convergence_curve(objective, dim, spec.sensitivity_ng, options);

  std::vector<std::string> names;
  for (int d = 1; d <= dim; ++d) names.push_back("x" + std::to_string(d));

  const char* ext = spec.delimiter == ',' ? "csv" : "tsv";
  for (const SensitivityReport& report : reports) {
    const std::string name =
        "sensitivity_ng" + std::to_string(report.n_base) + "." + ext;
    write_file(fs::path(spec.out_dir) / name,
               serialize_report(report, names, spec.delimiter));
  }

  std::ostringstream conv;
  const char d = spec.delimiter;
  conv << "ng" << d << "parameter" << d << "S1" << d << "S1_low" << d
       << "S1_high" << d << "ST" << d << "ST_low" << d << "ST_high\n";
  for (const SensitivityReport& report : reports) {
    for (int i = 0; i < dim; ++i) {
      conv << report.n_base << d << names[static_cast<std::size_t>(i)] << d
           << fmt17(report.s1(i)) << d << fmt17(report.s1_low(i)) << d
           << fmt17(report.s1_high(i)) << d << fmt17(report.st(i)) << d
           << fmt17(report.st_low(i)) << d << fmt17(report.st_high(i)) << "\n";
    }
  }
  write_file(fs::path(spec.out_dir) / (std::string("sensitivity_convergence.") + ext),
             conv.str());

  std::cout << "sensitivity reports written for " << reports.size()
            << " design sizes under " << spec.out_dir << "\n";
  return 0;
}

int cmd_report(const ExperimentSpec& spec, const std::string& from_dir) {
  const fs::path base(from_dir.empty() ? spec.out_dir : from_dir);
  std::ifstream manifest(base / "benchmark_manifest.tsv");
  if (!manifest)
    throw ConfigError((base / "benchmark_manifest.tsv").string() +
                      ": missing manifest (run the benchmark subcommand first)");

  std::string objective_label;
  int iterations = 0;
  double shift = 0.0;
  std::vector<std::string> reference_digests;
  std::vector<std::pair<std::string, std::string>> group_digests;  // label, digest
  std::string line;
  std::getline(manifest, line);
  if (line != "#abo-benchmark v1")
    throw ConfigError("benchmark manifest: bad signature");
  while (std::getline(manifest, line)) {
    std::istringstream ls(line);
    std::string key;
    std::getline(ls, key, '\t');
    if (key == "objective") {
      std::getline(ls, objective_label, '\t');
    } else if (key == "iterations") {
      std::string v;
      std::getline(ls, v, '\t');
      iterations = std::stoi(v);
    } else if (key == "shift") {
      std::string v;
      std::getline(ls, v, '\t');
      shift = std::stod(v);
    } else if (key == "reference") {
      std::string digest;
      std::getline(ls, digest, '\t');
      reference_digests.push_back(digest);
    } else if (key == "group") {
      std::string label, digest;
      std::getline(ls, label, '\t');
      std::getline(ls, digest, '\t');
      group_digests.emplace_back(label, digest);
    }
  }

  // load all runs, keyed by digest
  std::map<std::string, std::vector<SavedRun>> runs;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(base / "runs"))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const fs::path& file : files) {
    std::ifstream in(file);
    SavedRun run = load_history(in);
    runs[run.config_digest].push_back(std::move(run));
  }

  auto quartiles_for = [&](const std::string& digest) {
    auto it = runs.find(digest);
    if (it == runs.end())
      throw ConfigError("report: no runs found for config " + digest);
    std::vector<RunHistory> histories;
    for (SavedRun& run : it->second) histories.push_back(run.history);
    return quartile_curves(histories, iterations);
  };

  std::vector<Matrix> reference_q;
  for (const std::string& digest : reference_digests)
    reference_q.push_back(quartiles_for(digest));

  std::vector<WcriRow> rows;
  {
    WcriRow row;
    row.objective = objective_label;
    row.model_init = "No GPi";
    row.adaptivity = "No Ada";
    row.sel = "";
    row.report.shift = shift;
    row.report.reference_id = "reference";
    row.report.challenger_id = "reference";
    for (int k = 0; k < 5; ++k)
      row.report.values[static_cast<std::size_t>(k)] =
          wcri(reference_q, reference_q, k, shift);
    rows.push_back(std::move(row));
  }

  // group digests by label, preserving manifest order
  std::vector<std::pair<std::string, std::vector<std::string>>> groups;
  for (const auto& [label, digest] : group_digests) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == label; });
    if (it == groups.end())
      groups.emplace_back(label, std::vector<std::string>{digest});
    else
      it->second.push_back(digest);
  }
  for (const auto& [label, digests] : groups) {
    std::vector<Matrix> challenger_q;
    for (const std::string& digest : digests)
      challenger_q.push_back(quartiles_for(digest));
    WcriRow row;
    row.objective = objective_label;
    const SavedRun& first = runs[digests.front()].front();
    OptimizerConfig key_config;
    key_config.variant = variant_from_name(first.variant);
    // selection strategy is not persisted per se; infer from the label
    key_config.selection = first.label.find("SelCat") != std::string::npos
                               ? SelectionStrategy::Categorical
                               : SelectionStrategy::Uniform;
    if (!variant_uses_portfolio(key_config.variant))
      key_config.acquisitions = {{AcquisitionKind::LogEI, 2.0}};
    table_key(key_config, row.model_init, row.adaptivity, row.sel);
    row.report.shift = shift;
    row.report.reference_id = "reference";
    row.report.challenger_id = label;
    for (int k = 0; k < 5; ++k)
      row.report.values[static_cast<std::size_t>(k)] =
          wcri(reference_q, challenger_q, k, shift);
    rows.push_back(std::move(row));
  }

  const char* ext = spec.delimiter == ',' ? "csv" : "tsv";
  write_file(fs::path(spec.out_dir) / (std::string("wcri_table.") + ext),
             emit_table(rows, spec.delimiter));
  std::cout << emit_table(rows, spec.delimiter);
  return 0;
}

}  // namespace abo
