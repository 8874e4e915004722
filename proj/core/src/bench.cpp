#include "abo/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "abo/gpi.hpp"
#include "abo/sampling.hpp"

namespace abo {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

std::string RunEnsemble::digest_hex() const { return hex64(config.digest()); }

Vector incumbent_curve(const RunHistory& history) {
  Vector curve(static_cast<Index>(history.records.size()));
  for (std::size_t i = 0; i < history.records.size(); ++i)
    curve(static_cast<Index>(i)) = history.records[i].incumbent;
  return curve;
}

double quantile_linear(std::vector<double> values, double p) {
  if (values.empty()) throw DegenerateDataError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(h));
  if (lo == hi) return values[lo];
  const double w = h - static_cast<double>(lo);
  return values[lo] * (1.0 - w) + values[hi] * w;
}

Matrix quartile_curves(const std::vector<RunHistory>& histories,
                       int iterations) {
  std::vector<const RunHistory*> complete;
  for (const RunHistory& h : histories)
    if (!h.aborted && h.iterations_completed() == iterations)
      complete.push_back(&h);
  if (complete.size() < 2)
    throw DegenerateDataError(
        "quartile curves need at least two complete runs");
  Matrix q(5, iterations);
  const double ps[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int i = 0; i < iterations; ++i) {
    std::vector<double> sample;
    sample.reserve(complete.size());
    for (const RunHistory* h : complete)
      sample.push_back(h->records[static_cast<std::size_t>(i)].incumbent);
    for (int k = 0; k < 5; ++k) q(k, i) = quantile_linear(sample, ps[k]);
  }
  return q;
}

Matrix quartile_curves(const RunEnsemble& ensemble) {
  return quartile_curves(ensemble.histories, ensemble.config.iterations);
}

namespace {

struct Task {
  std::size_t config_index;
  std::size_t seed_index;
};

RunHistory execute_run(const ObjectiveSource& source,
                       const OptimizerConfig& base_config, std::uint64_t seed,
                       const Doe& init) {
  OptimizerConfig config = base_config;
  config.seed = seed;
  ObjectiveFn fn = source.make();
  if (variant_uses_gpi(config.variant)) {
    RngStream split_rng(seed, "init-split");
    auto [train, held] =
        split_train_test(init, config.gpi.test_fraction, split_rng);
    return run_adaptive_bo(fn, train, held, config);
  }
  Doe empty{Matrix(0, init.dim()), Vector(0)};
  return run_adaptive_bo(fn, init, empty, config);
}

}  // namespace

std::vector<RunEnsemble> run_ensemble(const ObjectiveSource& objective,
                                      const std::vector<OptimizerConfig>& configs,
                                      const std::vector<std::uint64_t>& seeds,
                                      const EnsembleOptions& options) {
  if (seeds.empty()) throw ConfigError("seeds: at least one seed required");
  if (configs.empty()) throw ConfigError("optimizers: none configured");
  for (const OptimizerConfig& c : configs) c.validate();
  const int dim = objective.dim();
  const Index n_init = options.init_samples;
  if (n_init < 2) throw ConfigError("init_samples: must be >= 2");

  // initial designs; shared across configs per seed when requested
  std::vector<Doe> shared_init(seeds.size());
  if (options.shared_init) {
    ObjectiveFn fn = objective.make();
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const std::uint64_t skip = seeds[s] * static_cast<std::uint64_t>(n_init);
      Doe doe;
      doe.X = sobol_points(dim, n_init, skip);
      doe.y.resize(n_init);
      for (Index i = 0; i < n_init; ++i) doe.y(i) = fn(doe.X.row(i));
      shared_init[s] = std::move(doe);
    }
  }

  std::vector<Task> tasks;
  for (std::size_t c = 0; c < configs.size(); ++c)
    for (std::size_t s = 0; s < seeds.size(); ++s) tasks.push_back({c, s});

  std::vector<RunHistory> results(tasks.size());
  std::vector<std::string> failures(tasks.size());
  std::atomic<std::size_t> next{0};
  const int workers =
      objective.serial() ? 1 : std::max(1, options.workers);

  auto worker = [&]() {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const Task& task = tasks[t];
      try {
        Doe init;
        if (options.shared_init) {
          init = shared_init[task.seed_index];
        } else {
          ObjectiveFn fn = objective.make();
          RngStream skip_rng(seeds[task.seed_index], "init-skip",
                             task.config_index);
          const std::uint64_t skip =
              (skip_rng.next_u64() & ((1ULL << 20) - 1)) *
              static_cast<std::uint64_t>(n_init);
          init.X = sobol_points(dim, n_init, skip);
          init.y.resize(n_init);
          for (Index i = 0; i < n_init; ++i) init.y(i) = fn(init.X.row(i));
        }
        results[t] = execute_run(objective, configs[task.config_index],
                                 seeds[task.seed_index], init);
      } catch (const std::exception& e) {
        results[t].aborted = true;
        results[t].abort_reason = e.what();
        failures[t] = e.what();
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  std::vector<RunEnsemble> ensembles;
  ensembles.reserve(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    RunEnsemble ensemble;
    ensemble.config = configs[c];
    ensemble.objective_label = objective.label();
    ensemble.seeds = seeds;
    for (std::size_t s = 0; s < seeds.size(); ++s)
      ensemble.histories.push_back(
          std::move(results[c * seeds.size() + s]));
    ensembles.push_back(std::move(ensemble));
  }

  if (!options.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(options.out_dir) / "runs");
    std::vector<std::string> run_files;
    for (const RunEnsemble& ensemble : ensembles) {
      for (std::size_t s = 0; s < seeds.size(); ++s) {
        const std::string name = run_file_name(ensemble.config, seeds[s]);
        const fs::path path = fs::path(options.out_dir) / "runs" / name;
        std::ofstream out(path);
        if (!out) throw Error("cannot write run file: " + path.string());
        save_history(out, ensemble.histories[s], ensemble.config, seeds[s],
                     ensemble.objective_label);
        run_files.push_back("runs/" + name);
      }
    }
    std::ofstream index(fs::path(options.out_dir) / "ensembles.tsv");
    save_ensemble_index(index, ensembles, run_files);
  }
  return ensembles;
}

std::string run_file_name(const OptimizerConfig& config, std::uint64_t seed) {
  return hex64(config.digest()) + "_" + std::to_string(seed) + ".tsv";
}

void save_history(std::ostream& out, const RunHistory& history,
                  const OptimizerConfig& config, std::uint64_t seed,
                  const std::string& objective_label) {
  out << "#abo-history v1\n";
  out << "objective\t" << sanitize(objective_label) << "\n";
  out << "config\t" << hex64(config.digest()) << "\n";
  out << "label\t" << sanitize(config.display_label()) << "\n";
  out << "variant\t" << variant_name(config.variant) << "\n";
  out << "seed\t" << seed << "\n";
  out << "aborted\t" << (history.aborted ? 1 : 0) << "\n";
  if (history.aborted)
    out << "reason\t" << sanitize(history.abort_reason) << "\n";
  out << "init\t" << history.initial.n() << "\t" << history.initial.dim()
      << "\n";
  for (Index i = 0; i < history.initial.n(); ++i) {
    for (Index d = 0; d < history.initial.dim(); ++d)
      out << fmt(history.initial.X(i, d)) << "\t";
    out << fmt(history.initial.y(i)) << "\n";
  }
  out << "iterations\t" << history.records.size() << "\n";
  for (std::size_t i = 0; i < history.records.size(); ++i) {
    const IterationRecord& rec = history.records[i];
    out << (i + 1) << "\t" << fmt(rec.y) << "\t" << fmt(rec.incumbent) << "\t"
        << rec.acq_index << "\t" << (rec.gpi_event ? 1 : 0) << "\t";
    if (rec.candidate_es.empty()) {
      out << "-";
    } else {
      for (std::size_t k = 0; k < rec.candidate_es.size(); ++k) {
        if (k > 0) out << ",";
        out << fmt(rec.candidate_es[k]);
      }
    }
    for (Index d = 0; d < rec.x.size(); ++d) out << "\t" << fmt(rec.x(d));
    out << "\n";
  }
  if (history.x_rec.size() > 0) {
    out << "rec\t" << fmt(history.y_rec);
    for (Index d = 0; d < history.x_rec.size(); ++d)
      out << "\t" << fmt(history.x_rec(d));
    out << "\n";
  }
  out << "end\n";
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void bad(const std::string& what) {
  throw Error("history file: " + what);
}

}  // namespace

SavedRun load_history(std::istream& in) {
  SavedRun run;
  std::string line;
  if (!std::getline(in, line) || line != "#abo-history v1")
    bad("missing signature");
  Index n_init = 0, dim = 0;
  while (std::getline(in, line)) {
    auto parts = split_tabs(line);
    if (parts.empty()) continue;
    const std::string& key = parts[0];
    if (key == "objective") {
      run.objective_label = parts.at(1);
    } else if (key == "config") {
      run.config_digest = parts.at(1);
    } else if (key == "label") {
      run.label = parts.at(1);
    } else if (key == "variant") {
      run.variant = parts.at(1);
    } else if (key == "seed") {
      run.seed = std::stoull(parts.at(1));
    } else if (key == "aborted") {
      run.history.aborted = parts.at(1) == "1";
    } else if (key == "reason") {
      run.history.abort_reason = parts.at(1);
    } else if (key == "init") {
      n_init = static_cast<Index>(std::stoll(parts.at(1)));
      dim = static_cast<Index>(std::stoll(parts.at(2)));
      run.history.initial.X.resize(n_init, dim);
      run.history.initial.y.resize(n_init);
      for (Index i = 0; i < n_init; ++i) {
        if (!std::getline(in, line)) bad("truncated init block");
        auto row = split_tabs(line);
        if (static_cast<Index>(row.size()) != dim + 1) bad("bad init row");
        for (Index d = 0; d < dim; ++d)
          run.history.initial.X(i, d) = std::stod(row[static_cast<std::size_t>(d)]);
        run.history.initial.y(i) = std::stod(row[static_cast<std::size_t>(dim)]);
      }
    } else if (key == "iterations") {
      const std::size_t count = std::stoull(parts.at(1));
      for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line)) bad("truncated iteration block");
        auto row = split_tabs(line);
        if (row.size() < static_cast<std::size_t>(6 + dim))
          bad("bad iteration row");
        IterationRecord rec;
        rec.y = std::stod(row[1]);
        rec.incumbent = std::stod(row[2]);
        rec.acq_index = std::stoi(row[3]);
        rec.gpi_event = row[4] == "1";
        if (row[5] != "-") {
          std::istringstream es(row[5]);
          std::string item;
          while (std::getline(es, item, ','))
            rec.candidate_es.push_back(std::stod(item));
        }
        rec.x.resize(dim);
        for (Index d = 0; d < dim; ++d)
          rec.x(d) = std::stod(row[static_cast<std::size_t>(6 + d)]);
        run.history.records.push_back(std::move(rec));
      }
    } else if (key == "rec") {
      run.history.y_rec = std::stod(parts.at(1));
      run.history.x_rec.resize(dim);
      for (Index d = 0; d < dim; ++d)
        run.history.x_rec(d) = std::stod(parts.at(static_cast<std::size_t>(2 + d)));
    } else if (key == "end") {
      return run;
    } else if (!key.empty() && key[0] == '#') {
      continue;
    } else {
      bad("unknown record key: " + key);
    }
  }
  bad("missing end marker");
}

void save_ensemble_index(std::ostream& out,
                         const std::vector<RunEnsemble>& ensembles,
                         const std::vector<std::string>& run_files) {
  out << "#abo-ensembles v1\n";
  out << "config\tlabel\tobjective\tseed\tfile\n";
  std::size_t file_idx = 0;
  for (const RunEnsemble& ensemble : ensembles) {
    for (std::size_t s = 0; s < ensemble.seeds.size(); ++s) {
      out << ensemble.digest_hex() << "\t"
          << sanitize(ensemble.config.display_label()) << "\t"
          << sanitize(ensemble.objective_label) << "\t" << ensemble.seeds[s]
          << "\t" << run_files.at(file_idx++) << "\n";
    }
  }
}

}  // namespace abo
