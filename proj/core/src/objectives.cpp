#include "abo/objectives.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "abo/errors.hpp"

namespace abo {

std::pair<double, double> SyntheticObjective::domain() const {
  switch (name) {
    case Name::Sphere:
      return {-5.0, 5.0};
    case Name::AlpineN2:
      return {0.0, 10.0};
  }
  return {0.0, 1.0};
}

double SyntheticObjective::lower_bound() const {
  switch (name) {
    case Name::Sphere:
      return 0.0;
    case Name::AlpineN2:
      // |sqrt(x) sin(x)| <= sqrt(10) per axis on [0, 10]
      return -std::pow(10.0, static_cast<double>(dim) / 2.0);
  }
  return 0.0;
}

std::string SyntheticObjective::label() const {
  const char* base = name == Name::Sphere ? "sphere" : "alpine_n2";
  return std::string(base) + "-" + std::to_string(dim) + "d";
}

double objective_eval(const SyntheticObjective& objective,
                      const Eigen::Ref<const Vector>& u) {
  if (u.size() != objective.dim)
    throw DimensionError("objective input dimension mismatch");
  auto [lo, hi] = objective.domain();
  switch (objective.name) {
    case SyntheticObjective::Name::Sphere: {
      double acc = 0.0;
      for (Index d = 0; d < u.size(); ++d) {
        const double x = lo + (hi - lo) * u(d);
        acc += x * x;
      }
      return acc;
    }
    case SyntheticObjective::Name::AlpineN2: {
      double prod = 1.0;
      for (Index d = 0; d < u.size(); ++d) {
        const double x = lo + (hi - lo) * u(d);
        prod *= std::sqrt(x) * std::sin(x);
      }
      return -prod;
    }
  }
  return 0.0;
}

namespace {

class SyntheticSource final : public ObjectiveSource {
 public:
  explicit SyntheticSource(SyntheticObjective obj) : obj_(obj) {}
  ObjectiveFn make() const override {
    SyntheticObjective obj = obj_;
    return [obj](const Vector& u) { return objective_eval(obj, u); };
  }
  int dim() const override { return obj_.dim; }
  double lower_bound() const override { return obj_.lower_bound(); }
  std::string label() const override { return obj_.label(); }

 private:
  SyntheticObjective obj_;
};

class ExternalSource final : public ObjectiveSource {
 public:
  ExternalSource(std::vector<std::string> argv, int dim, double timeout,
                 double lower_bound, bool serial)
      : argv_(std::move(argv)),
        dim_(dim),
        timeout_(timeout),
        lower_bound_(lower_bound),
        serial_(serial) {}

  ObjectiveFn make() const override {
    auto proc = std::make_shared<ExternalObjective>(argv_, timeout_);
    return [proc](const Vector& u) { return (*proc)(u); };
  }
  int dim() const override { return dim_; }
  double lower_bound() const override { return lower_bound_; }
  std::string label() const override {
    return "external:" + (argv_.empty() ? std::string("?") : argv_.front());
  }
  bool serial() const override { return serial_; }

 private:
  std::vector<std::string> argv_;
  int dim_;
  double timeout_;
  double lower_bound_;
  bool serial_;
};

}  // namespace

std::shared_ptr<ObjectiveSource> make_synthetic_source(SyntheticObjective obj) {
  return std::make_shared<SyntheticSource>(obj);
}

std::shared_ptr<ObjectiveSource> make_external_source(
    std::vector<std::string> argv, int dim, double timeout_seconds,
    double lower_bound, bool serial) {
  if (argv.empty()) throw ConfigError("external objective: empty command");
  return std::make_shared<ExternalSource>(std::move(argv), dim, timeout_seconds,
                                          lower_bound, serial);
}

AnalysisFunction analysis_function(const std::string& name, int dim) {
  if (name == "sphere" || name == "alpine_n2") {
    SyntheticObjective obj{name == "sphere"
                               ? SyntheticObjective::Name::Sphere
                               : SyntheticObjective::Name::AlpineN2,
                           dim};
    return {name, dim, [obj](const Vector& u) { return objective_eval(obj, u); }};
  }
  if (name == "ishigami") {
    if (dim != 3) throw ConfigError("ishigami is defined for dim = 3");
    return {name, 3, [](const Vector& u) {
              constexpr double a = 7.0, b = 0.1, pi = 3.14159265358979323846;
              const double x1 = -pi + 2.0 * pi * u(0);
              const double x2 = -pi + 2.0 * pi * u(1);
              const double x3 = -pi + 2.0 * pi * u(2);
              return std::sin(x1) + a * std::sin(x2) * std::sin(x2) +
                     b * std::pow(x3, 4.0) * std::sin(x1);
            }};
  }
  throw ConfigError("unknown analysis function: " + name);
}

ExternalObjective::ExternalObjective(std::vector<std::string> argv,
                                     double timeout_seconds)
    : argv_(std::move(argv)), timeout_seconds_(timeout_seconds) {
  if (argv_.empty()) throw ConfigError("external objective: empty command");
  spawn();
}

ExternalObjective::~ExternalObjective() { shutdown(); }

void ExternalObjective::spawn() {
  int to_pipe[2];
  int from_pipe[2];
  if (pipe(to_pipe) != 0 || pipe(from_pipe) != 0)
    throw EvaluationError("external objective: pipe creation failed");
  pid_t pid = fork();
  if (pid < 0) throw EvaluationError("external objective: fork failed");
  if (pid == 0) {
    dup2(to_pipe[0], STDIN_FILENO);
    dup2(from_pipe[1], STDOUT_FILENO);
    close(to_pipe[0]);
    close(to_pipe[1]);
    close(from_pipe[0]);
    close(from_pipe[1]);
    std::vector<char*> args;
    for (auto& a : argv_) args.push_back(a.data());
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(to_pipe[0]);
  close(from_pipe[1]);
  to_child_ = to_pipe[1];
  from_child_ = from_pipe[0];
  child_pid_ = pid;
}

void ExternalObjective::shutdown() {
  if (to_child_ >= 0) {
    close(to_child_);
    to_child_ = -1;
  }
  if (from_child_ >= 0) {
    close(from_child_);
    from_child_ = -1;
  }
  if (child_pid_ > 0) {
    int status = 0;
    // give the child a moment to exit on its own after stdin closes
    for (int i = 0; i < 50; ++i) {
      pid_t r = waitpid(child_pid_, &status, WNOHANG);
      if (r == child_pid_ || r < 0) {
        child_pid_ = -1;
        return;
      }
      usleep(10'000);
    }
    kill(child_pid_, SIGKILL);
    waitpid(child_pid_, &status, 0);
    child_pid_ = -1;
  }
}

double ExternalObjective::operator()(const Vector& u) {
  if (child_pid_ <= 0)
    throw EvaluationError("external objective: child process not running");

  char num[64];
  std::string line;
  for (Index d = 0; d < u.size(); ++d) {
    std::snprintf(num, sizeof(num), "%.17g", u(d));
    if (d > 0) line += ' ';
    line += num;
  }
  line += '\n';
  ssize_t written = write(to_child_, line.data(), line.size());
  if (written != static_cast<ssize_t>(line.size()))
    throw EvaluationError("external objective '" + argv_.front() +
                          "': write to child failed (" +
                          std::strerror(errno) + ")");

  const int timeout_ms =
      timeout_seconds_ > 0 ? static_cast<int>(timeout_seconds_ * 1000.0) : -1;
  while (true) {
    auto newline = read_buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string reply = read_buffer_.substr(0, newline);
      read_buffer_.erase(0, newline + 1);
      char* end = nullptr;
      const double value = std::strtod(reply.c_str(), &end);
      if (end == reply.c_str() || !std::isfinite(value))
        throw EvaluationError("external objective '" + argv_.front() +
                              "': non-numeric or non-finite reply: '" + reply +
                              "'");
      return value;
    }
    struct pollfd pfd {
      from_child_, POLLIN, 0
    };
    const int pr = poll(&pfd, 1, timeout_ms);
    if (pr == 0)
      throw EvaluationError("external objective '" + argv_.front() +
                            "': timed out waiting for reply");
    if (pr < 0)
      throw EvaluationError("external objective: poll failed");
    char buf[4096];
    const ssize_t got = read(from_child_, buf, sizeof(buf));
    if (got <= 0)
      throw EvaluationError(
          "external objective '" + argv_.front() +
          "': child closed its output (command missing or crashed?)");
    read_buffer_.append(buf, static_cast<std::size_t>(got));
  }
}

}  // namespace abo
