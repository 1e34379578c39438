// Copyright 2026 The tritrain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>
#include <thread>

#include "csv.hpp"
#include "tritrain/common.hpp"
#include "tritrain/learner.hpp"

namespace tritrain {
namespace {

std::vector<std::string> tokenize(std::string_view command_line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(command_line)};
  std::string token;
  while (in >> token) out.push_back(token);
  return out;
}

// Runs argv to completion; returns the exit status. Kills the child's
// process group and throws on timeout.
int run_process(const std::vector<std::string>& argv, const std::filesystem::path& workdir,
                std::chrono::milliseconds timeout) {
  std::vector<char*> cargv;
  for (const std::string& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw LearnerError(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    // Own process group, so a timeout kill reaches the learner's children.
    ::setpgid(0, 0);
    if (::chdir(workdir.c_str()) != 0) ::_exit(126);
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    ::execvp(cargv[0], cargv.data());
    ::_exit(127);
  }
  ::setpgid(pid, pid);  // also from the parent, so the group exists before any kill
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  auto pause = std::chrono::milliseconds(1);
  while (true) {
    int status = 0;
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) {
      if (WIFEXITED(status)) return WEXITSTATUS(status);
      return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
    }
    if (r < 0 && errno != EINTR) {
      throw LearnerError(std::string("waitpid failed: ") + std::strerror(errno));
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      throw LearnerError("external learner timed out after " +
                         std::to_string(timeout.count()) + " ms");
    }
    std::this_thread::sleep_for(pause);
    pause = std::min(pause * 2, std::chrono::milliseconds(50));
  }
}

std::filesystem::path make_workdir(const std::filesystem::path& root) {
  std::string tmpl = (root / "tritrain-ext-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) {
    throw LearnerError("cannot create working directory under " + root.string() + ": " +
                       std::strerror(errno));
  }
  return tmpl;
}

}  // namespace

PredictionSet external_fit_predict(const std::filesystem::path& train_file,
                                   const std::filesystem::path& pool_file, const TrainConfig& cfg,
                                   const ExternalCommand& command, const Alphabet& alphabet) {
  std::vector<std::string> argv = tokenize(command.command_line);
  if (argv.empty()) throw LearnerError("external learner command is empty");
  const std::filesystem::path out_file =
      std::filesystem::absolute(pool_file).parent_path() / "predictions.csv";
  for (std::string arg : {std::string("--train"), std::filesystem::absolute(train_file).string(),
                          std::string("--pool"), std::filesystem::absolute(pool_file).string(),
                          std::string("--out"), out_file.string(), std::string("--epochs"),
                          std::to_string(cfg.epochs), std::string("--seed"),
                          std::to_string(cfg.seed)}) {
    argv.push_back(std::move(arg));
  }
  std::error_code ec;
  std::filesystem::remove(out_file, ec);

  const int status = run_process(argv, std::filesystem::absolute(pool_file).parent_path(),
                                 command.timeout);
  if (status != 0) {
    throw LearnerError("external learner '" + argv.front() + "' exited with status " +
                       std::to_string(status));
  }
  std::string text;
  try {
    text = csv::read_file(out_file);
  } catch (const DatasetError&) {
    throw LearnerError("external learner wrote no prediction file at " + out_file.string());
  }
  PredictionSet predictions = parse_predictions(text, alphabet, argv.front());

  const std::vector<Example> pool = load_unlabeled_csv(pool_file);
  std::size_t missing = 0;
  for (const Example& e : pool) {
    if (!predictions.find(e.id)) ++missing;
  }
  if (missing != 0 || predictions.size() != pool.size()) {
    throw LearnerError("external predictions do not cover the pool: " + std::to_string(missing) +
                       " missing, " + std::to_string(predictions.size()) + " predicted for " +
                       std::to_string(pool.size()) + " pool ids");
  }
  // Re-emit in pool order so downstream consumers see a stable order.
  PredictionSet ordered(predictions.tag());
  for (const Example& e : pool) ordered.add(*predictions.find(e.id));
  return ordered;
}

namespace {

class ExternalModel final : public TrainedModel {
 public:
  ExternalModel(const ExternalCommand& command, std::filesystem::path work_root,
                LabeledDataset train, TrainConfig cfg)
      : command_(command),
        work_root_(std::move(work_root)),
        train_(std::move(train)),
        cfg_(cfg) {}

  PredictionSet predict(std::span<const Example> examples, std::string tag) const override {
    if (examples.empty()) return PredictionSet(std::move(tag));
    const std::filesystem::path dir = make_workdir(work_root_);
    struct Cleanup {
      std::filesystem::path dir;
      ~Cleanup() {
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
      }
    } cleanup{dir};
    write_csv(train_, dir / "train.csv");
    write_unlabeled_csv(examples, dir / "pool.csv");
    PredictionSet raw =
        external_fit_predict(dir / "train.csv", dir / "pool.csv", cfg_, command_, train_.alphabet());
    PredictionSet out(std::move(tag));
    for (const PredictionEntry& e : raw.entries()) out.add(e);
    return out;
  }

  std::string serialize() const override {
    return "external\ncommand " + command_.command_line + "\nepochs " +
           std::to_string(cfg_.epochs) + "\nseed " + std::to_string(cfg_.seed) + "\ntrain_size " +
           std::to_string(train_.size()) + "\n";
  }

 private:
  ExternalCommand command_;
  std::filesystem::path work_root_;
  LabeledDataset train_;
  TrainConfig cfg_;
};

}  // namespace

ExternalLearner::ExternalLearner(ExternalCommand command, std::filesystem::path work_root)
    : command_(std::move(command)), work_root_(std::move(work_root)) {
  if (tokenize(command_.command_line).empty()) {
    throw ConfigError("external learner command is empty");
  }
}

std::unique_ptr<TrainedModel> ExternalLearner::fit(const LabeledDataset& train,
                                                   const TrainConfig& cfg) const {
  if (train.empty()) throw LearnerError("external fit: empty training set");
  return std::make_unique<ExternalModel>(command_, work_root_, train, cfg);
}

}  // namespace tritrain
