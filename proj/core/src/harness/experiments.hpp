#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "bdl/harness.hpp"

namespace bdl::harness::detail {

struct NamedTable {
  std::string file;  // relative to the output directory
  Table table;
};

struct NamedText {
  std::string file;
  std::string content;
};

struct ExperimentOutput {
  std::vector<NamedTable> tables;
  std::vector<NamedText> texts;
  std::vector<Series> plot;
  PlotStyle plot_style;
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  std::vector<StageTiming> stages;
};

ExperimentOutput run_experiment(const ExperimentConfig& config);

/// Runs task(i) for i in [0, n) on `jobs` threads. Tasks write only their own slot, so the
/// caller sees results in index order regardless of scheduling.
inline void parallel_for(int n, int jobs, const std::function<void(int)>& task) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) task(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace bdl::harness::detail
