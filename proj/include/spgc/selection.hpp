// Hyperparameter grid search with per-cell multi-seed aggregation and the two
// selection protocols: validated (pick by validation accuracy) and
// test_selected (pick by test accuracy; biased, reported as such).
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "spgc/graph.hpp"
#include "spgc/propagation.hpp"
#include "spgc/textio.hpp"
#include "spgc/training.hpp"

namespace spgc {

enum class Protocol : std::uint8_t { validated = 0, test_selected = 1 };

inline const char* protocol_name(Protocol p) {
  return p == Protocol::validated ? "validated" : "test_selected";
}

inline Protocol protocol_from_name(const std::string& s) {
  if (s == "validated") return Protocol::validated;
  if (s == "test_selected") return Protocol::test_selected;
  throw std::invalid_argument("unknown selection protocol: " + s);
}

struct GridSpec {
  std::vector<double> learning_rate;
  std::vector<double> weight_decay;
  std::vector<double> dropout;
  std::vector<std::size_t> k;
  std::vector<std::size_t> hidden;  // parsed for grid-file fidelity; ignored by
                                    // the four single-layer models
  std::size_t n_runs = 5;
  Protocol protocol = Protocol::validated;
  std::uint64_t base_seed = 0;
  std::size_t max_epochs = 500;
  std::size_t patience = 100;
};

// Arithmetic mean and population standard deviation.
inline std::pair<double, double> aggregate_runs(const std::vector<double>& accuracies) {
  if (accuracies.empty()) throw std::invalid_argument("aggregate_runs: empty input");
  double mean = 0.0;
  for (double a : accuracies) mean += a;
  mean /= static_cast<double>(accuracies.size());
  double var = 0.0;
  for (double a : accuracies) var += (a - mean) * (a - mean);
  var /= static_cast<double>(accuracies.size());
  return {mean, std::sqrt(var)};
}

// Grid file: one "key: v1, v2, ..." line per hyperparameter, '#' comments.
inline GridSpec parse_grid_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open grid file: " + path);
  GridSpec grid;
  std::string line;
  while (std::getline(is, line)) {
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    const auto colon = sv.find(':');
    if (colon == std::string_view::npos)
      throw std::runtime_error("grid file line has no 'key:' prefix: " + std::string(sv));
    const std::string key(trim(sv.substr(0, colon)));
    std::vector<double> values;
    for (std::string_view cell : split(sv.substr(colon + 1), ',')) {
      cell = trim(cell);
      if (cell.empty()) continue;  // tolerate trailing commas
      values.push_back(parse_double(cell));
    }
    auto as_counts = [&values, &key] {
      std::vector<std::size_t> out;
      for (double v : values) {
        if (v < 0 || v != std::floor(v))
          throw std::runtime_error("grid key '" + key + "' needs nonnegative integers");
        out.push_back(static_cast<std::size_t>(v));
      }
      return out;
    };
    if (key == "learning_rate") grid.learning_rate = values;
    else if (key == "weight_decay") grid.weight_decay = values;
    else if (key == "dropout") grid.dropout = values;
    else if (key == "k") grid.k = as_counts();
    else if (key == "hidden") grid.hidden = as_counts();
    else if (key == "n_runs") grid.n_runs = as_counts().at(0);
    else throw std::runtime_error("unknown grid key: " + key);
  }
  if (grid.learning_rate.empty() || grid.weight_decay.empty() || grid.dropout.empty() ||
      grid.k.empty() || grid.n_runs < 1)
    throw std::runtime_error("grid file must provide learning_rate, weight_decay, dropout and k");
  return grid;
}

struct RunResult {
  std::uint64_t seed = 0;
  double val_acc = 0.0;
  double test_acc = 0.0;
  std::size_t epochs = 0;
};

struct CellResult {
  double learning_rate = 0.0;
  double weight_decay = 0.0;
  double dropout = 0.0;
  std::size_t k = 0;
  std::vector<RunResult> runs;
  double mean_val = 0.0, std_val = 0.0;
  double mean_test = 0.0, std_test = 0.0;
  bool failed = false;
  std::string error;
};

struct SelectionReport {
  Variant variant = Variant::SGC;
  OperatorKind operator_kind = OperatorKind::laplacian;
  Protocol protocol = Protocol::validated;
  bool biased = false;
  std::vector<CellResult> cells;
  std::size_t chosen = 0;  // index into cells
  double final_mean_test = 0.0;
  double final_std_test = 0.0;
};

// The paper's native operator per variant.
inline OperatorKind default_operator(Variant v) {
  return v == Variant::SGC ? OperatorKind::renormalized_adjacency : OperatorKind::laplacian;
}

inline SelectionReport grid_search(Variant variant, const Graph& graph, const GridSpec& grid,
                                   OperatorKind op_kind) {
  SelectionReport report;
  report.variant = variant;
  report.operator_kind = op_kind;
  report.protocol = grid.protocol;
  report.biased = grid.protocol == Protocol::test_selected;

  // One cache per distinct k, shared read-only by all cells.
  const PropagationOperator op = make_operator(graph, op_kind);
  std::map<std::size_t, DiffusionCache> caches;
  for (std::size_t k : grid.k)
    if (!caches.count(k)) caches.emplace(k, build_diffusion_cache(op, graph.X, k));

  for (double lr : grid.learning_rate)
    for (double wd : grid.weight_decay)
      for (double dropout : grid.dropout)
        for (std::size_t k : grid.k) {
          CellResult cell;
          cell.learning_rate = lr;
          cell.weight_decay = wd;
          cell.dropout = dropout;
          cell.k = k;
          report.cells.push_back(cell);
        }

  const std::size_t n_threads =
      std::max<std::size_t>(1, std::min<std::size_t>(report.cells.size(),
                                                     std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next_cell{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next_cell.fetch_add(1);
      if (idx >= report.cells.size()) return;
      CellResult& cell = report.cells[idx];
      try {
        const DiffusionCache& cache = caches.at(cell.k);
        std::vector<double> vals, tests;
        for (std::size_t run = 0; run < grid.n_runs; ++run) {
          TrainConfig cfg;
          cfg.learning_rate = cell.learning_rate;
          cfg.weight_decay = cell.weight_decay;
          cfg.dropout = cell.dropout;
          cfg.max_epochs = grid.max_epochs;
          cfg.patience = grid.patience;
          cfg.seed = hash64(grid.base_seed, idx, run);
          const TrainReport tr = train(variant, cache, graph, cfg);
          cell.runs.push_back({cfg.seed, tr.best_val_acc, tr.test_acc_at_best, tr.history.size()});
          vals.push_back(tr.best_val_acc);
          tests.push_back(tr.test_acc_at_best);
        }
        std::tie(cell.mean_val, cell.std_val) = aggregate_runs(vals);
        std::tie(cell.mean_test, cell.std_test) = aggregate_runs(tests);
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  bool any = false;
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    const CellResult& cell = report.cells[i];
    if (cell.failed) continue;
    const double criterion =
        grid.protocol == Protocol::validated ? cell.mean_val : cell.mean_test;
    const CellResult& best = report.cells[report.chosen];
    const double best_criterion =
        grid.protocol == Protocol::validated ? best.mean_val : best.mean_test;
    if (!any || criterion > best_criterion) {
      report.chosen = i;
      any = true;
    }
  }
  if (!any) throw std::runtime_error("grid search: every cell failed");
  report.final_mean_test = report.cells[report.chosen].mean_test;
  report.final_std_test = report.cells[report.chosen].std_test;
  return report;
}

inline SelectionReport grid_search(Variant variant, const Graph& graph, const GridSpec& grid) {
  return grid_search(variant, graph, grid, default_operator(variant));
}

// One row per cell-run plus mean/std aggregate rows per cell.
inline void write_selection_csv(const SelectionReport& report, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open selection csv: " + path);
  os << "cell,learning_rate,weight_decay,dropout,k,row,seed,val_acc,test_acc\n";
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    const CellResult& cell = report.cells[i];
    const std::string prefix = std::to_string(i) + ',' + format_double(cell.learning_rate) + ',' +
                               format_double(cell.weight_decay) + ',' +
                               format_double(cell.dropout) + ',' + std::to_string(cell.k) + ',';
    if (cell.failed) {
      os << prefix << "failed,,,\n";
      continue;
    }
    for (std::size_t r = 0; r < cell.runs.size(); ++r)
      os << prefix << "run" << r << ',' << cell.runs[r].seed << ','
         << format_double(cell.runs[r].val_acc) << ',' << format_double(cell.runs[r].test_acc)
         << '\n';
    os << prefix << "mean,," << format_double(cell.mean_val) << ',' << format_double(cell.mean_test)
       << '\n';
    os << prefix << "std,," << format_double(cell.std_val) << ',' << format_double(cell.std_test)
       << '\n';
  }
}

inline nlohmann::json selection_summary_json(const SelectionReport& report) {
  const CellResult& chosen = report.cells[report.chosen];
  nlohmann::json j;
  j["variant"] = variant_name(report.variant);
  j["operator"] = operator_name(report.operator_kind);
  j["protocol"] = protocol_name(report.protocol);
  j["biased"] = report.biased;
  j["chosen_cell"] = {{"index", report.chosen},
                      {"learning_rate", chosen.learning_rate},
                      {"weight_decay", chosen.weight_decay},
                      {"dropout", chosen.dropout},
                      {"k", chosen.k}};
  j["mean_val_acc"] = chosen.mean_val;
  j["std_val_acc"] = chosen.std_val;
  j["mean_test_acc"] = report.final_mean_test;
  j["std_test_acc"] = report.final_std_test;
  std::size_t failed = 0;
  for (const auto& cell : report.cells)
    if (cell.failed) ++failed;
  j["cells_total"] = report.cells.size();
  j["cells_failed"] = failed;
  return j;
}

}  // namespace spgc
