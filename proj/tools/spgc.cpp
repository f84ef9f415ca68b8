// spgc: command-line front end for the single-layer linear graph convolution
// toolkit. Subcommands: prep, train, gridsearch, coeffs, bounds, oracle-check.
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spgc/bounds.hpp"
#include "spgc/dataio.hpp"
#include "spgc/graph.hpp"
#include "spgc/models.hpp"
#include "spgc/oracle_suite.hpp"
#include "spgc/propagation.hpp"
#include "spgc/selection.hpp"
#include "spgc/textio.hpp"
#include "spgc/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// Written before any heavy work so a crashed run still leaves its config.
void write_manifest(const fs::path& path, const std::string& command, const json& config,
                    std::uint64_t seed, const std::vector<std::string>& outputs) {
  json m;
  m["command"] = command;
  m["config"] = config;
  m["seed"] = seed;
  m["toolkit_version"] = kVersion;
  m["timestamp"] = iso_timestamp();
  m["outputs"] = outputs;
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write manifest: " + path.string());
  os << m.dump(2) << '\n';
}

fs::path cache_dir_for(const fs::path& data_dir) {
  if (const char* env = std::getenv("SPGC_CACHE_DIR")) return fs::path(env);
  return data_dir / "cache";
}

fs::path cache_path(const fs::path& data_dir, const std::string& dataset, spgc::OperatorKind op,
                    std::size_t k) {
  return cache_dir_for(data_dir) /
         (dataset + "_" + spgc::operator_name(op) + "_k" + std::to_string(k) + ".spgc");
}

// Load a compatible cache from disk or build (and persist) it.
spgc::DiffusionCache obtain_cache(const spgc::DatasetBundle& bundle, const fs::path& data_dir,
                                  spgc::OperatorKind op, std::size_t k) {
  const fs::path path = cache_path(data_dir, bundle.name, op, k);
  if (fs::exists(path)) {
    spgc::DiffusionCache cache = spgc::load_cache(path.string());
    if (cache.operator_kind == op && cache.k >= k && cache.n() == bundle.graph.n) return cache;
  }
  const auto prop = spgc::make_operator(bundle.graph, op);
  spgc::DiffusionCache cache = spgc::build_diffusion_cache(prop, bundle.graph.X, k);
  fs::create_directories(path.parent_path());
  spgc::save_cache(cache, path.string());
  return cache;
}

json train_summary(const spgc::TrainReport& report) {
  double mean_ms = 0.0;
  for (const auto& r : report.history) mean_ms += r.wall_ms;
  if (!report.history.empty()) mean_ms /= static_cast<double>(report.history.size());
  const auto& last = report.history.back();
  json s;
  s["epochs"] = report.history.size();
  s["stopped_early"] = report.stopped_early;
  s["best_epoch"] = report.best_epoch;
  s["best_val_acc"] = report.best_val_acc;
  s["test_acc_at_best"] = report.test_acc_at_best;
  s["final_train_acc"] = last.train_acc;
  s["final_val_acc"] = last.val_acc;
  s["final_test_acc"] = last.test_acc;
  s["mean_epoch_ms"] = mean_ms;
  return s;
}

int run(int argc, char** argv) {
  CLI::App app{"Single-layer linear graph convolution toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // --- prep ---
  auto* prep = app.add_subcommand("prep", "Precompute and persist a diffusion cache");
  std::string prep_data, prep_op = "laplacian", prep_out;
  std::size_t prep_k = 2;
  prep->add_option("--data", prep_data, "dataset bundle directory")->required();
  prep->add_option("--op", prep_op, "propagation operator")->check(CLI::IsMember(
      {"laplacian", "renormalized_adjacency", "normalized_adjacency"}));
  prep->add_option("--k", prep_k, "maximum hop count");
  prep->add_option("--out", prep_out, "output cache file (default: cache dir)");

  // --- train ---
  auto* tr = app.add_subcommand("train", "Train one model with fixed hyperparameters");
  std::string tr_data, tr_model, tr_op, tr_out = "run";
  std::size_t tr_k = 2, tr_epochs = 500, tr_patience = 100;
  double tr_lr = 0.2, tr_wd = 0.0, tr_dropout = 0.0;
  std::uint64_t tr_seed = 0;
  tr->add_option("--data", tr_data)->required();
  tr->add_option("--model", tr_model, "sgc|egc|lgc|hlgc")->required();
  tr->add_option("--k", tr_k);
  tr->add_option("--learning-rate", tr_lr);
  tr->add_option("--weight-decay", tr_wd);
  tr->add_option("--dropout", tr_dropout);
  tr->add_option("--max-epochs", tr_epochs);
  tr->add_option("--patience", tr_patience);
  tr->add_option("--seed", tr_seed);
  tr->add_option("--op", tr_op, "propagation operator (default: model's native one)");
  tr->add_option("--out-dir", tr_out);

  // --- gridsearch ---
  auto* gs = app.add_subcommand("gridsearch", "Grid search with multi-seed aggregation");
  std::string gs_data, gs_model, gs_grid, gs_protocol = "validated", gs_op, gs_out = "grid";
  std::uint64_t gs_seed = 0;
  std::size_t gs_runs = 0;
  gs->add_option("--data", gs_data)->required();
  gs->add_option("--model", gs_model, "sgc|egc|lgc|hlgc")->required();
  gs->add_option("--grid", gs_grid, "grid spec file")->required();
  gs->add_option("--protocol", gs_protocol)->check(CLI::IsMember({"validated", "test_selected"}));
  gs->add_option("--base-seed", gs_seed);
  gs->add_option("--n-runs", gs_runs, "override the grid file's n_runs");
  gs->add_option("--op", gs_op, "propagation operator (default: model's native one)");
  gs->add_option("--out-dir", gs_out);

  // --- coeffs ---
  auto* co = app.add_subcommand("coeffs", "Export per-hop coefficients of a checkpoint");
  std::string co_ckpt, co_cache, co_out = "coefficients.csv";
  co->add_option("--checkpoint", co_ckpt)->required();
  co->add_option("--cache", co_cache, "diffusion cache (needed for hLGC gates)");
  co->add_option("--out", co_out);

  // --- bounds ---
  auto* bo = app.add_subcommand("bounds", "Evaluate a Rademacher complexity bound");
  std::string bo_model;
  spgc::BoundInputs bo_in;
  bo->add_option("--model", bo_model, "lgc|egc")->required()->check(CLI::IsMember({"lgc", "egc"}));
  bo->add_option("--a", bo_in.a, "coefficient cap")->required();
  bo->add_option("--b", bo_in.b, "theta l1 cap")->required();
  bo->add_option("--M", bo_in.M, "sup |X_ij|")->required();
  bo->add_option("--lip", bo_in.lipschitz, "activation Lipschitz constant")->required();
  bo->add_option("--k", bo_in.k, "hop count (lgc only)");
  bo->add_option("--l1", bo_in.l1_norm, "operator 1-norm")->required();
  bo->add_option("--L", bo_in.L_samples, "sampling set size")->required();

  // --- oracle-check ---
  auto* oc = app.add_subcommand("oracle-check",
                                "Run the spectral, truncation and Rademacher verification suites");
  std::uint64_t oc_seed = 0;
  std::size_t oc_graphs = 50;
  oc->add_option("--seed", oc_seed);
  oc->add_option("--graphs", oc_graphs, "random graphs for the spectral suite");

  CLI11_PARSE(app, argc, argv);

  if (prep->parsed()) {
    const auto op = spgc::operator_from_name(prep_op);
    const spgc::DatasetBundle bundle = spgc::load_dataset(prep_data);
    const fs::path real_out =
        prep_out.empty() ? cache_path(prep_data, bundle.name, op, prep_k) : fs::path(prep_out);
    json cfg = {{"data", prep_data}, {"op", prep_op}, {"k", prep_k}, {"out", real_out.string()}};
    write_manifest(real_out.string() + ".manifest.json", "prep", cfg, 0, {real_out.string()});
    const auto t0 = std::chrono::steady_clock::now();
    const auto prop = spgc::make_operator(bundle.graph, op);
    const auto cache = spgc::build_diffusion_cache(prop, bundle.graph.X, prep_k);
    if (!real_out.parent_path().empty()) fs::create_directories(real_out.parent_path());
    spgc::save_cache(cache, real_out.string());
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "cache with " << cache.terms.size() << " terms written to " << real_out
              << " (build " << ms << " ms)\n";
    return 0;
  }

  if (tr->parsed()) {
    const auto variant = spgc::variant_from_name(tr_model);
    const auto op = tr_op.empty() ? spgc::default_operator(variant) : spgc::operator_from_name(tr_op);
    const fs::path out_dir(tr_out);
    fs::create_directories(out_dir);
    json cfg = {{"data", tr_data},         {"model", tr_model},
                {"op", spgc::operator_name(op)}, {"k", tr_k},
                {"learning_rate", tr_lr},  {"weight_decay", tr_wd},
                {"dropout", tr_dropout},   {"max_epochs", tr_epochs},
                {"patience", tr_patience}, {"seed", tr_seed}};
    const std::vector<std::string> outputs = {(out_dir / "history.csv").string(),
                                              (out_dir / "checkpoint.bin").string(),
                                              (out_dir / "summary.json").string()};
    write_manifest(out_dir / "manifest.json", "train", cfg, tr_seed, outputs);

    const spgc::DatasetBundle bundle = spgc::load_dataset(tr_data);
    const spgc::DiffusionCache full = obtain_cache(bundle, tr_data, op, tr_k);
    spgc::DiffusionCache cache;  // trim to exactly k hops so model k == cache k
    cache.operator_kind = full.operator_kind;
    cache.k = tr_k;
    cache.feature_dim = full.feature_dim;
    cache.terms.assign(full.terms.begin(), full.terms.begin() + static_cast<long>(tr_k) + 1);

    spgc::TrainConfig config;
    config.learning_rate = tr_lr;
    config.weight_decay = tr_wd;
    config.dropout = tr_dropout;
    config.max_epochs = tr_epochs;
    config.patience = tr_patience;
    config.seed = tr_seed;
    const spgc::TrainReport report = spgc::train(variant, cache, bundle.graph, config);

    spgc::write_history_csv(report, (out_dir / "history.csv").string());
    spgc::save_checkpoint(report.final_params, tr_seed, (out_dir / "checkpoint.bin").string());
    std::ofstream os(out_dir / "summary.json", std::ios::binary | std::ios::trunc);
    os << train_summary(report).dump(2) << '\n';
    std::cout << "best val acc " << report.best_val_acc << " (epoch " << report.best_epoch
              << "), test acc at best " << report.test_acc_at_best << '\n';
    return 0;
  }

  if (gs->parsed()) {
    const auto variant = spgc::variant_from_name(gs_model);
    const auto op = gs_op.empty() ? spgc::default_operator(variant) : spgc::operator_from_name(gs_op);
    spgc::GridSpec grid = spgc::parse_grid_file(gs_grid);
    grid.protocol = spgc::protocol_from_name(gs_protocol);
    grid.base_seed = gs_seed;
    if (gs_runs > 0) grid.n_runs = gs_runs;
    const fs::path out_dir(gs_out);
    fs::create_directories(out_dir);
    json cfg = {{"data", gs_data},
                {"model", gs_model},
                {"grid", gs_grid},
                {"protocol", gs_protocol},
                {"op", spgc::operator_name(op)},
                {"base_seed", gs_seed},
                {"n_runs", grid.n_runs}};
    const std::vector<std::string> outputs = {(out_dir / "cells.csv").string(),
                                              (out_dir / "summary.json").string()};
    write_manifest(out_dir / "manifest.json", "gridsearch", cfg, gs_seed, outputs);

    const spgc::DatasetBundle bundle = spgc::load_dataset(gs_data);
    const spgc::SelectionReport report = spgc::grid_search(variant, bundle.graph, grid, op);
    spgc::write_selection_csv(report, (out_dir / "cells.csv").string());
    std::ofstream os(out_dir / "summary.json", std::ios::binary | std::ios::trunc);
    os << spgc::selection_summary_json(report).dump(2) << '\n';
    std::cout << "chosen cell " << report.chosen << ": mean test acc " << report.final_mean_test
              << " +/- " << report.final_std_test << " (" << gs_protocol << ")\n";
    return 0;
  }

  if (co->parsed()) {
    const spgc::Checkpoint ck = spgc::load_checkpoint(co_ckpt);
    if (ck.params.variant == spgc::Variant::SGC) {
      std::cerr << "error: SGC checkpoints have no coefficient series\n";
      return 1;
    }
    spgc::DiffusionCache cache;
    if (ck.params.variant == spgc::Variant::HLGC) {
      if (co_cache.empty()) {
        std::cerr << "error: hLGC coefficient extraction needs --cache\n";
        return 1;
      }
      cache = spgc::load_cache(co_cache);
    } else {
      cache.k = ck.params.k;  // EGC/LGC series need no features
      cache.feature_dim = ck.params.theta.rows();
    }
    const auto series = spgc::extract_coefficients(ck.params, cache);
    std::ofstream os(co_out, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + co_out);
    os << "hop,coefficient,variance\n";
    for (const auto& p : series)
      os << p.hop << ',' << spgc::format_double(p.coefficient) << ','
         << spgc::format_double(p.variance) << '\n';
    std::cout << "wrote " << series.size() << " coefficient rows to " << co_out << '\n';
    return 0;
  }

  if (bo->parsed()) {
    const double bound = bo_model == "lgc" ? spgc::lgc_rademacher_bound(bo_in)
                                           : spgc::egc_rademacher_bound(bo_in);
    json j = {{"model", bo_model},
              {"a", bo_in.a},
              {"b", bo_in.b},
              {"M", bo_in.M},
              {"lipschitz", bo_in.lipschitz},
              {"k", bo_in.k},
              {"l1_norm", bo_in.l1_norm},
              {"L_samples", bo_in.L_samples},
              {"bound", bound}};
    std::cout << j.dump(2) << '\n';
    return 0;
  }

  if (oc->parsed()) {
    const auto spec = spgc::spectral_equivalence_suite(oc_seed, oc_graphs);
    const auto trunc = spgc::truncation_suite(oc_seed);
    const auto rad = spgc::rademacher_suite(oc_seed);
    json j;
    j["seed"] = oc_seed;
    j["spectral_equivalence"] = {{"graphs", spec.graphs},
                                 {"max_filter_residual", spec.max_filter_residual},
                                 {"max_orthonormality_residual", spec.max_orthonormality_residual},
                                 {"max_reconstruction_residual", spec.max_reconstruction_residual},
                                 {"min_eigenvalue", spec.min_eigenvalue},
                                 {"max_eigenvalue", spec.max_eigenvalue},
                                 {"violations", spec.violations}};
    j["truncation"] = {{"checks", trunc.checks},
                       {"violations", trunc.violations},
                       {"max_gap_over_bound", trunc.max_gap_over_bound}};
    j["rademacher"] = {{"instances", rad.instances},
                       {"violations", rad.violations},
                       {"max_estimate_over_bound", rad.max_estimate_over_bound}};
    const bool ok = spec.violations == 0 && trunc.violations == 0 && rad.violations == 0;
    j["ok"] = ok;
    std::cout << j.dump(2) << '\n';
    return ok ? 0 : 1;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
