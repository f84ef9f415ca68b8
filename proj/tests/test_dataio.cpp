#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "spgc/dataio.hpp"
#include "spgc/synthetic.hpp"
#include "test_util.hpp"

using namespace spgc;
namespace fs = std::filesystem;

namespace {

DatasetBundle toy_bundle() {
  DatasetBundle b;
  b.name = "toy";
  b.graph = random_graph(131, 12, 3, 3);
  b.class_count = b.graph.num_classes();
  b.provenance = "generated for tests";
  return b;
}

fs::path fresh_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void expect_load_error(const fs::path& dir, const std::string& needle) {
  try {
    load_dataset(dir.string());
    FAIL("expected load_dataset to reject the bundle");
  } catch (const std::exception& e) {
    INFO(e.what());
    REQUIRE(std::string(e.what()).find(needle) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("save -> load round trip is a deep equality") {
  const DatasetBundle b = toy_bundle();
  const fs::path dir = fresh_dir("spgc_bundle_roundtrip");
  save_dataset(b, dir.string());
  const DatasetBundle loaded = load_dataset(dir.string());
  REQUIRE(loaded.name == b.name);
  REQUIRE(loaded.class_count == b.class_count);
  REQUIRE(loaded.provenance == b.provenance);
  REQUIRE(loaded.graph.n == b.graph.n);
  REQUIRE(loaded.graph.edges == b.graph.edges);
  REQUIRE(loaded.graph.X == b.graph.X);
  REQUIRE(loaded.graph.y == b.graph.y);
  REQUIRE(loaded.graph.train_mask == b.graph.train_mask);
  REQUIRE(loaded.graph.val_mask == b.graph.val_mask);
  REQUIRE(loaded.graph.test_mask == b.graph.test_mask);

  // a second save -> load round trip changes nothing (symmetrization idempotent)
  const fs::path dir2 = fresh_dir("spgc_bundle_roundtrip2");
  save_dataset(loaded, dir2.string());
  const DatasetBundle again = load_dataset(dir2.string());
  REQUIRE(again.graph.edges == loaded.graph.edges);
  REQUIRE(again.graph.X == loaded.graph.X);
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("loader diagnostics are distinct per failure") {
  const DatasetBundle b = toy_bundle();

  {  // missing file
    const fs::path dir = fresh_dir("spgc_bundle_missing");
    save_dataset(b, dir.string());
    fs::remove(dir / "labels.txt");
    expect_load_error(dir, "missing file");
    fs::remove_all(dir);
  }
  {  // overlapping splits: the offending index is reported
    const fs::path dir = fresh_dir("spgc_bundle_overlap");
    save_dataset(b, dir.string());
    nlohmann::json splits;
    splits["train"] = {0, 1};
    splits["val"] = {1, 2};
    splits["test"] = {3};
    std::ofstream(dir / "splits.json") << splits.dump();
    expect_load_error(dir, "overlap at node 1");
    fs::remove_all(dir);
  }
  {  // split index out of range
    const fs::path dir = fresh_dir("spgc_bundle_oor");
    save_dataset(b, dir.string());
    nlohmann::json splits;
    splits["train"] = {9999};
    splits["val"] = nlohmann::json::array();
    splits["test"] = nlohmann::json::array();
    std::ofstream(dir / "splits.json") << splits.dump();
    expect_load_error(dir, "out of range");
    fs::remove_all(dir);
  }
  {  // label outside [0, C)
    const fs::path dir = fresh_dir("spgc_bundle_label");
    save_dataset(b, dir.string());
    {
      std::ofstream os(dir / "labels.txt");
      for (std::size_t i = 0; i < b.graph.n; ++i) os << 99 << '\n';
    }
    expect_load_error(dir, "label out of range");
    fs::remove_all(dir);
  }
  {  // feature row count mismatch against meta
    const fs::path dir = fresh_dir("spgc_bundle_rows");
    save_dataset(b, dir.string());
    { std::ofstream(dir / "features.csv") << "1,2,3\n"; }
    expect_load_error(dir, "rows");
    fs::remove_all(dir);
  }
  {  // size guard for out-of-scope graphs
    const fs::path dir = fresh_dir("spgc_bundle_huge");
    save_dataset(b, dir.string());
    nlohmann::json meta;
    meta["name"] = "huge";
    meta["n"] = 250001;
    meta["c"] = 1;
    meta["C"] = 2;
    std::ofstream(dir / "meta.json") << meta.dump();
    expect_load_error(dir, "out of scope");
    fs::remove_all(dir);
  }
}

TEST_CASE("validate_bundle diagnostics") {
  DatasetBundle edgeless;
  edgeless.name = "edgeless";
  edgeless.graph = test::edgeless_graph(7);
  edgeless.class_count = 1;
  const BundleDiagnostics d = validate_bundle(edgeless);
  REQUIRE(d.isolated_nodes == 7);
  REQUIRE_FALSE(d.warnings.empty());

  const DatasetBundle b = toy_bundle();
  const BundleDiagnostics v = validate_bundle(b);
  std::size_t train_total = 0;
  for (std::size_t c : v.train_per_class) train_total += c;
  REQUIRE(train_total == b.graph.train_mask.size());
  REQUIRE(v.feature_sparsity >= 0.0);
  REQUIRE(v.feature_sparsity <= 1.0);
}
