#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "anomo/csv.hpp"
#include "anomo/error.hpp"
#include "anomo/experiment.hpp"
#include "helpers.hpp"

using namespace anomo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / fmt_name();
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static std::string fmt_name() {
    static int counter = 0;
    return "anomo_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
  }
};

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("dense csv round trip is exact") {
  TempDir dir;
  std::mt19937_64 rng(1);
  const Matrix m = anomo::testing::random_matrix(rng, 6, 9);
  io::write_dense_csv(dir.path / "m.csv", m);
  CHECK(io::read_dense_csv(dir.path / "m.csv") == m);
}

TEST_CASE("mask and triplet round trips") {
  TempDir dir;
  std::mt19937_64 rng(2);
  const Mask m = anomo::testing::random_mask(rng, 5, 12, 0.4);
  io::write_mask_csv(dir.path / "mask.csv", m, "link");
  CHECK(io::read_mask_csv(dir.path / "mask.csv", 5, 12) == m);
  CHECK_THROWS_AS(io::read_mask_csv(dir.path / "mask.csv", 4, 12), DataError);

  std::vector<io::Triplet> t{{0, 1, 0.1}, {3, 2, -1e-300}, {7, 0, 1.0 / 3.0}};
  io::write_triplets(dir.path / "t.csv", t, "a", "b", "c");
  const auto back = io::read_triplets(dir.path / "t.csv");
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].row == t[i].row);
    CHECK(back[i].col == t[i].col);
    CHECK(back[i].value == t[i].value);
  }
}

TEST_CASE("plain matrix parser accepts common separators and reports bad cells") {
  TempDir dir;
  write_text(dir.path / "a.txt", "1 2 3\n4,5,6\n\n7;8\t9\n");
  const Matrix a = io::read_plain_matrix(dir.path / "a.txt");
  CHECK(a.rows() == 3);
  CHECK(a(2, 2) == 9.0);
  write_text(dir.path / "b.txt", "1 2 3\n4 x 6\n");
  CHECK_THROWS_WITH_AS(io::read_plain_matrix(dir.path / "b.txt"), doctest::Contains("b.txt:2:2"), ParseError);
  write_text(dir.path / "c.txt", "1 2 3\n4 5\n");
  CHECK_THROWS_AS(io::read_plain_matrix(dir.path / "c.txt"), ParseError);
  CHECK_THROWS_AS(io::read_plain_matrix(dir.path / "missing.txt"), DataError);
}

TEST_CASE("dense csv parser reports line and column") {
  TempDir dir;
  write_text(dir.path / "d.csv", "row,1,2\n0,1.5,2\n1,3,oops\n");
  CHECK_THROWS_WITH_AS(io::read_dense_csv(dir.path / "d.csv"), doctest::Contains("d.csv:3:3"), ParseError);
}

TEST_CASE("config defaults round trip and unknown keys are rejected") {
  const Config def;
  const auto j = config_to_json(def);
  const auto back = config_from_json(j);
  CHECK(config_to_json(back).dump() == j.dump());
  CHECK(back.detector.hp.lambda == 0.9);
  CHECK(back.detector.hp.max_iter == 120);
  CHECK(back.traffic.observation_ratio == 30.0);

  auto bad = j;
  bad["detector"]["lamda"] = 0.5;
  CHECK_THROWS_AS(config_from_json(bad), ConfigError);
  bad = j;
  bad["network"]["nodes"] = "fifty";
  CHECK_THROWS_AS(config_from_json(bad), ConfigError);
  bad = j;
  bad["version"] = 99;
  CHECK_THROWS_AS(config_from_json(bad), ConfigError);
  bad = j;
  bad["extra"] = 1;
  CHECK_THROWS_AS(config_from_json(bad), ConfigError);

  const auto partial = config_from_json(nlohmann::json::parse(R"({"seed": 7, "network": {"flows": 100}})"));
  CHECK(partial.seed == 7);
  CHECK(partial.network.flows == 100);
  CHECK(partial.network.nodes == 50);
}

TEST_CASE("config validation catches out-of-range values") {
  Config c;
  c.traffic.observation_ratio = 0;
  CHECK_THROWS(validate_config(c));
  c = Config{};
  c.traffic.times = 10;
  CHECK_THROWS(validate_config(c));
  CHECK_NOTHROW(validate_config(Config{}));
}

TEST_CASE("derived seeds are stable and independent per stream") {
  CHECK(derive_seed(1, "mask") == derive_seed(1, "mask"));
  CHECK(derive_seed(1, "mask") != derive_seed(1, "flows"));
  CHECK(derive_seed(1, "mask") != derive_seed(2, "mask"));
}

TEST_CASE("synthetic datasets share masks across algorithms and nest across ratios") {
  Config c;
  c.network.nodes = 20;
  c.network.flows = 60;
  c.traffic.times = 60;
  const auto a = synthesize(c);
  CHECK(a.routing.flows() == 60);
  CHECK(a.links.cols() == 60);
  CHECK((a.links - make_link_matrix(a.routing, a.injected.flows)).cwiseAbs().maxCoeff() < 1e-12);
  c.traffic.observation_ratio = 50;
  const auto b = synthesize(c);
  CHECK(a.links == b.links);
  CHECK(((a.mask.array() == 1) <= (b.mask.array() == 1)).all());
  for (const auto& e : a.events) CHECK(e.start >= c.detector.hp.window);
}
