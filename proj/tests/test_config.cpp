#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "gearsound/config.hpp"
#include "gearsound/toml.hpp"

using namespace gearsound;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "gearsound_test_cfg";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / name).string();
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("the TOML subset parses sections, scalars and arrays") {
  const auto table = TomlTable::parse(
      "# comment\n"
      "top = 3\n"
      "[a]\n"
      "x = 1.5   # trailing comment\n"
      "y = \"hello # not a comment\"\n"
      "flag = true\n"
      "nums = [1, 2, 3.5]\n"
      "strs = [\"p\", \"q\"]\n");
  CHECK(table.get_int("top", 0) == 3);
  CHECK(table.get_double("a.x", 0.0) == doctest::Approx(1.5));
  CHECK(table.get_string("a.y", "") == "hello # not a comment");
  CHECK(table.get_bool("a.flag", false));
  CHECK(table.get_double_array("a.nums") == std::vector<double>{1.0, 2.0, 3.5});
  CHECK(table.get_string_array("a.strs") == std::vector<std::string>{"p", "q"});
  CHECK(table.get_int("absent", 42) == 42);
}

TEST_CASE("malformed TOML lines are rejected with the line number") {
  CHECK_THROWS_AS(TomlTable::parse("novalue\n"), InvalidConfig);
  CHECK_THROWS_AS(TomlTable::parse("[unterminated\n"), InvalidConfig);
  CHECK_THROWS_AS(TomlTable::parse("x = [1, \"a\"]\n"), InvalidConfig);
  CHECK_THROWS_AS(TomlTable::parse("x = \"open\n"), InvalidConfig);
  CHECK_THROWS_AS(TomlTable::parse("x = notanumber\n"), InvalidConfig);
  try {
    TomlTable::parse("ok = 1\nbad line\n");
    CHECK(false);
  } catch (const InvalidConfig& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("defaults carry the published pipeline constants") {
  const PipelineConfig config = default_pipeline_config();
  CHECK(config.band_low_hz == 1150.0);
  CHECK(config.band_high_hz == 5100.0);
  CHECK(config.ff_min_hz == 10.0);
  CHECK(config.ff_tolerance_rel == 0.01);
  CHECK(config.k_max == 4);
  CHECK(config.occ.bag_count == 100);
  CHECK(config.occ.prototype_fraction == doctest::Approx(0.1));
  CHECK(config.dataset.geometry.rated_speed_rpm == 1375.0);
  CHECK(config.dataset.geometry.teeth == std::vector<int>{16, 40, 12, 48});
  CHECK(config.dataset.total() == 138);
  CHECK(config.dataset.train_healthy + config.dataset.train_minor == 56);
  CHECK(config.dataset.test_major == 22);
  CHECK(config.dataset.noisy_test == 43);
  CHECK(config.dataset.sample_rate_hz == 48000.0);
  CHECK(config.feature_sets.size() == 6);
  CHECK(!config.digest.empty());
}

TEST_CASE("a config file overrides defaults and records its digest") {
  const std::string path = write_temp("override.toml",
                                      "[pipeline]\n"
                                      "band_low_hz = 900\n"
                                      "feature_sets = [\"les\", \"tvpa\", \"les+tvpa\"]\n"
                                      "[gear]\n"
                                      "rated_speed_rpm = 1500\n"
                                      "teeth = [20, 60]\n"
                                      "[dataset]\n"
                                      "test_major = 4\n");
  const PipelineConfig config = load_pipeline_config(path);
  CHECK(config.band_low_hz == 900.0);
  CHECK(config.band_high_hz == 5100.0);  // untouched default
  CHECK(config.dataset.geometry.teeth == std::vector<int>{20, 60});
  CHECK(config.dataset.test_major == 4);
  REQUIRE(config.feature_sets.size() == 3);
  CHECK(config.feature_sets[2] == FeatureSet::les_tvpa);
  CHECK(config.digest.size() == 16);
}

TEST_CASE("the digest changes iff the config bytes change") {
  const std::string a = write_temp("a.toml", "[pipeline]\nk_max = 4\n");
  const std::string b = write_temp("b.toml", "[pipeline]\nk_max = 4\n");
  const std::string c = write_temp("c.toml", "[pipeline]\nk_max = 5\n");
  const std::string d = write_temp("d.toml", "[pipeline]\nk_max = 4 \n");  // one byte
  CHECK(load_pipeline_config(a).digest == load_pipeline_config(b).digest);
  CHECK(load_pipeline_config(a).digest != load_pipeline_config(c).digest);
  CHECK(load_pipeline_config(a).digest != load_pipeline_config(d).digest);
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS(load_pipeline_config(write_temp("bad1.toml",
                                                  "[pipeline]\nband_low_hz = 6000\n")),
                  InvalidConfig);
  CHECK_THROWS_AS(load_pipeline_config(write_temp("bad2.toml",
                                                  "[pipeline]\nfeature_sets = [\"xyz\"]\n")),
                  InvalidConfig);
  CHECK_THROWS_AS(load_pipeline_config("/nonexistent/config.toml"), IoFailure);
}

TEST_CASE("the canonical serialization is itself a loadable config") {
  PipelineConfig config = default_pipeline_config();
  config.band_low_hz = 1000.0;
  config.k_max = 3;
  const std::string path = write_temp("canon.toml", canonical_config_toml(config));
  const PipelineConfig reloaded = load_pipeline_config(path);
  CHECK(reloaded.band_low_hz == 1000.0);
  CHECK(reloaded.k_max == 3);
  CHECK(reloaded.dataset.total() == config.dataset.total());
  CHECK(canonical_config_toml(reloaded) == canonical_config_toml(config));
}

TEST_CASE("feature set names round-trip") {
  for (FeatureSet set : all_feature_sets()) {
    CHECK(feature_set_from_string(feature_set_name(set)) == set);
  }
  CHECK(feature_set_from_string("les+tvpa") == FeatureSet::les_tvpa);
  CHECK_THROWS_AS(feature_set_from_string("bogus"), InvalidConfig);
}
