#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "pip2/common/errors.hpp"
#include "pip2/diffcore/checkpoint.hpp"
#include "random_models.hpp"

using namespace pip2;
using namespace pip2::diffcore;

TEST_CASE("checkpoint round trip is bit exact") {
  std::mt19937_64 rng(77);
  Checkpoint c;
  c.networks.emplace_back("branch", testing::random_mlp({5, 7, 3}, rng));
  c.networks.emplace_back("trunk", testing::random_mlp({2, 4, 4, 3}, rng));
  c.scalars.emplace_back("br0", 0.1 + 1e-17);
  c.scalars.emplace_back("c", -3.0e-300);
  c.metadata_json = R"({"note":"x"})";
  const auto dir = std::filesystem::temp_directory_path() / "pip2_ckpt_test";
  std::filesystem::create_directories(dir);
  save_checkpoint(dir / "model.json", c);
  CHECK(std::filesystem::exists(dir / "model.bin"));
  const auto r = load_checkpoint(dir / "model.json");
  REQUIRE(r.networks.size() == 2);
  for (std::size_t n = 0; n < 2; ++n) {
    const auto& a = c.networks[n].second;
    const auto& b = r.networks[n].second;
    CHECK(r.networks[n].first == c.networks[n].first);
    REQUIRE(a.depth() == b.depth());
    for (std::size_t l = 0; l < a.depth(); ++l) {
      const auto& la = a.layers()[l];
      const auto& lb = b.layers()[l];
      REQUIRE(la.weight.rows() == lb.weight.rows());
      REQUIRE(la.weight.cols() == lb.weight.cols());
      CHECK(std::memcmp(la.weight.data(), lb.weight.data(), sizeof(double) * la.weight.size()) == 0);
      CHECK(std::memcmp(la.bias.data(), lb.bias.data(), sizeof(double) * la.bias.size()) == 0);
    }
  }
  CHECK(r.scalar("br0") == c.scalar("br0"));
  CHECK(r.scalar("c") == c.scalar("c"));
  CHECK_THROWS_AS(r.scalar("missing"), ConfigError);
  std::filesystem::resize_file(dir / "model.bin", 8);
  CHECK_THROWS_AS(load_checkpoint(dir / "model.json"), ConfigError);
  std::filesystem::remove_all(dir);
}
