#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "echoslam/errors.hpp"
#include "echoslam/nn/checkpoint.hpp"
#include "echoslam/nn/rng.hpp"
#include "test_util.hpp"

using namespace echoslam;
using namespace echoslam::nn;

namespace {

std::string temp_path(const char* name) {
  return std::string("ckpt_test_") + name + ".bin";
}

std::vector<char> slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  return std::vector<char>((std::istreambuf_iterator<char>(is)),
                           std::istreambuf_iterator<char>());
}

ParameterSet make_params(std::uint64_t seed) {
  Rng rng(seed);
  ParameterSet p;
  p.add("emb.w", testutil::rand_tensor(rng, {12, 64}));
  p.add("emb.b", testutil::rand_tensor(rng, {1, 64}));
  p.add("conv.w", testutil::rand_tensor(rng, {4, 2, 7}));
  return p;
}

}  // namespace

TEST_CASE("checkpoint round trip restores f32-cast values") {
  const std::string path = temp_path("roundtrip");
  ParameterSet a = make_params(1);
  save_checkpoint(a, path);

  ParameterSet b = make_params(2);
  load_checkpoint(b, path);
  for (std::size_t i = 0; i < a.count(); ++i) {
    const Tensor& ta = a.at(i).tensor();
    const Tensor& tb = b.at(i).tensor();
    for (std::size_t j = 0; j < ta.size(); ++j) {
      CHECK(tb[j] == static_cast<double>(static_cast<float>(ta[j])));
    }
  }

  // Saving what was loaded reproduces the file byte for byte.
  const std::string path2 = temp_path("roundtrip2");
  save_checkpoint(b, path2);
  CHECK(slurp(path) == slurp(path2));
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("checkpoint header carries name, shape, and payload") {
  const std::string path = temp_path("raw");
  ParameterSet a = make_params(3);
  save_checkpoint(a, path);
  auto entries = read_checkpoint(path);
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].first == "emb.w");
  CHECK(entries[0].second.shape() == std::vector<int>{12, 64});
  CHECK(entries[2].first == "conv.w");
  CHECK(entries[2].second.shape() == std::vector<int>{4, 2, 7});
  std::remove(path.c_str());
}

TEST_CASE("corrupt checkpoints are rejected") {
  const std::string path = temp_path("corrupt");
  ParameterSet a = make_params(4);
  save_checkpoint(a, path);
  auto bytes = slurp(path);

  SUBCASE("bad magic") {
    bytes[0] = 'X';
    std::ofstream(path, std::ios::binary).write(bytes.data(), bytes.size());
    CHECK_THROWS_AS(read_checkpoint(path), FormatError);
  }
  SUBCASE("truncated payload") {
    std::ofstream(path, std::ios::binary)
        .write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 10));
    CHECK_THROWS_AS(read_checkpoint(path), FormatError);
  }
  SUBCASE("trailing garbage") {
    bytes.push_back('z');
    std::ofstream(path, std::ios::binary).write(bytes.data(), bytes.size());
    CHECK_THROWS_AS(read_checkpoint(path), FormatError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_checkpoint("does_not_exist.bin"), FormatError);
  }
  std::remove(path.c_str());
}

TEST_CASE("strict load rejects mismatched parameter sets") {
  const std::string path = temp_path("strict");
  ParameterSet a = make_params(5);
  save_checkpoint(a, path);

  SUBCASE("different name") {
    Rng rng(6);
    ParameterSet b;
    b.add("emb.w", testutil::rand_tensor(rng, {12, 64}));
    b.add("emb.bias", testutil::rand_tensor(rng, {1, 64}));
    b.add("conv.w", testutil::rand_tensor(rng, {4, 2, 7}));
    CHECK_THROWS_AS(load_checkpoint(b, path), FormatError);
  }
  SUBCASE("different shape") {
    Rng rng(6);
    ParameterSet b;
    b.add("emb.w", testutil::rand_tensor(rng, {12, 32}));
    b.add("emb.b", testutil::rand_tensor(rng, {1, 64}));
    b.add("conv.w", testutil::rand_tensor(rng, {4, 2, 7}));
    CHECK_THROWS_AS(load_checkpoint(b, path), FormatError);
  }
  SUBCASE("different count") {
    Rng rng(6);
    ParameterSet b;
    b.add("emb.w", testutil::rand_tensor(rng, {12, 64}));
    CHECK_THROWS_AS(load_checkpoint(b, path), FormatError);
  }
  std::remove(path.c_str());
}
