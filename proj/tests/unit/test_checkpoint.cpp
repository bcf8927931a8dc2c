#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "sparsehdp/checkpoint.hpp"
#include "sparsehdp/error.hpp"
#include "sparsehdp/sampler.hpp"
#include "sparsehdp/synthetic.hpp"

using namespace shdp;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("shdp_ckpt_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

struct Fixture {
  Corpus corpus = generate_mixture_corpus(SyntheticSpec{});
  HdpConfig config;
  Fixture() {
    config.k_star = 12;
    config.seed = 4242;
    config.iterations = 20;
  }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "save then load restores the state") {
  const fs::path dir = scratch_dir("roundtrip");
  ModelState state = init_state(corpus, config);
  for (int i = 0; i < 7; ++i) gibbs_iteration(state, corpus, config);
  save_checkpoint(state, config, dir / "c.bin");
  CHECK_FALSE(fs::exists(dir / "c.bin.tmp"));

  const auto loaded = load_checkpoint(dir / "c.bin", corpus);
  CHECK(loaded.config == config);
  CHECK(loaded.state.iteration == 7);
  CHECK(loaded.state.z == state.z);
  CHECK(loaded.state.l == state.l);
  CHECK(loaded.state.psi == state.psi);
  const auto expected = rebuild_counts(state.z, corpus, config.k_star);
  CHECK(loaded.state.doc_topic == expected.doc_topic);
  CHECK(loaded.state.topic_word == expected.topic_word);
  CHECK(loaded.state.topic_totals == expected.topic_totals);
  CHECK(loaded.state.dtable == state.dtable);
  CHECK(validate_state(loaded.state, corpus).empty());
  fs::remove_all(dir);
}

TEST_CASE_FIXTURE(Fixture, "resuming reproduces an uninterrupted run") {
  const fs::path dir = scratch_dir("resume");
  ModelState straight = init_state(corpus, config);
  std::vector<double> straight_ll;
  for (int i = 0; i < 20; ++i) {
    straight_ll.push_back(gibbs_iteration(straight, corpus, config).joint_log_likelihood);
    if (i == 9) save_checkpoint(straight, config, dir / "mid.bin");
  }

  auto loaded = load_checkpoint(dir / "mid.bin", corpus);
  ModelState& resumed = loaded.state;
  REQUIRE(resumed.iteration == 10);
  for (int i = 10; i < 20; ++i) {
    CHECK(gibbs_iteration(resumed, corpus, loaded.config).joint_log_likelihood == straight_ll[i]);
  }
  CHECK(resumed.z == straight.z);
  CHECK(resumed.psi == straight.psi);
  CHECK(resumed.l == straight.l);
  fs::remove_all(dir);
}

TEST_CASE_FIXTURE(Fixture, "damaged checkpoints are rejected") {
  const fs::path dir = scratch_dir("damaged");
  ModelState state = init_state(corpus, config);
  gibbs_iteration(state, corpus, config);
  save_checkpoint(state, config, dir / "good.bin");
  const std::string bytes = read_bytes(dir / "good.bin");

  SUBCASE("truncated") {
    for (const std::size_t keep : {std::size_t{0}, std::size_t{5}, std::size_t{12},
                                   bytes.size() / 2, bytes.size() - 1}) {
      write_bytes(dir / "bad.bin", bytes.substr(0, keep));
      CHECK_THROWS_AS(load_checkpoint(dir / "bad.bin", corpus), CheckpointError);
    }
  }
  SUBCASE("flipped payload byte") {
    std::string b = bytes;
    b[b.size() / 2] = static_cast<char>(b[b.size() / 2] ^ 0x10);
    write_bytes(dir / "bad.bin", b);
    CHECK_THROWS_WITH_AS(load_checkpoint(dir / "bad.bin", corpus),
                         doctest::Contains("checksum"), CheckpointError);
  }
  SUBCASE("other version") {
    std::string b = bytes;
    b[8] = static_cast<char>(kCheckpointVersion + 1);
    write_bytes(dir / "bad.bin", b);
    CHECK_THROWS_WITH_AS(load_checkpoint(dir / "bad.bin", corpus), doctest::Contains("version"),
                         CheckpointError);
  }
  SUBCASE("not a checkpoint") {
    write_bytes(dir / "bad.bin", "hello world, this is text");
    CHECK_THROWS_AS(load_checkpoint(dir / "bad.bin", corpus), CheckpointError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_checkpoint(dir / "absent.bin", corpus), CheckpointError);
  }
  SUBCASE("different corpus") {
    SyntheticSpec other;
    other.num_docs = 49;
    CHECK_THROWS_AS(load_checkpoint(dir / "good.bin", generate_mixture_corpus(other)),
                    CheckpointError);
  }
  fs::remove_all(dir);
}
