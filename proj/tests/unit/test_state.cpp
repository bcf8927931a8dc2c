#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "sparsehdp/error.hpp"
#include "sparsehdp/sampler.hpp"
#include "sparsehdp/state.hpp"
#include "sparsehdp/synthetic.hpp"

using namespace shdp;

namespace {

Corpus make_corpus(std::size_t vocab, const std::vector<std::vector<WordId>>& docs) {
  std::vector<std::string> terms;
  for (std::size_t v = 0; v < vocab; ++v) terms.push_back("w" + std::to_string(v));
  return Corpus(Vocabulary(terms), docs);
}

HdpConfig small_config(std::uint32_t k_star) {
  HdpConfig c;
  c.k_star = k_star;
  c.iterations = 10;
  c.seed = 99;
  return c;
}

bool has_violation(const std::vector<Violation>& vs, const std::string& name) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.invariant == name; });
}

}  // namespace

TEST_CASE("HdpConfig validation") {
  HdpConfig c;
  CHECK_NOTHROW(c.validate());
  auto bad = c;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.beta = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.gamma = std::nan("");
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.k_star = 0;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("k_star"), ConfigError);
  bad = c;
  bad.iterations = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.threads = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("rebuild_counts from a hand example") {
  const Corpus c = make_corpus(3, {{0, 0}, {2}});
  const std::vector<TopicId> z{0, 0, 1};
  const auto counts = rebuild_counts(z, c, 3);
  CHECK(counts.doc_topic[0] == std::vector<TopicCount>{{0, 2}});
  CHECK(counts.doc_topic[1] == std::vector<TopicCount>{{1, 1}});
  CHECK(counts.topic_word[0] == std::vector<WordCount>{{0, 2}});
  CHECK(counts.topic_word[1] == std::vector<WordCount>{{2, 1}});
  CHECK(counts.topic_word[2].empty());
  CHECK(counts.topic_totals == std::vector<std::uint64_t>{2, 1, 0});
}

TEST_CASE("rebuild_counts with a single topic") {
  const Corpus c = make_corpus(4, {{0, 1, 3}, {2, 2}, {1}});
  const std::vector<TopicId> z(6, 2);
  const auto counts = rebuild_counts(z, c, 5);
  for (std::size_t d = 0; d < 3; ++d) {
    REQUIRE(counts.doc_topic[d].size() == 1);
    CHECK(counts.doc_topic[d][0].topic == 2);
    CHECK(counts.doc_topic[d][0].count == c.doc_length(d));
  }
}

TEST_CASE("rebuild_counts rejects bad input") {
  const Corpus c = make_corpus(3, {{0, 0}, {2}});
  CHECK_THROWS_AS(rebuild_counts(std::vector<TopicId>{0, 3, 0}, c, 3), StateError);
  CHECK_THROWS_AS(rebuild_counts(std::vector<TopicId>{0, 0}, c, 3), StateError);
}

TEST_CASE("rebuild_dtable hand examples") {
  const std::vector<std::vector<TopicCount>> same{{{0, 3}}, {{0, 3}}};
  auto dt = rebuild_dtable(same, 2);
  CHECK(dt[0] == std::vector<OccupancyCount>{{3, 2}});
  CHECK(dt[1].empty());

  const std::vector<std::vector<TopicCount>> mixed{{{0, 1}}, {{0, 2}}};
  dt = rebuild_dtable(mixed, 1);
  CHECK(dt[0] == std::vector<OccupancyCount>{{1, 1}, {2, 1}});

  dt = rebuild_dtable({}, 3);
  CHECK(dt.size() == 3);
  for (const auto& row : dt) CHECK(row.empty());
}

TEST_CASE("threshold_counts is the reverse cumulative sum") {
  DocCountTable dt(3);
  dt[0] = {{1, 1}, {2, 1}};
  dt[2] = {{3, 5}};
  CHECK(threshold_counts(dt, 0) == std::vector<std::uint64_t>{2, 1});
  CHECK(threshold_counts(dt, 1).empty());
  CHECK(threshold_counts(dt, 2) == std::vector<std::uint64_t>{5, 5, 5});
  dt[1] = {{1, 4}, {4, 2}};
  CHECK(threshold_counts(dt, 1) == std::vector<std::uint64_t>{6, 2, 2, 2});
}

TEST_CASE("init_state on two three-token documents") {
  const Corpus c = make_corpus(3, {{0, 1, 2}, {2, 2, 1}});
  const ModelState s = init_state(c, small_config(5));
  CHECK(s.doc_topic[0] == std::vector<TopicCount>{{0, 3}});
  CHECK(s.doc_topic[1] == std::vector<TopicCount>{{0, 3}});
  CHECK(s.topic_totals[0] == 6);
  CHECK(std::count_if(s.topic_totals.begin(), s.topic_totals.end(),
                      [](std::uint64_t n) { return n > 0; }) == 1);
  CHECK(s.l[0] == 2);
  CHECK(s.iteration == 0);
  CHECK(s.flag_topic() == 4);
  CHECK(validate_state(s, c).empty());
}

TEST_CASE("init_state counts only nonempty documents in l") {
  const Corpus c = make_corpus(2, {{0, 1}, {}, {1}});
  const ModelState s = init_state(c, small_config(3));
  CHECK(s.l[0] == 2);
  CHECK(validate_state(s, c).empty());
}

TEST_CASE("init_state errors") {
  CHECK_THROWS_AS(init_state(make_corpus(2, {{}, {}}), small_config(3)), StateError);
  CHECK_THROWS_AS(init_state(Corpus{}, small_config(3)), StateError);
  CHECK_THROWS_AS(init_state(make_corpus(2, {{0}}), small_config(0)), ConfigError);
}

TEST_CASE("validate_state passes on a fresh synthetic state") {
  SyntheticSpec spec;
  const Corpus c = generate_mixture_corpus(spec);
  for (const std::uint32_t k : {1u, 2u, 10u, 100u}) {
    const ModelState s = init_state(c, small_config(k));
    const auto vs = validate_state(s, c);
    CHECK(vs.empty());
  }
}

TEST_CASE("validate_state reports injected faults") {
  const Corpus c = make_corpus(4, {{0, 1, 2, 3}, {0, 0, 3}});
  ModelState good = init_state(c, small_config(4));
  // move two tokens elsewhere so several topics are live
  good.z[1] = 2;
  good.z[4] = 1;
  refresh_counts(good, c);
  good.l = {2, 1, 1, 0};
  REQUIRE(validate_state(good, c).empty());

  SUBCASE("corrupted m entry") {
    ModelState s = good;
    s.doc_topic[0][0].count += 1;
    const auto vs = validate_state(s, c);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].invariant == "m consistent with z");
    CHECK(vs[0].location == "document 0");
  }
  SUBCASE("psi scaled by two") {
    ModelState s = good;
    for (auto& p : s.psi) p *= 2.0;
    const auto vs = validate_state(s, c);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].invariant == "sum_k psi_k = 1");
  }
  SUBCASE("negative psi") {
    ModelState s = good;
    s.psi[0] = -0.1;
    CHECK(has_violation(validate_state(s, c), "psi_k >= 0"));
  }
  SUBCASE("corrupted n entry") {
    ModelState s = good;
    s.topic_word[0][0].count += 1;
    const auto vs = validate_state(s, c);
    CHECK(has_violation(vs, "n consistent with z"));
    CHECK(has_violation(vs, "sum_v n_{k,v} = n_{k,.}"));
  }
  SUBCASE("stale dtable") {
    ModelState s = good;
    s.dtable[0].clear();
    const auto vs = validate_state(s, c);
    CHECK(has_violation(vs, "dtable consistent with m"));
    CHECK(has_violation(vs, "dtable occupancy-weighted sum = sum_d m_{d,k}"));
  }
  SUBCASE("l below the occupied-document count") {
    ModelState s = good;
    s.l[0] = 1;
    CHECK(has_violation(validate_state(s, c), "D_{k,1} <= l_k <= sum_d m_{d,k}"));
  }
  SUBCASE("l above the token count") {
    ModelState s = good;
    s.l[1] = 2;
    CHECK(has_violation(validate_state(s, c), "D_{k,1} <= l_k <= sum_d m_{d,k}"));
  }
  SUBCASE("l on an empty topic") {
    ModelState s = good;
    s.l[3] = 1;
    CHECK(has_violation(validate_state(s, c), "l_k = 0 for empty topics"));
  }
  SUBCASE("unnormalized phi row") {
    ModelState s = good;
    REQUIRE_FALSE(s.phi[0].entries.empty());
    s.phi[0].entries[0].prob += 0.5;
    CHECK(has_violation(validate_state(s, c), "phi row sums to 1"));
  }
  SUBCASE("z out of range") {
    ModelState s = good;
    s.z[0] = 4;
    const auto vs = validate_state(s, c);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].invariant == "z within [0, K*)");
  }
  SUBCASE("misaligned z") {
    ModelState s = good;
    s.z.pop_back();
    const auto vs = validate_state(s, c);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].invariant == "z aligned with corpus");
  }
}

TEST_CASE("PhiColumns mirrors the rows by word") {
  std::vector<SparsePhiRow> rows(3);
  rows[0].entries = {{0, 0.25}, {2, 0.75}};
  rows[2].entries = {{2, 1.0}};
  PhiColumns cols;
  cols.rebuild(rows, 4);
  CHECK(cols.vocab_size() == 4);
  CHECK(cols.nnz() == 3);
  REQUIRE(cols.column(0).size() == 1);
  CHECK(cols.column(0)[0].topic == 0);
  CHECK(cols.column(1).empty());
  REQUIRE(cols.column(2).size() == 2);
  CHECK(cols.column(2)[0].topic == 0);
  CHECK(cols.column(2)[0].prob == 0.75);
  CHECK(cols.column(2)[1].topic == 2);
  CHECK(cols.column(3).empty());
}
