#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "sparsehdp/alias.hpp"
#include "sparsehdp/random.hpp"
#include "sparsehdp/sampler.hpp"
#include "sparsehdp/state.hpp"
#include "sparsehdp/synthetic.hpp"

using namespace shdp;

namespace {

Stream bench_stream(std::uint64_t index) {
  return derive_stream({42, 0, UnitKind::init, index});
}

std::vector<double> random_weights(std::size_t n) {
  Stream s = bench_stream(1);
  std::vector<double> w(n);
  for (auto& x : w) x = draw_gamma(s, 0.5);
  return w;
}

void BM_AliasBuild(benchmark::State& st) {
  const auto weights = random_weights(static_cast<std::size_t>(st.range(0)));
  std::vector<std::uint32_t> support(weights.size());
  std::iota(support.begin(), support.end(), 0u);
  AliasTable table;
  for (auto _ : st) {
    table.rebuild(weights, support);
    benchmark::DoNotOptimize(table.total_weight());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_AliasBuild)->Arg(16)->Arg(256)->Arg(4096);

void BM_AliasDraw(benchmark::State& st) {
  const AliasTable table(random_weights(static_cast<std::size_t>(st.range(0))));
  Stream s = bench_stream(2);
  for (auto _ : st) benchmark::DoNotOptimize(table.draw(s));
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_AliasDraw)->Arg(16)->Arg(4096);

void BM_Poisson(benchmark::State& st) {
  const double rate = static_cast<double>(st.range(0)) / 100.0;
  Stream s = bench_stream(3);
  for (auto _ : st) benchmark::DoNotOptimize(draw_poisson(s, rate));
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_Poisson)->Arg(1)->Arg(500)->Arg(100000);

void BM_PhiRow(benchmark::State& st) {
  std::vector<WordCount> row;
  for (WordId v = 0; v < 10000; v += 10) row.push_back({v, 1u + v % 7});
  Stream s = bench_stream(4);
  for (auto _ : st) benchmark::DoNotOptimize(sample_phi_counts(s, row, 0.01, 10000));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(row.size()));
}
BENCHMARK(BM_PhiRow);

void BM_SampleToken(benchmark::State& st) {
  const auto k_star = static_cast<std::uint32_t>(st.range(0));
  std::vector<ColumnEntry> column;
  std::vector<double> weights;
  std::vector<std::uint32_t> support;
  for (TopicId k = 0; k < k_star; k += 3) {
    column.push_back({k, 1.0 / k_star});
    weights.push_back(0.1 / k_star);
    support.push_back(k);
  }
  const AliasTable alias(weights, support);
  DocTopicCounts doc(k_star);
  for (TopicId k = 0; k < k_star; k += 5) doc.add(k);
  TokenWork work;
  std::vector<BucketEntry> scratch;
  Stream s = bench_stream(5);
  for (auto _ : st) benchmark::DoNotOptimize(sample_token(s, column, alias, doc, work, scratch));
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_SampleToken)->Arg(100)->Arg(1000);

void BM_GibbsIteration(benchmark::State& st) {
  SyntheticSpec spec;
  spec.num_docs = 1000;
  spec.vocab_size = 500;
  spec.doc_length = 100;
  spec.topics = 20;
  const Corpus corpus = generate_mixture_corpus(spec);
  HdpConfig config;
  config.k_star = static_cast<std::uint32_t>(st.range(0));
  config.seed = 7;
  ModelState state = init_state(corpus, config);
  SamplerWorkspace workspace;
  workspace.record_timing = false;
  for (auto _ : st) benchmark::DoNotOptimize(gibbs_iteration(state, corpus, config, workspace));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(spec.num_docs * spec.doc_length));
}
BENCHMARK(BM_GibbsIteration)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
