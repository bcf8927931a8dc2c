#include "sparsehdp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sparsehdp/error.hpp"
#include "sparsehdp/sampler.hpp"

namespace shdp::oracle {

namespace {

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

std::vector<double> draw_dirichlet_row(Stream& rng, std::span<const WordCount> n_k, double beta,
                                       std::size_t vocab_size) {
  if (!(beta > 0.0)) throw ConfigError("beta must be positive, got " + std::to_string(beta));
  std::vector<double> shape(vocab_size, beta);
  for (const auto& e : n_k) shape.at(e.word) += static_cast<double>(e.count);
  std::vector<double> logs(vocab_size);
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < vocab_size; ++v) {
    logs[v] = draw_log_gamma(rng, shape[v]);
    hi = std::max(hi, logs[v]);
  }
  double sum = 0.0;
  for (auto& x : logs) {
    x = std::exp(x - hi);
    sum += x;
  }
  for (auto& x : logs) x /= sum;
  return logs;
}

std::vector<std::uint8_t> sample_b_flags(Stream& rng, std::span<const TopicId> z_d,
                                         std::span<const double> psi, double alpha) {
  std::vector<std::uint8_t> flags(z_d.size(), 0);
  std::vector<std::uint32_t> seen(psi.size(), 0);
  for (std::size_t i = 0; i < z_d.size(); ++i) {
    const TopicId k = z_d[i];
    const double fresh = alpha * psi[k];
    const double repeats = static_cast<double>(seen[k]);
    flags[i] = repeats == 0.0 || draw_uniform(rng) * (fresh + repeats) < fresh ? 1 : 0;
    ++seen[k];
  }
  return flags;
}

std::vector<std::uint64_t> l_from_flags(std::span<const TopicId> z,
                                        std::span<const std::uint8_t> flags,
                                        std::uint32_t k_star) {
  if (z.size() != flags.size()) throw StateError("l_from_flags: z and flags differ in length");
  std::vector<std::uint64_t> l(k_star, 0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (flags[i]) ++l.at(z[i]);
  }
  return l;
}

std::vector<double> antoniak_pmf(std::uint32_t m, double theta) {
  if (m < 1) throw ConfigError("antoniak_pmf: m must be at least 1");
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw ConfigError("antoniak_pmf: theta must be positive, got " + std::to_string(theta));
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  // row[t] = log |s(n, t)|, starting from n = 1
  std::vector<double> row(m + 1, kNegInf);
  std::vector<double> next(m + 1, kNegInf);
  row[1] = 0.0;
  for (std::uint32_t n = 2; n <= m; ++n) {
    const double log_prev = std::log(static_cast<double>(n - 1));
    next[0] = kNegInf;
    for (std::uint32_t t = 1; t <= n; ++t) {
      next[t] = log_add(row[t - 1], row[t] == kNegInf ? kNegInf : log_prev + row[t]);
    }
    std::swap(row, next);
  }
  const double log_norm = std::lgamma(theta) - std::lgamma(theta + static_cast<double>(m));
  const double log_theta = std::log(theta);
  std::vector<double> pmf(m + 1, 0.0);
  for (std::uint32_t t = 1; t <= m; ++t) {
    pmf[t] = std::exp(row[t] + static_cast<double>(t) * log_theta + log_norm);
  }
  return pmf;
}

GemMoments gem_posterior_importance(Stream& rng, std::span<const std::uint64_t> l, double gamma,
                                    std::uint32_t k_star, std::uint64_t samples) {
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (l.size() != k_star || k_star < 1) throw ConfigError("l must have k_star entries");
  if (samples < 1) throw ConfigError("samples must be positive");

  std::vector<double> draws(samples * k_star);
  std::vector<double> log_w(samples);
  for (std::uint64_t s = 0; s < samples; ++s) {
    double rest = 1.0;
    double lw = 0.0;
    double* psi = draws.data() + s * k_star;
    for (std::uint32_t k = 0; k < k_star; ++k) {
      const double stick = k + 1 < k_star ? draw_beta(rng, 1.0, gamma) : 1.0;
      psi[k] = stick * rest;
      rest *= 1.0 - stick;
      if (l[k] > 0) lw += static_cast<double>(l[k]) * std::log(psi[k]);
    }
    log_w[s] = lw;
  }
  const double hi = *std::max_element(log_w.begin(), log_w.end());
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  for (auto& lw : log_w) {
    lw = std::isfinite(lw) ? std::exp(lw - hi) : 0.0;
    sum_w += lw;
    sum_w2 += lw * lw;
  }
  GemMoments out;
  out.ess = sum_w > 0.0 ? sum_w * sum_w / sum_w2 : 0.0;
  out.conclusive = out.ess >= 100.0;
  out.mean.assign(k_star, 0.0);
  out.second_moment.assign(k_star, 0.0);
  out.mean_se.assign(k_star, 0.0);
  out.second_moment_se.assign(k_star, 0.0);
  if (sum_w <= 0.0) return out;

  for (std::uint32_t k = 0; k < k_star; ++k) {
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::uint64_t s = 0; s < samples; ++s) {
      const double p = draws[s * k_star + k];
      m1 += log_w[s] * p;
      m2 += log_w[s] * p * p;
    }
    m1 /= sum_w;
    m2 /= sum_w;
    double v1 = 0.0;
    double v2 = 0.0;
    for (std::uint64_t s = 0; s < samples; ++s) {
      const double p = draws[s * k_star + k];
      v1 += log_w[s] * (p - m1) * (p - m1);
      v2 += log_w[s] * (p * p - m2) * (p * p - m2);
    }
    v1 /= sum_w;
    v2 /= sum_w;
    out.mean[k] = m1;
    out.second_moment[k] = m2;
    out.mean_se[k] = std::sqrt(v1 / out.ess);
    out.second_moment_se[k] = std::sqrt(v2 / out.ess);
  }
  return out;
}

TraceRecord gibbs_iteration_exact(ModelState& state, const Corpus& corpus,
                                  const HdpConfig& config) {
  TraceRecord record;
  const std::uint64_t iteration = state.iteration + 1;
  const std::size_t V = corpus.vocab_size();

  state.phi.resize(state.k_star);
  for (std::uint32_t k = 0; k < state.k_star; ++k) {
    Stream rng = derive_stream({config.seed, iteration, UnitKind::phi_row, k});
    const auto dense = draw_dirichlet_row(rng, state.topic_word[k], config.beta, V);
    SparsePhiRow row;
    for (std::size_t v = 0; v < V; ++v) {
      if (dense[v] > 0.0) row.entries.push_back({static_cast<WordId>(v), dense[v]});
    }
    state.phi[k] = std::move(row);
  }
  state.phi_columns.rebuild(state.phi, V);

  WordAliases aliases;
  aliases.rebuild(state.phi_columns, state.psi, config.alpha);
  HdpConfig serial = config;
  serial.threads = 1;
  sweep_documents(state, corpus, serial, iteration, aliases, record);

  std::vector<std::uint8_t> flags(state.z.size(), 0);
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    Stream rng = derive_stream({config.seed, iteration, UnitKind::b_flags, d});
    const std::size_t begin = corpus.doc_begin(d);
    const auto f = sample_b_flags(
        rng, std::span<const TopicId>(state.z.data() + begin, corpus.doc_length(d)), state.psi,
        config.alpha);
    std::copy(f.begin(), f.end(), flags.begin() + static_cast<std::ptrdiff_t>(begin));
  }
  state.l = l_from_flags(state.z, flags, state.k_star);
  state.dtable = rebuild_dtable(state.doc_topic, state.k_star);

  resample_psi(state, config, iteration);
  state.iteration = iteration;
  summarize_state(state, corpus, config, record);
  return record;
}

}  // namespace shdp::oracle
