#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sparsehdp/corpus.hpp"
#include "sparsehdp/random.hpp"
#include "sparsehdp/state.hpp"
#include "sparsehdp/trace.hpp"

// Exact, slow reference samplers. They exist to check the sparse sampler's
// distributions on small problems and are single-threaded.
namespace shdp::oracle {

/// Dense Dirichlet(beta + n_k) draw from normalized Gamma variates, computed
/// in log space so tiny shapes do not underflow before normalization.
std::vector<double> draw_dirichlet_row(Stream& rng, std::span<const WordCount> n_k, double beta,
                                       std::size_t vocab_size);

/// b_i = 1 with probability alpha psi_{z_i} / (alpha psi_{z_i} + #{j < i : z_j = z_i}).
std::vector<std::uint8_t> sample_b_flags(Stream& rng, std::span<const TopicId> z_d,
                                         std::span<const double> psi, double alpha);

/// l_k = number of flagged tokens assigned to topic k; z and flags are aligned.
std::vector<std::uint64_t> l_from_flags(std::span<const TopicId> z,
                                        std::span<const std::uint8_t> flags,
                                        std::uint32_t k_star);

/// Number-of-tables law for m customers in a CRP with concentration theta:
///   P(L = t) = |s(m, t)| theta^t Gamma(theta) / Gamma(theta + m),
/// with unsigned Stirling numbers of the first kind from the triangular
/// recurrence in log space. Index t of the result is P(L = t); index 0 is 0.
std::vector<double> antoniak_pmf(std::uint32_t m, double theta);

struct GemMoments {
  std::vector<double> mean;
  std::vector<double> second_moment;
  std::vector<double> mean_se;
  std::vector<double> second_moment_se;
  double ess = 0.0;
  bool conclusive = false;  // false when ESS < 100
};

/// Self-normalized importance sampling of the truncated-GEM posterior given
/// categorical counts l: draws sticks Beta(1, gamma) with the last stick at 1,
/// weights by prod_k psi_k^{l_k}. Standard errors are sqrt(weighted var / ESS).
GemMoments gem_posterior_importance(Stream& rng, std::span<const std::uint64_t> l, double gamma,
                                    std::uint32_t k_star, std::uint64_t samples);

/// One iteration of the non-sparse reference chain: exact Dirichlet Phi rows,
/// the shared z step, explicit b flags, l from the flags, then Psi.
/// Advances state.iteration.
TraceRecord gibbs_iteration_exact(ModelState& state, const Corpus& corpus,
                                  const HdpConfig& config);

}  // namespace shdp::oracle
