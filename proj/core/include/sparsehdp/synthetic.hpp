#pragma once

#include <cstdint>

#include "sparsehdp/corpus.hpp"

namespace shdp {

/// Documents drawn from a finite mixture of topics. Topic t puts most of its
/// mass on its own contiguous block of V / topics words; each document mixes
/// topics with Dirichlet(doc_concentration) weights.
struct SyntheticSpec {
  std::size_t num_docs = 50;
  std::size_t vocab_size = 30;
  std::size_t doc_length = 40;
  std::size_t topics = 4;
  double in_block_weight = 5.0;    // Dirichlet shape for a topic's own block
  double off_block_weight = 0.01;  // Dirichlet shape elsewhere
  double doc_concentration = 0.5;
  std::uint64_t seed = 20240101;
};

Corpus generate_mixture_corpus(const SyntheticSpec& spec);

}  // namespace shdp
