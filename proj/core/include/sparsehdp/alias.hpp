#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sparsehdp/random.hpp"

namespace shdp {

/// Walker's alias method over a (possibly sparse) support. Construction is
/// O(K) using Vose's two-worklist scheme; each draw costs one index and one
/// uniform.
class AliasTable {
 public:
  AliasTable() = default;

  /// Dense support: entry j carries original index j.
  explicit AliasTable(std::span<const double> weights);
  /// Sparse support: entry j carries original index support[j].
  AliasTable(std::span<const double> weights, std::span<const std::uint32_t> support);

  /// Rebuilds in place, reusing storage. Throws ConfigError on a negative or
  /// non-finite weight or a size mismatch. An all-zero weight vector yields an
  /// empty table with total_weight() == 0.
  void rebuild(std::span<const double> weights, std::span<const std::uint32_t> support);

  /// Throws StateError if the table is empty.
  std::uint32_t draw(Stream& rng) const;

  bool empty() const { return total_weight_ <= 0.0; }
  std::size_t size() const { return prob_.size(); }
  double total_weight() const { return total_weight_; }

  std::span<const double> prob() const { return prob_; }
  std::span<const std::uint32_t> alias() const { return alias_; }
  std::span<const std::uint32_t> support() const { return support_; }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
  std::vector<std::uint32_t> support_;
  double total_weight_ = 0.0;
  // scratch reused across rebuilds
  std::vector<double> scaled_;
  std::vector<std::uint32_t> small_;
  std::vector<std::uint32_t> large_;
};

}  // namespace shdp
