#include "sparsehdp/alias.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "sparsehdp/error.hpp"

namespace shdp {

AliasTable::AliasTable(std::span<const double> weights) {
  std::vector<std::uint32_t> support(weights.size());
  std::iota(support.begin(), support.end(), 0U);
  rebuild(weights, support);
}

AliasTable::AliasTable(std::span<const double> weights, std::span<const std::uint32_t> support) {
  rebuild(weights, support);
}

void AliasTable::rebuild(std::span<const double> weights, std::span<const std::uint32_t> support) {
  if (weights.size() != support.size()) {
    throw ConfigError("alias table: weights and support differ in length");
  }
  double total = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ConfigError("alias table: weights must be nonnegative and finite, got " +
                        std::to_string(w));
    }
    total += w;
  }
  const std::size_t k = weights.size();
  prob_.assign(k, 0.0);
  alias_.resize(k);
  support_.assign(support.begin(), support.end());
  total_weight_ = total;
  if (!(total > 0.0)) {
    prob_.clear();
    alias_.clear();
    support_.clear();
    total_weight_ = 0.0;
    return;
  }

  scaled_.resize(k);
  small_.clear();
  large_.clear();
  const double scale = static_cast<double>(k) / total;
  for (std::size_t j = 0; j < k; ++j) {
    scaled_[j] = weights[j] * scale;
    alias_[j] = static_cast<std::uint32_t>(j);
    (scaled_[j] < 1.0 ? small_ : large_).push_back(static_cast<std::uint32_t>(j));
  }
  while (!small_.empty() && !large_.empty()) {
    const std::uint32_t s = small_.back();
    small_.pop_back();
    const std::uint32_t l = large_.back();
    prob_[s] = scaled_[s];
    alias_[s] = l;
    // (scaled_[l] + scaled_[s]) - 1 loses less precision than scaled_[l] - (1 - scaled_[s])
    scaled_[l] = (scaled_[l] + scaled_[s]) - 1.0;
    if (scaled_[l] < 1.0) {
      large_.pop_back();
      small_.push_back(l);
    }
  }
  // leftovers are 1 up to rounding
  for (const auto j : large_) prob_[j] = 1.0;
  for (const auto j : small_) prob_[j] = 1.0;
}

std::uint32_t AliasTable::draw(Stream& rng) const {
  if (empty()) throw StateError("draw from an empty alias table");
  const auto j = static_cast<std::size_t>(draw_index(rng, prob_.size()));
  const double u = draw_uniform(rng);
  return support_[u < prob_[j] ? j : alias_[j]];
}

}  // namespace shdp
