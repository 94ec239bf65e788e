#ifndef GESS_ESS_CLASSIC_HPP
#define GESS_ESS_CLASSIC_HPP

#include <optional>
#include <vector>

#include "gess/core.hpp"

namespace gess {

// Single-population verdict for a symmetric two-action game.
struct EssReport {
  MixedStrategy candidate;
  bool is_nash = false;
  bool is_ess = false;
  // False when stability had to be settled by the second-order condition
  // because an alternative best reply exists.
  bool strict = false;
  // Deviation that broke a condition, or the tied best reply of a non-strict ESS.
  std::optional<MixedStrategy> witness;
};

inline constexpr double kEssTolerance = 1e-9;

bool is_nash_symmetric(MixedStrategy q, const PayoffMatrix2& m);

EssReport is_ess(MixedStrategy q, const PayoffMatrix2& m);

// Pure strategies plus the interior indifference point when it exists.
std::vector<MixedStrategy> ess_candidates_2x2(const PayoffMatrix2& m);

// Candidates that pass is_ess.
std::vector<MixedStrategy> all_ess_2x2(const PayoffMatrix2& m);

}  // namespace gess

#endif  // GESS_ESS_CLASSIC_HPP
