#pragma once

// Executable focal policy: per-stage action distributions keyed by the
// focal player's (private history, public history) pair. Pairs never
// produced by extraction fall back to the uniform rule.
//
// The text format is self-contained: history ids are written as
// action/observation paths and re-interned on load, so a saved policy can be
// evaluated in a fresh process.

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ozsg/history.hpp"

namespace ozsg {

struct FocalPolicy {
  int player = 1;
  int horizon = 0;
  int num_actions = 0;  // row width; matches the owner's action count
  // rows[t]: (private history id, public history id) -> distribution.
  std::vector<std::map<std::pair<int, int>, std::vector<double>>> rows;
  std::string fallback = "uniform";

  bool has_row(int stage, int h, int hp) const;
  // The stored row, or the uniform fallback when the pair was never visited.
  std::vector<double> row(int stage, int h, int hp) const;
};

void save_policy(const FocalPolicy& p, const HistoryContext& ctx, std::ostream& os);
// Interns every path into ctx; throws ParseError on malformed input.
FocalPolicy load_policy(std::istream& is, HistoryContext& ctx);

}  // namespace ozsg
