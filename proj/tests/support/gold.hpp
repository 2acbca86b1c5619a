#pragma once

// Gold solutions. Synthetic abstracts mark P/A1/A2 at every mention, so a
// label may have several gold candidates; the first combination (in
// candidate order) that `accept` admits is returned.

#include <functional>
#include <optional>

#include "evtab/inference.hpp"
#include "evtab/preprocess.hpp"

namespace goldsol {

inline std::optional<evtab::Assignment> assignment(
    const evtab::Abstract& a, std::span<const evtab::Candidate> candidates,
    const std::function<bool(const evtab::Assignment&)>& accept = {}) {
  std::array<std::vector<std::size_t>, evtab::kNumTargets> options;
  for (const auto& c : candidates) {
    const evtab::Label l = a.tokens[c.token_index].gold;
    if (l != evtab::Label::O) options[evtab::index_of(l)].push_back(c.index);
  }
  evtab::Assignment z;
  auto rec = [&](auto&& self, std::size_t k) -> bool {
    if (k == evtab::kNumTargets) return !accept || accept(z);
    for (std::size_t i : options[k]) {
      z.z[k] = i;
      if (self(self, k + 1)) return true;
    }
    return false;
  };
  if (!rec(rec, 0)) return std::nullopt;
  return z;
}

}  // namespace goldsol
