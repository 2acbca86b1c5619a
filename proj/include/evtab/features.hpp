#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evtab/corpus.hpp"

namespace evtab {

// Feature string -> dense id. Ids are assigned in first-seen order; once
// frozen the dictionary only answers lookups.
class FeatureDictionary {
 public:
  // Id of `name`, adding it when absent. Throws if frozen.
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  // Rebuilds a frozen dictionary from names in id order.
  static FeatureDictionary from_names(std::vector<std::string> names);

  friend bool operator==(const FeatureDictionary& a, const FeatureDictionary& b) {
    return a.names_ == b.names_ && a.frozen_ == b.frozen_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  bool frozen_ = false;
};

struct FeatureVector {
  std::vector<std::uint32_t> ids;  // sorted, unique; every value is 1
  std::size_t candidate = 0;       // 1-based candidate index, 0 if unknown

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Relative position of token i in a sentence of n tokens, in [0, 9].
int position_bin(std::size_t i, std::size_t n);

// Namespaced feature strings for the token at `token_index`. Requires a
// preprocessed abstract.
std::vector<std::string> extract_features(const Abstract& abstract, std::size_t token_index);

FeatureDictionary fit_dictionary(std::span<const std::vector<std::string>> feature_sets);

// Unknown names are dropped, duplicates collapse. Requires a frozen dictionary.
FeatureVector vectorize(std::span<const std::string> features, const FeatureDictionary& dictionary,
                        std::size_t candidate = 0);

}  // namespace evtab
