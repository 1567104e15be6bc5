// Copyright 2026 The Linesmith Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linesmith/rng.hpp"

namespace linesmith {

inline constexpr std::string_view kLineStart = "<s>";
inline constexpr std::string_view kLineEnd = "</s>";

enum class Direction { Forward, Backward };

/// Counts of next tokens keyed by context. Contexts of every length from 1
/// to order-1 are stored so generation can back off.
using NgramTable = std::map<std::vector<std::string>, std::map<std::string, std::uint64_t>>;

/// Line-level n-gram model over normalized tokens with <s> / </s> sentinels.
/// The backward table is the forward table of the reversed lines, which
/// lets generation run right-to-left from a fixed end word.
class NgramModel {
 public:
  NgramModel() = default;

  /// Throws EmptyCorpus if no line has a token; order must be >= 2.
  static NgramModel train(const std::vector<std::string>& lines, int order = 3);

  int order() const { return order_; }
  const NgramTable& table(Direction dir) const {
    return dir == Direction::Forward ? forward_ : backward_;
  }
  const std::map<std::string, std::uint64_t>& unigrams() const { return unigrams_; }
  std::size_t vocabulary_size() const { return unigrams_.size(); }
  bool knows(std::string_view word) const { return unigrams_.count(std::string(word)) > 0; }

  /// Add-one smoothed P(next | context) using the full context (padded with
  /// the start sentinel) over the observed vocabulary plus </s>.
  double probability(Direction dir, std::span<const std::string> history,
                     std::string_view next) const;

  /// Samples the next token after `history` (tokens in generation order).
  /// Uses the longest stored context, weighting observed continuations by
  /// count + 1, and backs off to unigrams for unseen contexts. With
  /// `allow_end` false the end sentinel is never returned.
  std::string sample_next(Direction dir, std::span<const std::string> history, Rng& rng,
                          bool allow_end = true) const;

  void save(std::ostream& out) const;
  static NgramModel load(std::istream& in);

  bool operator==(const NgramModel&) const = default;

 private:
  void count_line(const std::vector<std::string>& tokens, NgramTable& table);

  int order_ = 3;
  NgramTable forward_;
  NgramTable backward_;
  std::map<std::string, std::uint64_t> unigrams_;
};

}  // namespace linesmith
