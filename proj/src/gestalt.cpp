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

#include <algorithm>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "linesmith/corpus.hpp"
#include "linesmith/text.hpp"

namespace linesmith {

namespace {

// Mirrors difflib.SequenceMatcher with isjunk=None and autojunk=True.
class SequenceMatcher {
 public:
  SequenceMatcher(const std::u32string& a, const std::u32string& b) : a_(a), b_(b) {
    const std::size_t n = b_.size();
    for (std::size_t j = 0; j < n; ++j) b2j_[b_[j]].push_back(j);
    if (n >= 200) {
      const std::size_t ntest = n / 100 + 1;
      std::vector<char32_t> popular;
      for (const auto& [c, idx] : b2j_) {
        if (idx.size() > ntest) popular.push_back(c);
      }
      for (char32_t c : popular) b2j_.erase(c);
    }
  }

  std::size_t matched_characters() const {
    std::size_t total = 0;
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> queue;
    queue.emplace_back(0, a_.size(), 0, b_.size());
    while (!queue.empty()) {
      const auto [alo, ahi, blo, bhi] = queue.back();
      queue.pop_back();
      const auto [i, j, k] = find_longest_match(alo, ahi, blo, bhi);
      if (k == 0) continue;
      total += k;
      if (alo < i && blo < j) queue.emplace_back(alo, i, blo, j);
      if (i + k < ahi && j + k < bhi) queue.emplace_back(i + k, ahi, j + k, bhi);
    }
    return total;
  }

 private:
  std::tuple<std::size_t, std::size_t, std::size_t> find_longest_match(std::size_t alo,
                                                                       std::size_t ahi,
                                                                       std::size_t blo,
                                                                       std::size_t bhi) const {
    std::size_t besti = alo;
    std::size_t bestj = blo;
    std::size_t bestsize = 0;
    std::unordered_map<std::size_t, std::size_t> j2len;
    for (std::size_t i = alo; i < ahi; ++i) {
      std::unordered_map<std::size_t, std::size_t> newj2len;
      const auto it = b2j_.find(a_[i]);
      if (it != b2j_.end()) {
        for (std::size_t j : it->second) {
          if (j < blo) continue;
          if (j >= bhi) break;
          std::size_t k = 1;
          if (j > 0) {
            const auto prev = j2len.find(j - 1);
            if (prev != j2len.end()) k = prev->second + 1;
          }
          newj2len[j] = k;
          if (k > bestsize) {
            besti = i + 1 - k;
            bestj = j + 1 - k;
            bestsize = k;
          }
        }
      }
      j2len.swap(newj2len);
    }
    // Popular characters never enter b2j; difflib extends the best match
    // across equal non-junk neighbours, and autojunked characters are not
    // junk for that purpose.
    while (besti > alo && bestj > blo && !is_junk(b_[bestj - 1]) &&
           a_[besti - 1] == b_[bestj - 1]) {
      --besti;
      --bestj;
      ++bestsize;
    }
    while (besti + bestsize < ahi && bestj + bestsize < bhi &&
           !is_junk(b_[bestj + bestsize]) && a_[besti + bestsize] == b_[bestj + bestsize]) {
      ++bestsize;
    }
    return {besti, bestj, bestsize};
  }

  static bool is_junk(char32_t) { return false; }

  const std::u32string& a_;
  const std::u32string& b_;
  std::unordered_map<char32_t, std::vector<std::size_t>> b2j_;
};

}  // namespace

double gestalt_similarity(std::string_view a, std::string_view b) {
  const std::u32string ua = utf8_decode(a);
  const std::u32string ub = utf8_decode(b);
  const std::size_t total = ua.size() + ub.size();
  if (total == 0) return 1.0;
  const SequenceMatcher matcher(ua, ub);
  return 2.0 * static_cast<double>(matcher.matched_characters()) / static_cast<double>(total);
}

}  // namespace linesmith
