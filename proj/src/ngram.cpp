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

#include "linesmith/ngram.hpp"

#include <algorithm>
#include <sstream>

#include "linesmith/error.hpp"
#include "linesmith/text.hpp"

namespace linesmith {

namespace {

constexpr std::string_view kMagic = "linesmith-ngram";

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string pick(const std::map<std::string, std::uint64_t>& counts, Rng& rng, bool allow_end) {
  std::uint64_t total = 0;
  for (const auto& [tok, c] : counts) {
    if (!allow_end && tok == kLineEnd) continue;
    total += c + 1;
  }
  if (total == 0) return {};
  std::uint64_t r = rng.uniform(total);
  for (const auto& [tok, c] : counts) {
    if (!allow_end && tok == kLineEnd) continue;
    if (r < c + 1) return tok;
    r -= c + 1;
  }
  return {};
}

}  // namespace

void NgramModel::count_line(const std::vector<std::string>& tokens, NgramTable& table) {
  const std::size_t ctx = static_cast<std::size_t>(order_ - 1);
  std::vector<std::string> padded(ctx, std::string(kLineStart));
  padded.insert(padded.end(), tokens.begin(), tokens.end());
  padded.emplace_back(kLineEnd);
  for (std::size_t i = ctx; i < padded.size(); ++i) {
    for (std::size_t len = 1; len <= ctx; ++len) {
      std::vector<std::string> context(padded.begin() + static_cast<std::ptrdiff_t>(i - len),
                                       padded.begin() + static_cast<std::ptrdiff_t>(i));
      ++table[std::move(context)][padded[i]];
    }
  }
}

NgramModel NgramModel::train(const std::vector<std::string>& lines, int order) {
  if (order < 2) throw InvalidRequest("n-gram order must be at least 2");
  NgramModel model;
  model.order_ = order;
  bool any = false;
  for (const auto& line : lines) {
    auto tokens = tokenize_line(line);
    if (tokens.empty()) continue;
    any = true;
    for (const auto& t : tokens) ++model.unigrams_[t];
    ++model.unigrams_[std::string(kLineEnd)];
    model.count_line(tokens, model.forward_);
    std::reverse(tokens.begin(), tokens.end());
    model.count_line(tokens, model.backward_);
  }
  if (!any) throw EmptyCorpus("no tokens to train an n-gram model on");
  return model;
}

double NgramModel::probability(Direction dir, std::span<const std::string> history,
                               std::string_view next) const {
  const std::size_t ctx = static_cast<std::size_t>(order_ - 1);
  std::vector<std::string> context(ctx, std::string(kLineStart));
  const std::size_t take = std::min(ctx, history.size());
  std::copy(history.end() - static_cast<std::ptrdiff_t>(take), history.end(),
            context.end() - static_cast<std::ptrdiff_t>(take));
  const auto& tbl = table(dir);
  const auto vocab = static_cast<double>(unigrams_.size());
  std::uint64_t joint = 0;
  std::uint64_t total = 0;
  if (const auto it = tbl.find(context); it != tbl.end()) {
    for (const auto& [tok, c] : it->second) total += c;
    if (const auto jt = it->second.find(std::string(next)); jt != it->second.end()) joint = jt->second;
  }
  return (static_cast<double>(joint) + 1.0) / (static_cast<double>(total) + vocab);
}

std::string NgramModel::sample_next(Direction dir, std::span<const std::string> history, Rng& rng,
                                    bool allow_end) const {
  const std::size_t ctx = static_cast<std::size_t>(order_ - 1);
  std::vector<std::string> padded(ctx, std::string(kLineStart));
  padded.insert(padded.end(), history.begin(), history.end());
  const auto& tbl = table(dir);
  for (std::size_t len = ctx; len >= 1; --len) {
    std::vector<std::string> context(padded.end() - static_cast<std::ptrdiff_t>(len), padded.end());
    const auto it = tbl.find(context);
    if (it == tbl.end()) continue;
    std::string tok = pick(it->second, rng, allow_end);
    if (!tok.empty()) return tok;
  }
  return pick(unigrams_, rng, allow_end);
}

void NgramModel::save(std::ostream& out) const {
  out << kMagic << " v1 order " << order_ << '\n';
  for (const auto& [tok, c] : unigrams_) out << "U\t" << tok << '\t' << c << '\n';
  for (const auto& [dir, tbl] : {std::pair{'F', &forward_}, std::pair{'B', &backward_}}) {
    for (const auto& [context, nexts] : *tbl) {
      for (const auto& [tok, c] : nexts) {
        out << dir << '\t' << join(context) << '\t' << tok << '\t' << c << '\n';
      }
    }
  }
}

NgramModel NgramModel::load(std::istream& in) {
  NgramModel model;
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty model file");
  std::istringstream hs(header);
  std::string magic, version, word;
  int order = 0;
  hs >> magic >> version >> word >> order;
  if (magic != kMagic || version != "v1" || word != "order" || order < 2) {
    throw ParseError("not a linesmith n-gram model");
  }
  model.order_ = order;
  std::string line;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (auto pos = line.find('\t'); ; pos = line.find('\t', start)) {
      cells.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    try {
      if (cells.size() == 3 && cells[0] == "U") {
        model.unigrams_[cells[1]] = std::stoull(cells[2]);
      } else if (cells.size() == 4 && (cells[0] == "F" || cells[0] == "B")) {
        auto& tbl = cells[0] == "F" ? model.forward_ : model.backward_;
        tbl[split_whitespace(cells[1])][cells[2]] = std::stoull(cells[3]);
      } else {
        throw ParseError("malformed model row", row);
      }
    } catch (const std::logic_error&) {
      throw ParseError("malformed count in model row", row);
    }
  }
  return model;
}

}  // namespace linesmith
