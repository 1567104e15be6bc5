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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "linesmith/corpus.hpp"
#include "linesmith/execution.hpp"
#include "linesmith/phonetics.hpp"
#include "linesmith/rhyme.hpp"

namespace linesmith {

/// $LINESMITH_DATA_DIR if set, else the data directory of the source tree.
std::filesystem::path default_data_dir();

struct ResourceConfig {
  std::filesystem::path data_dir = default_data_dir();
  std::optional<std::filesystem::path> dictionary;  // default: data_dir/pronouncing_dict.tsv
  std::optional<std::filesystem::path> table;       // default: data_dir/near_rhyme_table.txt
  std::optional<std::string> g2p_command;           // SubprocessEngine template
  PhonemizerConfig phonemizer;
};

std::shared_ptr<const Phonemizer> load_phonemizer(const ResourceConfig& config);
std::shared_ptr<const RhymeClassifier> load_classifier(const ResourceConfig& config);

/// Rhyme dictionary over every line of the corpus.
std::shared_ptr<const RhymeDictionary> build_rhyme_dictionary(
    std::shared_ptr<const RhymeClassifier> classifier, const Corpus& corpus,
    Execution exec = Execution::Parallel);

}  // namespace linesmith
