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

#include "linesmith/resources.hpp"

#include <cstdlib>

namespace linesmith {

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("LINESMITH_DATA_DIR"); env && *env) return env;
  return LINESMITH_DATA_DIR;
}

std::shared_ptr<const Phonemizer> load_phonemizer(const ResourceConfig& config) {
  const auto dict_path = config.dictionary.value_or(config.data_dir / "pronouncing_dict.tsv");
  auto dict = std::make_shared<const PronouncingDictionary>(PronouncingDictionary::load(dict_path));
  std::shared_ptr<G2pEngine> engine;
  if (config.g2p_command) engine = std::make_shared<SubprocessEngine>(*config.g2p_command);
  return std::make_shared<const Phonemizer>(std::move(dict), std::move(engine), config.phonemizer);
}

std::shared_ptr<const RhymeClassifier> load_classifier(const ResourceConfig& config) {
  const auto table_path = config.table.value_or(config.data_dir / "near_rhyme_table.txt");
  auto table = std::filesystem::exists(table_path) || config.table
                   ? EquivalenceTable::load(table_path)
                   : EquivalenceTable::builtin();
  return std::make_shared<const RhymeClassifier>(load_phonemizer(config), std::move(table));
}

std::shared_ptr<const RhymeDictionary> build_rhyme_dictionary(
    std::shared_ptr<const RhymeClassifier> classifier, const Corpus& corpus, Execution exec) {
  return std::make_shared<const RhymeDictionary>(
      RhymeDictionary::build(std::move(classifier), corpus.all_lines(), exec));
}

}  // namespace linesmith
