#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "trustlens/checkers.hpp"
#include "trustlens/corpus.hpp"

namespace trustlens::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(TRUSTLENS_FIXTURE_DIR) / name;
}

inline const CheckerSuite& shipped_suite() {
  static const CheckerSuite suite = CheckerSuite::load(default_data_dir());
  return suite;
}

// Builds a corpus from (role, text) pairs; each element is one turn with a
// single utterance. Speakers are "user" and "bot".
inline Dialog make_dialog(std::string id, const std::vector<std::pair<Role, std::string>>& lines) {
  Dialog d;
  d.id = std::move(id);
  for (const auto& [role, text] : lines) {
    Turn t;
    t.utterances.push_back({role == Role::Agent ? "bot" : "user", role, text, 0});
    d.turns.push_back(std::move(t));
  }
  return d;
}

inline Corpus make_corpus(std::vector<Dialog> dialogs) {
  return Corpus("test", std::move(dialogs), "test");
}

inline Corpus single_utterance_corpus(const std::string& text, Role role = Role::Agent) {
  return make_corpus({make_dialog("d0", {{role, text}})});
}

}  // namespace trustlens::testing
