#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace trustlens {

enum class Role { User, Agent, Other };

std::string_view role_name(Role role);
/// Throws Error(Parse) on anything other than "User", "Agent" or "Other".
Role parse_role(std::string_view name);

struct Utterance {
  std::string speaker_id;
  Role role = Role::User;
  std::string text;
  std::size_t index = 0;

  bool operator==(const Utterance&) const = default;
};

struct Turn {
  std::vector<Utterance> utterances;
  std::size_t index = 0;

  bool operator==(const Turn&) const = default;
};

struct Dialog {
  std::string id;
  std::optional<std::string> domain_tag;
  std::vector<Turn> turns;

  bool operator==(const Dialog&) const = default;
};

/// Identifies one utterance by position. Locators produced by checkers always
/// resolve within the corpus they scored.
struct UtteranceLocator {
  std::size_t dialog = 0;
  std::size_t turn = 0;
  std::size_t utterance = 0;

  auto operator<=>(const UtteranceLocator&) const = default;
};

/// Immutable dialog collection. Construction validates every invariant, so a
/// Corpus value is always well formed.
class Corpus {
 public:
  Corpus() = default;
  /// Throws Error(Validation) on duplicate dialog ids, empty dialogs or
  /// turns, or blank utterance text. Re-numbers turn and utterance indices.
  Corpus(std::string name, std::vector<Dialog> dialogs, std::string provenance);

  const std::string& name() const noexcept { return name_; }
  const std::string& provenance() const noexcept { return provenance_; }
  const std::vector<Dialog>& dialogs() const noexcept { return dialogs_; }
  bool empty() const noexcept { return dialogs_.empty(); }

  const Utterance* find(const UtteranceLocator& loc) const;
  const Utterance& at(const UtteranceLocator& loc) const;

  /// Visits every utterance in corpus order.
  template <typename Fn>
  void for_each_utterance(Fn&& fn) const {
    for (std::size_t d = 0; d < dialogs_.size(); ++d) {
      const auto& turns = dialogs_[d].turns;
      for (std::size_t t = 0; t < turns.size(); ++t) {
        const auto& utts = turns[t].utterances;
        for (std::size_t u = 0; u < utts.size(); ++u) {
          fn(UtteranceLocator{d, t, u}, utts[u]);
        }
      }
    }
  }

  bool operator==(const Corpus& other) const {
    return dialogs_ == other.dialogs_;
  }

 private:
  std::string name_;
  std::vector<Dialog> dialogs_;
  std::string provenance_;
};

struct CorpusStats {
  std::size_t dialog_count = 0;
  std::size_t turn_count = 0;
  std::size_t utterance_count = 0;
  std::map<Role, std::size_t> utterances_per_role;

  bool operator==(const CorpusStats&) const = default;
};

CorpusStats corpus_stats(const Corpus& corpus);

/// Canonical JSON Lines format: one dialog per line. Blank lines are skipped.
Corpus parse_canonical(std::istream& in, std::string name = "canonical");
void write_canonical(const Corpus& corpus, std::ostream& out);

/// Two-column TSV, question<TAB>answer, no header.
Corpus import_qa_pairs(std::istream& in, std::string name = "qa");

struct IrcImportOptions {
  double session_gap_seconds = 600.0;
};

/// Lines "ISO-8601 timestamp<TAB>nick<TAB>message". A gap strictly greater
/// than the threshold starts a new dialog; a speaker change starts a new turn.
Corpus import_irc_log(std::istream& in, std::string name = "irc",
                      const IrcImportOptions& options = {});

enum class CorpusFormat { Canonical, Qa, Irc };

CorpusFormat parse_corpus_format(std::string_view name);

/// Opens and parses a corpus file. An unreadable path is a parse failure.
Corpus load_corpus(const std::string& path, CorpusFormat format,
                   const IrcImportOptions& irc = {});

}  // namespace trustlens
