#include "trustlens/corpus.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "trustlens/error.hpp"
#include "trustlens/text.hpp"

namespace trustlens {

using json = nlohmann::json;

std::string_view role_name(Role role) {
  switch (role) {
    case Role::User: return "User";
    case Role::Agent: return "Agent";
    case Role::Other: return "Other";
  }
  return "Other";
}

Role parse_role(std::string_view name) {
  if (name == "User") return Role::User;
  if (name == "Agent") return Role::Agent;
  if (name == "Other") return Role::Other;
  throw Error(ErrorKind::Parse,
              "unknown role '" + std::string(name) + "' (expected User, Agent or Other)");
}

Corpus::Corpus(std::string name, std::vector<Dialog> dialogs, std::string provenance)
    : name_(std::move(name)), dialogs_(std::move(dialogs)), provenance_(std::move(provenance)) {
  std::unordered_set<std::string> ids;
  for (auto& dialog : dialogs_) {
    if (!ids.insert(dialog.id).second) {
      throw Error(ErrorKind::Validation, "duplicate dialog id '" + dialog.id + "'");
    }
    if (dialog.turns.empty()) {
      throw Error(ErrorKind::Validation, "dialog '" + dialog.id + "' has no turns");
    }
    for (std::size_t t = 0; t < dialog.turns.size(); ++t) {
      auto& turn = dialog.turns[t];
      turn.index = t;
      if (turn.utterances.empty()) {
        throw Error(ErrorKind::Validation,
                    "dialog '" + dialog.id + "' turn " + std::to_string(t) + " is empty");
      }
      for (std::size_t u = 0; u < turn.utterances.size(); ++u) {
        auto& utt = turn.utterances[u];
        utt.index = u;
        if (utt.text.find_first_not_of(" \t\r\n\f\v") == std::string::npos) {
          throw Error(ErrorKind::Validation,
                      "dialog '" + dialog.id + "' has an utterance with empty text");
        }
      }
    }
  }
}

const Utterance* Corpus::find(const UtteranceLocator& loc) const {
  if (loc.dialog >= dialogs_.size()) return nullptr;
  const auto& turns = dialogs_[loc.dialog].turns;
  if (loc.turn >= turns.size()) return nullptr;
  const auto& utts = turns[loc.turn].utterances;
  if (loc.utterance >= utts.size()) return nullptr;
  return &utts[loc.utterance];
}

const Utterance& Corpus::at(const UtteranceLocator& loc) const {
  if (const Utterance* u = find(loc)) return *u;
  throw Error(ErrorKind::Validation, "utterance locator does not resolve");
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.dialog_count = corpus.dialogs().size();
  for (const auto& dialog : corpus.dialogs()) {
    stats.turn_count += dialog.turns.size();
    for (const auto& turn : dialog.turns) {
      stats.utterance_count += turn.utterances.size();
      for (const auto& utt : turn.utterances) ++stats.utterances_per_role[utt.role];
    }
  }
  return stats;
}

namespace {

const json& require(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(line, std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key, std::size_t line) {
  const json& value = require(obj, key, line);
  if (!value.is_string()) throw ParseError(line, std::string("field '") + key + "' must be a string");
  return value.get<std::string>();
}

std::string normalized_text(std::string_view raw, std::size_t line) {
  std::string text;
  try {
    text = text::normalize(raw);
  } catch (const Error& e) {
    throw ParseError(line, e.what());
  }
  if (text.empty()) throw ParseError(line, "utterance text is empty");
  return text;
}

Dialog parse_dialog_record(const std::string& record, std::size_t line) {
  json obj;
  try {
    obj = json::parse(record);
  } catch (const json::parse_error& e) {
    throw ParseError(line, std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw ParseError(line, "record must be a JSON object");

  Dialog dialog;
  dialog.id = require_string(obj, "id", line);
  if (auto it = obj.find("domain"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError(line, "field 'domain' must be a string");
    dialog.domain_tag = it->get<std::string>();
  }
  const json& turns = require(obj, "turns", line);
  if (!turns.is_array() || turns.empty()) throw ParseError(line, "'turns' must be a non-empty array");
  for (const json& turn_obj : turns) {
    if (!turn_obj.is_object()) throw ParseError(line, "turn must be an object");
    const json& utts = require(turn_obj, "utterances", line);
    if (!utts.is_array() || utts.empty()) {
      throw ParseError(line, "'utterances' must be a non-empty array");
    }
    Turn turn;
    turn.index = dialog.turns.size();
    for (const json& u : utts) {
      if (!u.is_object()) throw ParseError(line, "utterance must be an object");
      Utterance utt;
      utt.speaker_id = require_string(u, "speaker", line);
      try {
        utt.role = parse_role(require_string(u, "role", line));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(line, e.what());
      }
      utt.text = normalized_text(require_string(u, "text", line), line);
      utt.index = turn.utterances.size();
      turn.utterances.push_back(std::move(utt));
    }
    dialog.turns.push_back(std::move(turn));
  }
  return dialog;
}

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

Corpus parse_canonical(std::istream& in, std::string name) {
  std::vector<Dialog> dialogs;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (blank(line)) continue;
    Dialog dialog = parse_dialog_record(line, line_no);
    if (!ids.insert(dialog.id).second) {
      throw Error(ErrorKind::Validation,
                  "line " + std::to_string(line_no) + ": duplicate dialog id '" + dialog.id + "'");
    }
    dialogs.push_back(std::move(dialog));
  }
  return Corpus(std::move(name), std::move(dialogs), "canonical");
}

void write_canonical(const Corpus& corpus, std::ostream& out) {
  for (const auto& dialog : corpus.dialogs()) {
    json obj;
    obj["id"] = dialog.id;
    if (dialog.domain_tag) obj["domain"] = *dialog.domain_tag;
    json turns = json::array();
    for (const auto& turn : dialog.turns) {
      json utts = json::array();
      for (const auto& utt : turn.utterances) {
        utts.push_back({{"speaker", utt.speaker_id},
                        {"role", std::string(role_name(utt.role))},
                        {"text", utt.text}});
      }
      turns.push_back({{"utterances", std::move(utts)}});
    }
    obj["turns"] = std::move(turns);
    out << obj.dump() << '\n';
  }
}

Corpus import_qa_pairs(std::istream& in, std::string name) {
  std::vector<Dialog> dialogs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (blank(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(line_no, "expected question<TAB>answer");
    const std::string_view view(line);
    std::string question = normalized_text(view.substr(0, tab), line_no);
    std::string answer = normalized_text(view.substr(tab + 1), line_no);

    Turn turn;
    turn.utterances.push_back({"user", Role::User, std::move(question), 0});
    turn.utterances.push_back({"agent", Role::Agent, std::move(answer), 1});
    Dialog dialog;
    dialog.id = "qa-" + std::to_string(dialogs.size() + 1);
    dialog.turns.push_back(std::move(turn));
    dialogs.push_back(std::move(dialog));
  }
  return Corpus(std::move(name), std::move(dialogs), "qa");
}

namespace {

template <typename T>
bool read_int(std::string_view s, std::size_t& pos, std::size_t width, T& out) {
  if (pos + width > s.size()) return false;
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + width, out);
  if (ec != std::errc() || ptr != s.data() + pos + width) return false;
  pos += width;
  return true;
}

bool expect(std::string_view s, std::size_t& pos, char c) {
  if (pos >= s.size() || s[pos] != c) return false;
  ++pos;
  return true;
}

// YYYY-MM-DD[T ]HH:MM[:SS[.fff]][Z|+HH[:MM]|-HH[:MM]] -> seconds since epoch.
std::optional<double> parse_iso8601(std::string_view s) {
  using namespace std::chrono;
  std::size_t pos = 0;
  int y = 0;
  unsigned mo = 0, d = 0, hh = 0, mm = 0, ss = 0;
  if (!read_int(s, pos, 4, y) || !expect(s, pos, '-') || !read_int(s, pos, 2, mo) ||
      !expect(s, pos, '-') || !read_int(s, pos, 2, d)) {
    return std::nullopt;
  }
  if (pos >= s.size() || (s[pos] != 'T' && s[pos] != ' ')) return std::nullopt;
  ++pos;
  if (!read_int(s, pos, 2, hh) || !expect(s, pos, ':') || !read_int(s, pos, 2, mm)) {
    return std::nullopt;
  }
  double fraction = 0.0;
  if (pos < s.size() && s[pos] == ':') {
    ++pos;
    if (!read_int(s, pos, 2, ss)) return std::nullopt;
    if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
      std::size_t start = ++pos;
      double scale = 0.1;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        fraction += (s[pos] - '0') * scale;
        scale /= 10.0;
        ++pos;
      }
      if (pos == start) return std::nullopt;
    }
  }
  int offset_seconds = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      const int sign = s[pos] == '-' ? -1 : 1;
      ++pos;
      unsigned oh = 0, om = 0;
      if (!read_int(s, pos, 2, oh)) return std::nullopt;
      if (pos < s.size() && s[pos] == ':') ++pos;
      if (pos < s.size() && !read_int(s, pos, 2, om)) return std::nullopt;
      offset_seconds = sign * static_cast<int>(oh * 3600 + om * 60);
    }
  }
  if (pos != s.size()) return std::nullopt;

  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<double>(days) * 86400.0 + hh * 3600.0 + mm * 60.0 + ss + fraction -
         offset_seconds;
}

}  // namespace

Corpus import_irc_log(std::istream& in, std::string name, const IrcImportOptions& options) {
  if (!(options.session_gap_seconds >= 0.0)) {
    throw Error(ErrorKind::Config, "session gap threshold must be non-negative");
  }
  std::vector<Dialog> dialogs;
  std::optional<double> last_time;
  std::string first_speaker;
  std::string last_nick;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (blank(line)) continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) throw ParseError(line_no, "expected timestamp<TAB>nick<TAB>message");
    const std::string_view view(line);
    const auto when = parse_iso8601(view.substr(0, tab1));
    if (!when) {
      throw ParseError(line_no, "unparseable timestamp '" + std::string(view.substr(0, tab1)) + "'");
    }
    std::string nick(view.substr(tab1 + 1, tab2 - tab1 - 1));
    if (nick.empty()) throw ParseError(line_no, "empty nick");
    std::string message = normalized_text(view.substr(tab2 + 1), line_no);

    const bool new_session = !last_time || (*when - *last_time) > options.session_gap_seconds;
    if (new_session) {
      Dialog dialog;
      dialog.id = "irc-" + std::to_string(dialogs.size() + 1);
      dialogs.push_back(std::move(dialog));
      first_speaker = nick;
      last_nick.clear();
    }
    Dialog& dialog = dialogs.back();
    if (dialog.turns.empty() || nick != last_nick) {
      Turn turn;
      turn.index = dialog.turns.size();
      dialog.turns.push_back(std::move(turn));
    }
    Turn& turn = dialog.turns.back();
    const Role role = nick == first_speaker ? Role::User : Role::Other;
    turn.utterances.push_back({nick, role, std::move(message), turn.utterances.size()});
    last_nick = std::move(nick);
    last_time = when;
  }
  return Corpus(std::move(name), std::move(dialogs), "irc");
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "canonical" || name == "jsonl") return CorpusFormat::Canonical;
  if (name == "qa") return CorpusFormat::Qa;
  if (name == "irc") return CorpusFormat::Irc;
  throw Error(ErrorKind::Usage,
              "unknown corpus format '" + std::string(name) + "' (expected canonical, qa or irc)");
}

Corpus load_corpus(const std::string& path, CorpusFormat format, const IrcImportOptions& irc) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open corpus file " + path);
  const std::string name = std::filesystem::path(path).filename().string();
  switch (format) {
    case CorpusFormat::Canonical: return parse_canonical(in, name);
    case CorpusFormat::Qa: return import_qa_pairs(in, name);
    case CorpusFormat::Irc: return import_irc_log(in, name, irc);
  }
  return {};
}

}  // namespace trustlens
