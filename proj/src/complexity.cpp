#include <algorithm>
#include <charconv>
#include <fstream>

#include "evidence.hpp"
#include "trustlens/checkers.hpp"
#include "trustlens/error.hpp"

namespace trustlens {

FrequencyTable FrequencyTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read frequency table " + path.string());
  FrequencyTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    std::uint32_t rank = 0;
    const char* begin = tab == std::string::npos ? nullptr : line.data() + tab + 1;
    const char* end = line.data() + line.size();
    if (!begin || std::from_chars(begin, end, rank).ptr != end || rank == 0) {
      throw Error(ErrorKind::Config, path.string() + ":" + std::to_string(line_no) +
                                         ": expected token<TAB>rank");
    }
    const auto tokens = text::tokenize(std::string_view(line).substr(0, tab));
    if (tokens.size() != 1) continue;  // entries that do not survive tokenization
    auto it = table.ranks_.find(tokens.front());
    if (it == table.ranks_.end() || rank < it->second) table.ranks_[tokens.front()] = rank;
  }
  return table;
}

void FrequencyTable::set_rank(std::string token, std::uint32_t rank) {
  ranks_[std::move(token)] = rank;
}

std::optional<std::uint32_t> FrequencyTable::rank(const std::string& token) const {
  auto it = ranks_.find(token);
  if (it == ranks_.end()) return std::nullopt;
  return it->second;
}

void ComplexityConfig::validate() const {
  if (rarity_rank_threshold == 0 || !(length_scale > 0.0) || !(structure_scale > 0.0) ||
      !(turn_share >= 0.0 && turn_share <= 1.0)) {
    throw Error(ErrorKind::Config, "invalid complexity configuration");
  }
}

double utterance_complexity(std::string_view text, const FrequencyTable& table,
                            const ComplexityConfig& config) {
  if (table.empty()) throw Error(ErrorKind::Config, "frequency table not loaded");
  const auto tokens = text::tokenize(text);
  if (tokens.empty()) return 0.0;
  std::size_t rare = 0;
  for (const auto& token : tokens) {
    const auto r = table.rank(token);
    if (!r || *r > config.rarity_rank_threshold) ++rare;
  }
  const double n = static_cast<double>(tokens.size());
  const double damping = 1.0 - 1.0 / (1.0 + n / config.length_scale);
  return std::clamp(static_cast<double>(rare) / n * damping, 0.0, 1.0);
}

namespace {

struct ComplexityPass {
  ComplexityBreakdown breakdown;
  std::vector<Evidence> evidence;
};

ComplexityPass run_complexity(const Corpus& corpus, const FrequencyTable& table,
                              const ComplexityConfig& config, std::size_t top_n) {
  config.validate();
  if (corpus.empty()) throw Error(ErrorKind::UndefinedScore, "complexity needs a non-empty corpus");
  if (table.empty()) throw Error(ErrorKind::Config, "frequency table not loaded");

  detail::TopEvidence top(top_n);
  double utt_sum = 0.0;
  std::size_t utt_count = 0;
  double turn_sum = 0.0;
  std::size_t turn_count = 0;
  double dialog_sum = 0.0;

  const auto& dialogs = corpus.dialogs();
  for (std::size_t d = 0; d < dialogs.size(); ++d) {
    double dialog_turn_sum = 0.0;
    const auto& turns = dialogs[d].turns;
    for (std::size_t t = 0; t < turns.size(); ++t) {
      double turn_max = 0.0;
      const auto& utts = turns[t].utterances;
      for (std::size_t u = 0; u < utts.size(); ++u) {
        const double v = utterance_complexity(utts[u].text, table, config);
        utt_sum += v;
        ++utt_count;
        turn_max = std::max(turn_max, v);
        top.offer({{d, t, u}, v, "complexity", utts[u].text});
      }
      turn_sum += turn_max;
      ++turn_count;
      dialog_turn_sum += turn_max;
    }
    const double turns_n = static_cast<double>(turns.size());
    const double structure = 1.0 - 1.0 / (1.0 + (turns_n - 1.0) / config.structure_scale);
    dialog_sum += config.turn_share * (dialog_turn_sum / turns_n) +
                  (1.0 - config.turn_share) * structure;
  }

  ComplexityPass pass;
  pass.breakdown.utterance_level = std::clamp(utt_sum / static_cast<double>(utt_count), 0.0, 1.0);
  pass.breakdown.turn_level = std::clamp(turn_sum / static_cast<double>(turn_count), 0.0, 1.0);
  pass.breakdown.dialog_level =
      std::clamp(dialog_sum / static_cast<double>(dialogs.size()), 0.0, 1.0);
  pass.evidence = top.take();
  return pass;
}

}  // namespace

ComplexityBreakdown complexity(const Corpus& corpus, const FrequencyTable& table,
                               const ComplexityConfig& config) {
  return run_complexity(corpus, table, config, 0).breakdown;
}

IssueScore score_complexity(const Corpus& corpus, const FrequencyTable& table,
                            const ComplexityConfig& config, std::size_t top_n) {
  auto pass = run_complexity(corpus, table, config, top_n);
  IssueScore score;
  score.issue = IssueKind::CC;
  score.raw = pass.breakdown.dialog_level;
  score.evidence = std::move(pass.evidence);
  score.details = {{"utterance_level", pass.breakdown.utterance_level},
                   {"turn_level", pass.breakdown.turn_level},
                   {"dialog_level", pass.breakdown.dialog_level}};
  return score;
}

}  // namespace trustlens
