#include <algorithm>
#include <cctype>

#include "evidence.hpp"
#include "trustlens/checkers.hpp"
#include "trustlens/error.hpp"

namespace trustlens {

std::string_view abuse_label_name(AbuseLabel label) {
  switch (label) {
    case AbuseLabel::Hate: return "hate";
    case AbuseLabel::Offensive: return "offensive";
    case AbuseLabel::Neither: return "neither";
  }
  return "neither";
}

AbuseLabel parse_abuse_label(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "hate") return AbuseLabel::Hate;
  if (lower == "offensive") return AbuseLabel::Offensive;
  if (lower == "neither") return AbuseLabel::Neither;
  throw Error(ErrorKind::Parse, "unknown abuse label '" + std::string(name) + "'");
}

AbuseLexicon AbuseLexicon::load(const std::filesystem::path& dir) {
  AbuseLexicon lexicon;
  lexicon.hate = text::TermSet::load(dir / "hate.txt");
  lexicon.offensive = text::TermSet::load(dir / "offensive.txt");
  return lexicon;
}

AbuseLabel classify_text_abuse(std::string_view text, const AbuseLexicon& lexicon) {
  if (!lexicon.loaded()) throw Error(ErrorKind::Config, "abuse lexicon not loaded");
  const auto tokens = text::tokenize(text);
  if (lexicon.hate.matches_any(tokens)) return AbuseLabel::Hate;
  if (lexicon.offensive.matches_any(tokens)) return AbuseLabel::Offensive;
  return AbuseLabel::Neither;
}

AbuseLabel classify_utterance_abuse(const Utterance& utterance, const AbuseLexicon& lexicon) {
  return classify_text_abuse(utterance.text, lexicon);
}

void AbuseWeights::validate() const {
  if (!(hate >= offensive && offensive >= neither && neither >= 0.0 && hate <= 1.0)) {
    throw Error(ErrorKind::Config,
                "abuse weights must satisfy 1 >= hate >= offensive >= neither >= 0");
  }
}

double AbuseWeights::weight(AbuseLabel label) const {
  switch (label) {
    case AbuseLabel::Hate: return hate;
    case AbuseLabel::Offensive: return offensive;
    case AbuseLabel::Neither: return neither;
  }
  return neither;
}

void AbuseCounts::add(AbuseLabel label) {
  switch (label) {
    case AbuseLabel::Hate: ++hate; break;
    case AbuseLabel::Offensive: ++offensive; break;
    case AbuseLabel::Neither: ++neither; break;
  }
}

double aggregate_abuse(const AbuseCounts& counts, const AbuseWeights& weights) {
  weights.validate();
  const auto total = counts.total();
  if (total == 0) throw Error(ErrorKind::UndefinedScore, "abuse score needs at least one utterance");
  const double weighted = weights.hate * static_cast<double>(counts.hate) +
                          weights.offensive * static_cast<double>(counts.offensive) +
                          weights.neither * static_cast<double>(counts.neither);
  return weighted / static_cast<double>(total);
}

IssueScore score_abuse(const Corpus& corpus, const AbuseLexicon& lexicon,
                       const AbuseWeights& weights, std::size_t top_n) {
  if (!lexicon.loaded()) throw Error(ErrorKind::Config, "abuse lexicon not loaded");
  AbuseCounts counts;
  detail::TopEvidence top(top_n);
  corpus.for_each_utterance([&](const UtteranceLocator& loc, const Utterance& utt) {
    const AbuseLabel label = classify_utterance_abuse(utt, lexicon);
    counts.add(label);
    if (label != AbuseLabel::Neither) {
      top.offer({loc, weights.weight(label), std::string(abuse_label_name(label)), utt.text});
    }
  });

  IssueScore score;
  score.issue = IssueKind::AL;
  score.raw = aggregate_abuse(counts, weights);
  score.evidence = top.take();
  score.details = {{"hate", static_cast<double>(counts.hate)},
                   {"offensive", static_cast<double>(counts.offensive)},
                   {"neither", static_cast<double>(counts.neither)}};
  return score;
}

}  // namespace trustlens
