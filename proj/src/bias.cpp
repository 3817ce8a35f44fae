#include <algorithm>
#include <cmath>

#include "evidence.hpp"
#include "trustlens/checkers.hpp"
#include "trustlens/error.hpp"

namespace trustlens {

bool BiasLexicons::loaded() const {
  return !subjective.empty() && !hedges.empty() && !factives.empty() && !modality.empty() &&
         !sentiment.empty();
}

BiasLexicons BiasLexicons::load(const std::filesystem::path& dir) {
  BiasLexicons lex;
  lex.subjective = text::TermSet::load(dir / "subjective.txt");
  lex.hedges = text::TermSet::load(dir / "hedges.txt");
  lex.factives = text::TermSet::load(dir / "factives.txt");
  lex.modality = text::TermSet::load(dir / "modality.txt");
  // Polarity terms from both files form one feature.
  lex.sentiment = text::TermSet::load(dir / "sentiment_positive.txt");
  lex.sentiment.merge(text::TermSet::load(dir / "sentiment_negative.txt"));
  return lex;
}

double check_bias_text(std::string_view text, const BiasLexicons& lexicons) {
  if (!lexicons.loaded()) throw Error(ErrorKind::Config, "bias lexicons not loaded");
  const auto tokens = text::tokenize(text);
  if (tokens.empty()) return 0.0;
  const double n = static_cast<double>(tokens.size());
  const auto rate = [&](const text::TermSet& set) {
    return std::min(1.0, static_cast<double>(set.count_matches(tokens)) / n);
  };
  const double mean = (rate(lexicons.subjective) + rate(lexicons.hedges) +
                       rate(lexicons.factives) + rate(lexicons.modality) +
                       rate(lexicons.sentiment)) /
                      5.0;
  return std::clamp(kBiasScaleMax * mean, 0.0, kBiasScaleMax);
}

double check_bias_utterance(const Utterance& utterance, const BiasLexicons& lexicons) {
  return check_bias_text(utterance.text, lexicons);
}

IssueScore aggregate_bias(const Corpus& corpus, const BiasLexicons& lexicons, std::size_t top_n) {
  if (!lexicons.loaded()) throw Error(ErrorKind::Config, "bias lexicons not loaded");
  std::vector<double> values;
  detail::TopEvidence top(top_n);
  corpus.for_each_utterance([&](const UtteranceLocator& loc, const Utterance& utt) {
    const double v = check_bias_utterance(utt, lexicons);
    values.push_back(v);
    if (v > 0.0) top.offer({loc, v, "bias", utt.text});
  });
  if (values.empty()) throw Error(ErrorKind::UndefinedScore, "bias score needs a non-empty corpus");

  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  const double stddev = std::sqrt(sq / static_cast<double>(values.size()));

  IssueScore score;
  score.issue = IssueKind::B;
  score.raw = std::clamp(mean / kBiasScaleMax, 0.0, 1.0);
  score.dispersion = stddev / kBiasScaleMax;
  score.evidence = top.take();
  score.details = {{"mean_0_3", mean}, {"stddev_0_3", stddev}};
  return score;
}

}  // namespace trustlens
