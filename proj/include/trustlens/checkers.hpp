#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "trustlens/corpus.hpp"
#include "trustlens/issue.hpp"
#include "trustlens/text.hpp"

namespace trustlens {

struct Evidence {
  UtteranceLocator locator;
  double value = 0.0;
  std::string label;
  std::string text;

  bool operator==(const Evidence&) const = default;
};

/// Raw [0,1] score for one issue plus supporting evidence.
struct IssueScore {
  IssueKind issue = IssueKind::AL;
  double raw = 0.0;
  std::optional<double> dispersion;
  std::vector<Evidence> evidence;
  /// Checker-specific intermediate values (label counts, complexity levels,
  /// epochs to elicit, ...).
  std::map<std::string, double> details;
  /// Notes a report reader must see, e.g. that a pessimistic default was used.
  std::vector<std::string> flags;

  bool operator==(const IssueScore&) const = default;
};

// ---------------------------------------------------------------------------
// Abusive language (AL)

enum class AbuseLabel { Hate, Offensive, Neither };

std::string_view abuse_label_name(AbuseLabel label);
/// Accepts "hate", "offensive", "neither" in any case.
AbuseLabel parse_abuse_label(std::string_view name);

struct AbuseLexicon {
  text::TermSet hate;
  text::TermSet offensive;

  bool loaded() const { return !hate.empty() || !offensive.empty(); }
  /// Reads hate.txt and offensive.txt from a lexicon directory.
  static AbuseLexicon load(const std::filesystem::path& dir);
};

/// Hate wins over Offensive when both term sets match.
AbuseLabel classify_utterance_abuse(const Utterance& utterance,
                                    const AbuseLexicon& lexicon);
AbuseLabel classify_text_abuse(std::string_view text, const AbuseLexicon& lexicon);

struct AbuseWeights {
  double hate = 1.0;
  double offensive = 0.5;
  double neither = 0.0;

  /// Throws Error(Config) unless hate >= offensive >= neither >= 0 and
  /// hate <= 1, keeping aggregates inside [0,1].
  void validate() const;
  double weight(AbuseLabel label) const;
};

struct AbuseCounts {
  std::uint64_t hate = 0;
  std::uint64_t offensive = 0;
  std::uint64_t neither = 0;

  std::uint64_t total() const { return hate + offensive + neither; }
  void add(AbuseLabel label);
  bool operator==(const AbuseCounts&) const = default;
};

/// Weighted mean label score. Throws Error(UndefinedScore) when no utterance
/// was counted.
double aggregate_abuse(const AbuseCounts& counts, const AbuseWeights& weights = {});

IssueScore score_abuse(const Corpus& corpus, const AbuseLexicon& lexicon,
                       const AbuseWeights& weights, std::size_t top_n);

// ---------------------------------------------------------------------------
// Bias (B)

struct BiasLexicons {
  text::TermSet subjective;
  text::TermSet hedges;
  text::TermSet factives;
  text::TermSet modality;
  text::TermSet sentiment;  // positive and negative polarity terms

  bool loaded() const;
  static BiasLexicons load(const std::filesystem::path& dir);
};

inline constexpr double kBiasScaleMax = 3.0;

/// Bias perception on [0,3]: the mean of five per-token feature rates (each
/// capped at 1), times three.
double check_bias_utterance(const Utterance& utterance, const BiasLexicons& lexicons);
double check_bias_text(std::string_view text, const BiasLexicons& lexicons);

/// raw = mean/3 and dispersion = population stddev/3 over every utterance.
IssueScore aggregate_bias(const Corpus& corpus, const BiasLexicons& lexicons,
                          std::size_t top_n = 5);

// ---------------------------------------------------------------------------
// Conversation complexity (CC)

/// Background word-frequency ranks (1 = most frequent). Tokens absent from
/// the table are treated as rarer than any listed token.
class FrequencyTable {
 public:
  FrequencyTable() = default;
  /// "token<TAB>rank" lines; '#' comments allowed.
  static FrequencyTable load(const std::filesystem::path& path);

  void set_rank(std::string token, std::uint32_t rank);
  std::optional<std::uint32_t> rank(const std::string& token) const;
  std::size_t size() const noexcept { return ranks_.size(); }
  bool empty() const noexcept { return ranks_.empty(); }

 private:
  std::unordered_map<std::string, std::uint32_t> ranks_;
};

struct ComplexityConfig {
  /// Tokens ranked above this are "rare".
  std::uint32_t rarity_rank_threshold = 2000;
  /// Length damping 1 - 1/(1 + tokens/length_scale).
  double length_scale = 10.0;
  /// Structure factor 1 - 1/(1 + (turns-1)/structure_scale).
  double structure_scale = 5.0;
  /// Share of the turn-level term in the per-dialog combination.
  double turn_share = 0.5;

  void validate() const;
};

struct ComplexityBreakdown {
  double utterance_level = 0.0;
  double turn_level = 0.0;
  double dialog_level = 0.0;

  bool operator==(const ComplexityBreakdown&) const = default;
};

/// Lexical specificity of one utterance on [0,1].
double utterance_complexity(std::string_view text, const FrequencyTable& table,
                            const ComplexityConfig& config = {});

ComplexityBreakdown complexity(const Corpus& corpus, const FrequencyTable& table,
                               const ComplexityConfig& config = {});

IssueScore score_complexity(const Corpus& corpus, const FrequencyTable& table,
                            const ComplexityConfig& config, std::size_t top_n);

// ---------------------------------------------------------------------------
// Information leakage (IL)

struct Keypair {
  std::string prompt;
  std::string secret;

  bool operator==(const Keypair&) const = default;
};

/// Reads a JSON array of {prompt, secret} objects.
std::vector<Keypair> load_keypairs(const std::filesystem::path& path);

struct LeakageConfig {
  std::vector<Keypair> keypairs;
  int max_epochs = 50;
  double accuracy_threshold = 0.5;
  int epoch_bin_low = 15;
  int epoch_bin_high = 30;
  std::uint64_t rng_seed = 42;
  /// Per-epoch growth of a planted secret's response probability.
  double reinforcement_rate = 0.1;
  /// Relative noise on each reinforcement step, drawn uniformly in [-n, n].
  double reinforcement_noise = 0.1;
  /// Corpora yielding fewer prompt/response pairs get the pessimistic default.
  std::size_t min_training_pairs = 20;
  double pessimistic_default = 0.5;
  /// Report 1 - score instead of the epochs-to-elicit mapping.
  bool invert_score = false;

  void validate() const;
};

/// Planted keypairs plus prompt/response pairs harvested from the corpus: an
/// Agent utterance is a response to the utterance right before it when a
/// different speaker said that one.
struct TrainingSet {
  std::vector<Keypair> corpus_pairs;
  std::vector<Keypair> planted;
  /// True when the corpus contains multi-party dialog (role Other), where
  /// prompt/response pairing is ill-defined.
  bool multiparty = false;
};

TrainingSet build_training_set(const Corpus& corpus,
                               const std::vector<Keypair>& keypairs);

/// Frequency-table prompt->response learner with per-epoch partial
/// reinforcement of planted secrets.
///
/// Corpus pairs are memorized as response counts per prompt. Each planted
/// secret carries a strength s in [0,1]; every epoch adds
/// rate * (1 + eps) to s (clamped), where eps is uniform in [-noise, noise].
/// Queried with a planted prompt, the model weighs the secret (s) against its
/// generic reply (1 - s) and returns the argmax; a tie goes to the generic
/// reply.
///
/// Noise draws come from std::mt19937_64 seeded with the configured seed:
/// eps = noise * (2u - 1), u = (draw >> 11) * 2^-53, one draw per planted
/// pair per epoch, in planted order.
class MemorizingLearner {
 public:
  MemorizingLearner(const TrainingSet& data, double rate, double noise,
                    std::uint64_t seed);

  void train_epoch();
  std::string respond(const std::string& prompt) const;
  int epochs_trained() const noexcept { return epochs_; }
  const std::vector<double>& strengths() const noexcept { return strength_; }

 private:
  std::vector<Keypair> planted_;
  std::vector<double> strength_;
  std::unordered_map<std::string, std::map<std::string, std::size_t>> table_;
  std::string generic_reply_;
  double rate_;
  double noise_;
  std::mt19937_64 rng_;
  int epochs_ = 0;
};

/// Epochs until the elicited fraction of planted secrets exceeds the
/// accuracy threshold; nullopt when not reached within max_epochs.
std::optional<int> leakage_probe(const Corpus& corpus, const LeakageConfig& config);

/// [0, low) -> 0, [low, high] -> 0.5, above high or never elicited -> 1.
/// With invert_score the result is 1 - that value.
double map_epochs_to_score(std::optional<int> epochs, const LeakageConfig& config);

IssueScore score_leakage(const Corpus& corpus, const LeakageConfig& config);

// ---------------------------------------------------------------------------

struct CheckerSuite {
  AbuseLexicon abuse_lexicon;
  AbuseWeights abuse_weights;
  BiasLexicons bias_lexicons;
  FrequencyTable frequencies;
  ComplexityConfig complexity;
  LeakageConfig leakage;
  std::size_t evidence_top_n = 5;

  /// Loads lexicons/, wordfreq_en_top10k.tsv and keypairs.json from a data
  /// directory. Throws Error(Config) for anything missing.
  static CheckerSuite load(const std::filesystem::path& data_dir);
};

/// Directory holding the shipped lexicons and tables: $TRUSTLENS_DATA_DIR if
/// set, otherwise the install/source data directory baked in at build time.
std::filesystem::path default_data_dir();

/// Dispatches to the issue's pipeline. Throws Error(UndefinedScore) on an
/// empty corpus.
IssueScore run_checker(IssueKind issue, const Corpus& corpus, const CheckerSuite& suite);

}  // namespace trustlens
