#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "trustlens/checkers.hpp"
#include "trustlens/error.hpp"

namespace trustlens {

std::vector<Keypair> load_keypairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read keypairs file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorKind::Config, path.string() + ": expected a JSON array");
  std::vector<Keypair> pairs;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("prompt") || !item.contains("secret") ||
        !item["prompt"].is_string() || !item["secret"].is_string()) {
      throw Error(ErrorKind::Config, path.string() + ": each keypair needs string prompt and secret");
    }
    pairs.push_back({item["prompt"].get<std::string>(), item["secret"].get<std::string>()});
  }
  return pairs;
}

void LeakageConfig::validate() const {
  if (keypairs.empty()) throw Error(ErrorKind::Config, "leakage probe needs at least one keypair");
  if (!(accuracy_threshold > 0.0 && accuracy_threshold < 1.0)) {
    throw Error(ErrorKind::Config, "accuracy threshold must lie in (0, 1)");
  }
  if (epoch_bin_low < 0 || epoch_bin_low >= epoch_bin_high) {
    throw Error(ErrorKind::Config, "epoch bin boundaries must be increasing");
  }
  if (max_epochs < 1) throw Error(ErrorKind::Config, "max_epochs must be positive");
  if (!(reinforcement_rate >= 0.0 && reinforcement_rate <= 1.0)) {
    throw Error(ErrorKind::Config, "reinforcement rate must lie in [0, 1]");
  }
  if (!(reinforcement_noise >= 0.0 && reinforcement_noise < 1.0)) {
    throw Error(ErrorKind::Config, "reinforcement noise must lie in [0, 1)");
  }
  if (!(pessimistic_default >= 0.0 && pessimistic_default <= 1.0)) {
    throw Error(ErrorKind::Config, "pessimistic default must lie in [0, 1]");
  }
}

TrainingSet build_training_set(const Corpus& corpus, const std::vector<Keypair>& keypairs) {
  TrainingSet set;
  set.planted = keypairs;
  for (const auto& dialog : corpus.dialogs()) {
    const Utterance* prev = nullptr;
    for (const auto& turn : dialog.turns) {
      for (const auto& utt : turn.utterances) {
        if (utt.role == Role::Other) set.multiparty = true;
        if (prev && utt.role == Role::Agent && prev->speaker_id != utt.speaker_id) {
          set.corpus_pairs.push_back({prev->text, utt.text});
        }
        prev = &utt;
      }
    }
  }
  return set;
}

MemorizingLearner::MemorizingLearner(const TrainingSet& data, double rate, double noise,
                                     std::uint64_t seed)
    : planted_(data.planted),
      strength_(data.planted.size(), 0.0),
      rate_(rate),
      noise_(noise),
      rng_(seed) {
  std::map<std::string, std::size_t> response_counts;
  for (const auto& pair : data.corpus_pairs) {
    ++table_[pair.prompt][pair.secret];
    ++response_counts[pair.secret];
  }
  std::size_t best = 0;
  for (const auto& [response, count] : response_counts) {
    if (count > best) {
      best = count;
      generic_reply_ = response;
    }
  }
}

void MemorizingLearner::train_epoch() {
  for (double& s : strength_) {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    const double eps = noise_ * (2.0 * u - 1.0);
    s = std::clamp(s + rate_ * (1.0 + eps), 0.0, 1.0);
  }
  ++epochs_;
}

std::string MemorizingLearner::respond(const std::string& prompt) const {
  for (std::size_t i = 0; i < planted_.size(); ++i) {
    if (planted_[i].prompt != prompt) continue;
    const double s = strength_[i];
    return s > 1.0 - s ? planted_[i].secret : generic_reply_;
  }
  auto it = table_.find(prompt);
  if (it == table_.end()) return generic_reply_;
  const std::string* best = &generic_reply_;
  std::size_t best_count = 0;
  for (const auto& [response, count] : it->second) {
    if (count > best_count) {
      best_count = count;
      best = &response;
    }
  }
  return *best;
}

namespace {

std::optional<int> probe_training_set(const TrainingSet& data, const LeakageConfig& config) {
  MemorizingLearner learner(data, config.reinforcement_rate, config.reinforcement_noise,
                            config.rng_seed);
  const double total = static_cast<double>(data.planted.size());
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    learner.train_epoch();
    std::size_t elicited = 0;
    for (const auto& pair : data.planted) {
      if (learner.respond(pair.prompt) == pair.secret) ++elicited;
    }
    if (static_cast<double>(elicited) / total > config.accuracy_threshold) return epoch;
  }
  return std::nullopt;
}

}  // namespace

std::optional<int> leakage_probe(const Corpus& corpus, const LeakageConfig& config) {
  config.validate();
  return probe_training_set(build_training_set(corpus, config.keypairs), config);
}

double map_epochs_to_score(std::optional<int> epochs, const LeakageConfig& config) {
  double score = 1.0;
  if (epochs) {
    if (*epochs < config.epoch_bin_low) {
      score = 0.0;
    } else if (*epochs <= config.epoch_bin_high) {
      score = 0.5;
    }
  }
  return config.invert_score ? 1.0 - score : score;
}

IssueScore score_leakage(const Corpus& corpus, const LeakageConfig& config) {
  config.validate();
  if (corpus.empty()) throw Error(ErrorKind::UndefinedScore, "leakage needs a non-empty corpus");
  IssueScore score;
  score.issue = IssueKind::IL;
  const TrainingSet data = build_training_set(corpus, config.keypairs);
  score.details["training_pairs"] = static_cast<double>(data.corpus_pairs.size());
  score.details["keypairs"] = static_cast<double>(data.planted.size());

  if (data.multiparty) {
    score.raw = config.pessimistic_default;
    score.flags.push_back(
        "pessimistic default: multi-party dialog makes keypair injection ill-defined");
    return score;
  }
  if (data.corpus_pairs.size() < config.min_training_pairs) {
    score.raw = config.pessimistic_default;
    score.flags.push_back("pessimistic default: only " + std::to_string(data.corpus_pairs.size()) +
                          " prompt/response pairs (need " +
                          std::to_string(config.min_training_pairs) + ")");
    return score;
  }

  const auto epochs = probe_training_set(data, config);
  score.raw = map_epochs_to_score(epochs, config);
  score.details["elicited"] = epochs ? 1.0 : 0.0;
  if (epochs) score.details["epochs"] = static_cast<double>(*epochs);
  score.flags.push_back(config.invert_score
                            ? "score inverted: fewer epochs to elicit a secret scores higher"
                            : "score follows epochs-to-elicit: more epochs scores higher");
  return score;
}

}  // namespace trustlens
