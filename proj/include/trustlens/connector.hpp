#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "trustlens/checkers.hpp"
#include "trustlens/corpus.hpp"
#include "trustlens/rating.hpp"

namespace trustlens::connector {

/// How to talk to a chatbot's REST endpoint. Requests are POSTed as a JSON
/// object {<text_field>: probe, <session_field>: session id}; the reply text
/// is read from the response body at response_path (a JSON pointer).
struct EndpointConfig {
  std::string base_url;  // scheme://host[:port]
  std::string path = "/";
  std::string text_field = "text";
  std::string session_field = "session";
  std::string response_path = "/reply";
  std::chrono::milliseconds timeout{5000};
  std::map<std::string, std::string> headers;
  int retries = 2;
  std::chrono::milliseconds pacing{200};

  /// Throws Error(Config) on a malformed URL or empty response path.
  void validate() const;
};

/// Endpoint config file: {"url": "http://host:port/path", "text_field": ...,
/// "session_field": ..., "response_path": ..., "timeout_ms": ...,
/// "headers": {...}, "retries": ..., "pacing_ms": ...}. Only url is required.
EndpointConfig load_endpoint_config(const std::filesystem::path& path);
EndpointConfig endpoint_config_from_json_text(const std::string& json_text);

/// One request/response exchange with retries. Throws Error(Transport) once
/// the retry budget is spent on timeouts, non-2xx statuses or replies
/// missing the response path.
std::string send_probe(const EndpointConfig& config, const std::string& session_id,
                       const std::string& text);

/// A live or simulated chatbot.
class ChatEndpoint {
 public:
  virtual ~ChatEndpoint() = default;
  virtual std::string send(const std::string& session_id, const std::string& text) = 0;
};

class HttpChatEndpoint : public ChatEndpoint {
 public:
  explicit HttpChatEndpoint(EndpointConfig config);
  std::string send(const std::string& session_id, const std::string& text) override;

 private:
  EndpointConfig config_;
};

/// Replies with the probe text. Backs --dry-run.
class EchoEndpoint : public ChatEndpoint {
 public:
  std::string send(const std::string& session_id, const std::string& text) override;
};

struct Probe {
  std::string text;
  std::optional<AbuseLabel> label;
};

class ProbeGenerator {
 public:
  virtual ~ProbeGenerator() = default;
  /// nullopt once exhausted.
  virtual std::optional<Probe> next() = 0;
};

/// Reads utterances typed by a user, one per line, until EOF or "/quit".
class InteractiveGenerator : public ProbeGenerator {
 public:
  InteractiveGenerator(std::istream& in, std::ostream* prompt_out);
  std::optional<Probe> next() override;

 private:
  std::istream& in_;
  std::ostream* prompt_out_;
};

/// Plays back a fixed list of probes in order.
class ScriptedGenerator : public ProbeGenerator {
 public:
  explicit ScriptedGenerator(std::vector<Probe> probes);
  /// One probe per non-blank line; '#' lines are skipped.
  static ScriptedGenerator load(const std::filesystem::path& path);
  std::optional<Probe> next() override;

 private:
  std::vector<Probe> probes_;
  std::size_t cursor_ = 0;
};

/// Plays back a labeled probe dataset for one issue. Only AL has a labeled
/// dataset format ("text<TAB>label", label in {hate, offensive, neither}).
class IssueDatasetGenerator : public ProbeGenerator {
 public:
  IssueDatasetGenerator(IssueKind issue, std::vector<Probe> probes);
  static IssueDatasetGenerator load(IssueKind issue, const std::filesystem::path& path);
  std::optional<Probe> next() override;

  const std::vector<Probe>& probes() const noexcept { return probes_; }

 private:
  IssueKind issue_;
  std::vector<Probe> probes_;
  std::size_t cursor_ = 0;
};

std::vector<Probe> parse_labeled_probes(std::istream& in);

struct Exchange {
  std::string probe;
  std::string reply;
  bool failed = false;
  std::string error;
  std::int64_t sent_at_ms = 0;
  std::int64_t replied_at_ms = 0;

  bool operator==(const Exchange&) const = default;
};

struct SessionTranscript {
  std::string session_id;
  std::vector<Exchange> exchanges;

  /// One dialog, one turn per exchange: the probe as a User utterance and,
  /// unless the exchange failed, the reply as an Agent utterance.
  Corpus to_corpus() const;
};

/// Canonical corpus JSONL (one dialog) with the raw exchanges attached under
/// an extra "transcript" field that corpus parsing ignores.
void save_transcript(const SessionTranscript& transcript, std::ostream& out);
void save_transcript(const SessionTranscript& transcript, const std::filesystem::path& path);

/// Running AL/CC scores emitted after each chatbot reply. `utterance` is the
/// reply's position among all transcript-corpus utterances; the running
/// values cover that utterance and everything before it, probes included.
struct PartialRating {
  std::size_t utterance = 0;
  std::size_t exchange = 0;
  std::string abuse_label;
  double cc_utterance = 0.0;
  double al_running = 0.0;
  double cc_running = 0.0;

  bool operator==(const PartialRating&) const = default;
};

/// Incremental AL/CC scoring over an utterance stream.
class StreamingScorer {
 public:
  explicit StreamingScorer(const CheckerSuite& suite);
  /// Folds one utterance into the running aggregates and returns the
  /// partial as of that utterance.
  PartialRating add(const Utterance& utterance, std::size_t exchange);

 private:
  const CheckerSuite& suite_;
  AbuseCounts counts_;
  double cc_sum_ = 0.0;
  std::size_t seen_ = 0;
};

/// Partials recomputed from scratch at every Agent utterance of a corpus.
std::vector<PartialRating> replay_partials(const Corpus& corpus, const CheckerSuite& suite);

struct SessionOptions {
  std::string session_id = "session-1";
  std::chrono::milliseconds pacing{200};
};

struct SessionResult {
  SessionTranscript transcript;
  std::vector<PartialRating> partials;
  RatingReport report;
};

using PartialSink = std::function<void(const PartialRating&)>;
using ExchangeSink = std::function<void(const Exchange&)>;

/// Drives one sequential session. Throws Error(Precondition) when the
/// generator yields nothing and Error(Transport) when every probe failed.
SessionResult run_session(ChatEndpoint& endpoint, ProbeGenerator& generator,
                          const UserProfile& profile, const RatingConfig& config,
                          const SessionOptions& options = {},
                          const PartialSink& on_partial = {},
                          const ExchangeSink& on_exchange = {});

}  // namespace trustlens::connector
