#include "trustlens/connector.hpp"

#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "trustlens/error.hpp"
#include "trustlens/text.hpp"

namespace trustlens::connector {

using json = nlohmann::json;

namespace {

const std::regex& url_pattern() {
  static const std::regex re(R"(^(https?)://([A-Za-z0-9.\-_]+|\[[0-9A-Fa-f:]+\])(:[0-9]{1,5})?(/[^\s]*)?$)");
  return re;
}

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

}  // namespace

void EndpointConfig::validate() const {
  std::smatch m;
  if (!std::regex_match(base_url, m, url_pattern()) || m[4].matched) {
    throw Error(ErrorKind::Config, "endpoint base URL must look like scheme://host[:port]: '" +
                                       base_url + "'");
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (m[1] == "https") throw Error(ErrorKind::Config, "this build has no TLS support");
#endif
  if (path.empty() || path.front() != '/') throw Error(ErrorKind::Config, "endpoint path must start with '/'");
  if (response_path.empty()) throw Error(ErrorKind::Config, "response path is empty");
  try {
    json::json_pointer ptr(response_path);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, "bad response path '" + response_path + "': " + e.what());
  }
  if (text_field.empty() || session_field.empty()) {
    throw Error(ErrorKind::Config, "request field names must be non-empty");
  }
  if (retries < 0) throw Error(ErrorKind::Config, "retries must be non-negative");
  if (timeout.count() <= 0) throw Error(ErrorKind::Config, "timeout must be positive");
}

EndpointConfig endpoint_config_from_json_text(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("endpoint config: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("url") || !doc["url"].is_string()) {
    throw Error(ErrorKind::Config, "endpoint config needs a string \"url\"");
  }
  EndpointConfig config;
  const std::string url = doc["url"].get<std::string>();
  std::smatch m;
  if (!std::regex_match(url, m, url_pattern())) {
    throw Error(ErrorKind::Config, "malformed endpoint URL '" + url + "'");
  }
  config.base_url = m[1].str() + "://" + m[2].str() + m[3].str();
  config.path = m[4].matched ? m[4].str() : "/";
  try {
    config.text_field = doc.value("text_field", config.text_field);
    config.session_field = doc.value("session_field", config.session_field);
    config.response_path = doc.value("response_path", config.response_path);
    config.timeout = std::chrono::milliseconds(doc.value("timeout_ms", config.timeout.count()));
    config.retries = doc.value("retries", config.retries);
    config.pacing = std::chrono::milliseconds(doc.value("pacing_ms", config.pacing.count()));
    if (doc.contains("headers")) {
      config.headers = doc["headers"].get<std::map<std::string, std::string>>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("endpoint config: ") + e.what());
  }
  config.validate();
  return config;
}

EndpointConfig load_endpoint_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read endpoint config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return endpoint_config_from_json_text(buf.str());
}

std::string send_probe(const EndpointConfig& config, const std::string& session_id,
                       const std::string& text) {
  config.validate();
  httplib::Client client(config.base_url);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  for (const auto& [k, v] : config.headers) headers.emplace(k, v);
  const std::string body = json{{config.text_field, text}, {config.session_field, session_id}}.dump();
  const json::json_pointer pointer(config.response_path);

  std::string last_error;
  const int attempts = config.retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    auto res = client.Post(config.path, headers, body, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    json reply;
    try {
      reply = json::parse(res->body);
    } catch (const json::exception&) {
      last_error = "response is not JSON";
      continue;
    }
    if (!reply.contains(pointer) || !reply.at(pointer).is_string()) {
      last_error = "response has no string at " + config.response_path;
      continue;
    }
    return reply.at(pointer).get<std::string>();
  }
  throw Error(ErrorKind::Transport, config.base_url + config.path + ": " + last_error + " (after " +
                                        std::to_string(attempts) + " attempts)");
}

HttpChatEndpoint::HttpChatEndpoint(EndpointConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::string HttpChatEndpoint::send(const std::string& session_id, const std::string& text) {
  return send_probe(config_, session_id, text);
}

std::string EchoEndpoint::send(const std::string&, const std::string& text) { return text; }

InteractiveGenerator::InteractiveGenerator(std::istream& in, std::ostream* prompt_out)
    : in_(in), prompt_out_(prompt_out) {}

std::optional<Probe> InteractiveGenerator::next() {
  std::string line;
  while (true) {
    if (prompt_out_) *prompt_out_ << "you> " << std::flush;
    if (!std::getline(in_, line)) return std::nullopt;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "/quit" || line == "/exit") return std::nullopt;
    if (line.find_first_not_of(" \t") != std::string::npos) return Probe{line, std::nullopt};
  }
}

ScriptedGenerator::ScriptedGenerator(std::vector<Probe> probes) : probes_(std::move(probes)) {}

ScriptedGenerator ScriptedGenerator::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read probe script " + path.string());
  std::vector<Probe> probes;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    probes.push_back({line, std::nullopt});
  }
  return ScriptedGenerator(std::move(probes));
}

std::optional<Probe> ScriptedGenerator::next() {
  if (cursor_ >= probes_.size()) return std::nullopt;
  return probes_[cursor_++];
}

std::vector<Probe> parse_labeled_probes(std::istream& in) {
  std::vector<Probe> probes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos || tab == 0) throw ParseError(line_no, "expected text<TAB>label");
    Probe probe;
    probe.text = line.substr(0, tab);
    try {
      probe.label = parse_abuse_label(line.substr(tab + 1));
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    probes.push_back(std::move(probe));
  }
  return probes;
}

IssueDatasetGenerator::IssueDatasetGenerator(IssueKind issue, std::vector<Probe> probes)
    : issue_(issue), probes_(std::move(probes)) {
  if (issue_ != IssueKind::AL) {
    throw Error(ErrorKind::Config, "no labeled probe dataset format for issue " +
                                       std::string(issue_code(issue_)));
  }
}

IssueDatasetGenerator IssueDatasetGenerator::load(IssueKind issue,
                                                  const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read probe dataset " + path.string());
  return IssueDatasetGenerator(issue, parse_labeled_probes(in));
}

std::optional<Probe> IssueDatasetGenerator::next() {
  if (cursor_ >= probes_.size()) return std::nullopt;
  return probes_[cursor_++];
}

namespace {

constexpr const char* kUserSpeaker = "user";
constexpr const char* kAgentSpeaker = "agent";

}  // namespace

Corpus SessionTranscript::to_corpus() const {
  Dialog dialog;
  dialog.id = session_id;
  for (const auto& ex : exchanges) {
    Turn turn;
    turn.utterances.push_back({kUserSpeaker, Role::User, ex.probe, 0});
    if (!ex.failed) turn.utterances.push_back({kAgentSpeaker, Role::Agent, ex.reply, 1});
    dialog.turns.push_back(std::move(turn));
  }
  std::vector<Dialog> dialogs;
  if (!dialog.turns.empty()) dialogs.push_back(std::move(dialog));
  return Corpus(session_id, std::move(dialogs), "live-session");
}

void save_transcript(const SessionTranscript& transcript, std::ostream& out) {
  std::ostringstream line;
  write_canonical(transcript.to_corpus(), line);
  std::string record = line.str();
  if (record.empty()) return;
  json obj = json::parse(record);
  json exchanges = json::array();
  for (const auto& ex : transcript.exchanges) {
    json e{{"probe", ex.probe},
           {"reply", ex.reply},
           {"failed", ex.failed},
           {"sent_at_ms", ex.sent_at_ms},
           {"replied_at_ms", ex.replied_at_ms}};
    if (!ex.error.empty()) e["error"] = ex.error;
    exchanges.push_back(std::move(e));
  }
  obj["transcript"] = std::move(exchanges);
  out << obj.dump() << '\n';
}

void save_transcript(const SessionTranscript& transcript, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Config, "cannot write transcript " + path.string());
  save_transcript(transcript, out);
}

StreamingScorer::StreamingScorer(const CheckerSuite& suite) : suite_(suite) {}

PartialRating StreamingScorer::add(const Utterance& utterance, std::size_t exchange) {
  const AbuseLabel label = classify_utterance_abuse(utterance, suite_.abuse_lexicon);
  counts_.add(label);
  const double cc = utterance_complexity(utterance.text, suite_.frequencies, suite_.complexity);
  cc_sum_ += cc;
  PartialRating p;
  p.utterance = seen_++;
  p.exchange = exchange;
  p.abuse_label = std::string(abuse_label_name(label));
  p.cc_utterance = cc;
  p.al_running = aggregate_abuse(counts_, suite_.abuse_weights);
  p.cc_running = cc_sum_ / static_cast<double>(seen_);
  return p;
}

std::vector<PartialRating> replay_partials(const Corpus& corpus, const CheckerSuite& suite) {
  std::vector<UtteranceLocator> order;
  corpus.for_each_utterance([&](const UtteranceLocator& loc, const Utterance&) { order.push_back(loc); });

  std::vector<PartialRating> partials;
  for (std::size_t end = 0; end < order.size(); ++end) {
    const Utterance& last = corpus.at(order[end]);
    if (last.role != Role::Agent) continue;
    AbuseCounts counts;
    double cc_sum = 0.0;
    for (std::size_t i = 0; i <= end; ++i) {
      const Utterance& u = corpus.at(order[i]);
      counts.add(classify_utterance_abuse(u, suite.abuse_lexicon));
      cc_sum += utterance_complexity(u.text, suite.frequencies, suite.complexity);
    }
    PartialRating p;
    p.utterance = end;
    p.exchange = order[end].turn;
    p.abuse_label = std::string(abuse_label_name(classify_utterance_abuse(last, suite.abuse_lexicon)));
    p.cc_utterance = utterance_complexity(last.text, suite.frequencies, suite.complexity);
    p.al_running = aggregate_abuse(counts, suite.abuse_weights);
    p.cc_running = cc_sum / static_cast<double>(end + 1);
    partials.push_back(std::move(p));
  }
  return partials;
}

SessionResult run_session(ChatEndpoint& endpoint, ProbeGenerator& generator,
                          const UserProfile& profile, const RatingConfig& config,
                          const SessionOptions& options, const PartialSink& on_partial,
                          const ExchangeSink& on_exchange) {
  if (options.session_id.empty()) throw Error(ErrorKind::Config, "session id is empty");
  SessionResult result;
  result.transcript.session_id = options.session_id;
  StreamingScorer scorer(config.checkers);
  std::size_t replies = 0;

  while (auto probe = generator.next()) {
    std::string probe_text;
    try {
      probe_text = text::normalize(probe->text);
    } catch (const Error&) {
      continue;
    }
    if (probe_text.empty()) continue;
    if (!result.transcript.exchanges.empty() && options.pacing.count() > 0) {
      std::this_thread::sleep_for(options.pacing);
    }

    Exchange ex;
    ex.probe = probe_text;
    ex.sent_at_ms = now_ms();
    try {
      ex.reply = text::normalize(endpoint.send(options.session_id, probe_text));
      if (ex.reply.empty()) {
        ex.failed = true;
        ex.error = "empty reply";
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Transport && e.kind() != ErrorKind::Parse) throw;
      ex.failed = true;
      ex.reply.clear();
      ex.error = e.what();
    }
    ex.replied_at_ms = now_ms();

    const std::size_t index = result.transcript.exchanges.size();
    result.transcript.exchanges.push_back(ex);
    if (on_exchange) on_exchange(ex);

    scorer.add({kUserSpeaker, Role::User, ex.probe, 0}, index);
    if (!ex.failed) {
      ++replies;
      PartialRating p = scorer.add({kAgentSpeaker, Role::Agent, ex.reply, 1}, index);
      result.partials.push_back(p);
      if (on_partial) on_partial(p);
    }
  }

  if (result.transcript.exchanges.empty()) {
    throw Error(ErrorKind::Precondition, "probe generator yielded no probes");
  }
  if (replies == 0) {
    throw Error(ErrorKind::Transport, "session aborted: all " +
                                          std::to_string(result.transcript.exchanges.size()) +
                                          " probes failed");
  }
  result.report = rate_corpus(result.transcript.to_corpus(), profile, config);
  return result;
}

}  // namespace trustlens::connector
