#include "trustlens/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "trustlens/checkers.hpp"
#include "trustlens/connector.hpp"
#include "trustlens/corpus.hpp"
#include "trustlens/rating.hpp"
#include "trustlens/report_io.hpp"
#include "trustlens/sensitivity.hpp"
#include "trustlens/voting.hpp"

namespace trustlens::cli {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
    case ErrorKind::Precondition:
      return kUsage;
    case ErrorKind::Parse:
    case ErrorKind::Validation:
    case ErrorKind::Domain:
    case ErrorKind::UndefinedScore:
      return kParse;
    case ErrorKind::Config:
      return kConfig;
    case ErrorKind::Transport:
      return kTransport;
  }
  return kUsage;
}

namespace {

namespace fs = std::filesystem;

enum class ReportFormat { Json, Markdown };

struct CommonOptions {
  std::string data_dir;
  std::string profile = "P_CU";
  std::string profile_dir;
  std::string tie = "pessimistic";
  std::string bins;
  std::string out;
  std::string report = "json";
  std::uint64_t seed = 42;
  bool invert_leakage = false;
  int verbosity = 0;
};

fs::path data_dir_of(const CommonOptions& o) {
  return o.data_dir.empty() ? default_data_dir() : fs::path(o.data_dir);
}

fs::path profile_dir_of(const CommonOptions& o) {
  if (!o.profile_dir.empty()) return o.profile_dir;
  if (const char* home = std::getenv("HOME"); home && *home) {
    return fs::path(home) / ".trustlens" / "profiles";
  }
  return fs::path(".trustlens") / "profiles";
}

ReportFormat report_format(const CommonOptions& o) {
  if (o.report == "json") return ReportFormat::Json;
  if (o.report == "markdown" || o.report == "md") return ReportFormat::Markdown;
  throw Error(ErrorKind::Usage, "unknown report format '" + o.report + "' (expected json or markdown)");
}

BinningConfig parse_bins(const std::string& text) {
  BinningConfig bins;
  if (text.empty()) return bins;
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorKind::Usage, "--bins expects lo,hi");
  try {
    std::size_t used = 0;
    bins.low_upper = std::stod(text.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument("lo");
    const std::string hi = text.substr(comma + 1);
    bins.mid_upper = std::stod(hi, &used);
    if (used != hi.size()) throw std::invalid_argument("hi");
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::Usage, "--bins expects two numbers, e.g. 0.33,0.67");
  }
  try {
    bins.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Usage, std::string("--bins: ") + e.what());
  }
  return bins;
}

std::string builtin_names() {
  std::string names;
  for (const auto& p : builtin_profiles()) {
    if (!names.empty()) names += ", ";
    names += p.name();
  }
  return names;
}

UserProfile resolve_profile(const std::string& name, const CommonOptions& o) {
  if (auto p = find_builtin_profile(name)) return *p;
  const fs::path as_path(name);
  if (as_path.extension() == ".json" && fs::exists(as_path)) return load_profile(as_path);
  const fs::path stored = profile_dir_of(o) / (name + ".json");
  if (fs::exists(stored)) return load_profile(stored);
  throw Error(ErrorKind::Usage,
              "unknown profile '" + name + "'; builtin profiles: " + builtin_names());
}

RatingConfig rating_config(const CommonOptions& o) {
  RatingConfig config;
  config.checkers = CheckerSuite::load(data_dir_of(o));
  config.checkers.leakage.rng_seed = o.seed;
  config.checkers.leakage.invert_score = o.invert_leakage;
  config.binning = parse_bins(o.bins);
  config.tie_policy = parse_tie_policy(o.tie);
  return config;
}

// Writes to --out when given, otherwise to the command's output stream.
void emit(const std::string& text, const CommonOptions& o, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw Error(ErrorKind::Config, "cannot write " + o.out);
  file << text;
}

std::string render(const RatingReport& report, ReportFormat fmt) {
  return fmt == ReportFormat::Json ? dump_canonical(to_json(report)) : render_markdown(report);
}

void add_common(CLI::App& cmd, CommonOptions& o, bool rating) {
  cmd.add_option("--data-dir", o.data_dir, "Lexicon/frequency data directory (default: $TRUSTLENS_DATA_DIR)");
  cmd.add_option("--out", o.out, "Write the report to this file instead of stdout");
  cmd.add_option("--report", o.report, "Report format: json or markdown")->capture_default_str();
  cmd.add_option("--profile-dir", o.profile_dir, "Directory of user-defined profiles");
  if (!rating) return;
  cmd.add_option("--profile", o.profile, "Builtin profile name, stored profile name, or profile JSON path")
      ->capture_default_str();
  cmd.add_option("--tie", o.tie, "Tie policy: optimistic or pessimistic")->capture_default_str();
  cmd.add_option("--bins", o.bins, "Binning thresholds lo,hi (default 0.33,0.67)");
  cmd.add_option("--seed", o.seed, "Seed for the leakage probe")->capture_default_str();
  cmd.add_flag("--invert-leakage", o.invert_leakage, "Invert the epochs-to-elicit leakage score");
  cmd.add_flag("-v,--verbose", o.verbosity, "More diagnostics on stderr");
}

// ---------------------------------------------------------------------------

struct RateOptions {
  std::string corpus;
  std::string format = "canonical";
  double irc_gap = 600.0;
  bool stats = false;
};

int cmd_rate(const RateOptions& r, const CommonOptions& o, std::ostream& out, std::ostream& err) {
  const ReportFormat fmt = report_format(o);
  const UserProfile profile = resolve_profile(o.profile, o);
  const Corpus corpus = load_corpus(r.corpus, parse_corpus_format(r.format), {r.irc_gap});
  if (corpus.empty()) throw Error(ErrorKind::UndefinedScore, "corpus " + r.corpus + " has no dialogs");
  const RatingConfig config = rating_config(o);
  const RatingReport report = rate_corpus(corpus, profile, config);
  if (o.verbosity > 0) {
    err << "rated " << corpus.dialogs().size() << " dialogs for profile " << profile.name() << '\n';
  }
  if (r.stats && fmt == ReportFormat::Json) {
    json j = to_json(report);
    j["corpus"] = to_json(corpus_stats(corpus));
    emit(dump_canonical(j), o, out);
  } else {
    emit(render(report, fmt), o, out);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct SurveyOptions {
  std::string ballots;
  std::string rule = "borda";
  std::string proposed;
};

int cmd_survey(const SurveyOptions& s, const CommonOptions& o, std::ostream& out) {
  const ReportFormat fmt = report_format(o);
  const auto rule = voting::parse_rule(s.rule);
  const auto ballots = voting::load_ballots(s.ballots);
  const auto result = voting::run_rule(rule, ballots);

  std::optional<voting::Ranking> proposed;
  if (!s.proposed.empty()) {
    if (auto p = find_builtin_profile(s.proposed)) {
      proposed = p->order();
    } else {
      proposed = voting::parse_ranking(s.proposed);
    }
  }

  if (fmt == ReportFormat::Json) {
    json j;
    j["ballots"] = ballots.size();
    j["result"] = to_json(result);
    if (proposed) {
      j["proposed"] = join_codes(*proposed);
      j["agreement"] = {
          {"full", voting::agreement_rate(ballots, *proposed, voting::AgreementMode::Full)},
          {"top_issue", voting::agreement_rate(ballots, *proposed, voting::AgreementMode::TopIssue)}};
    }
    emit(dump_canonical(j), o, out);
  } else {
    std::string md = render_markdown(result);
    if (proposed) {
      std::ostringstream a;
      a.setf(std::ios::fixed);
      a.precision(1);
      a << "\nAgreement with " << join_codes(*proposed, " > ") << ": full "
        << 100.0 * voting::agreement_rate(ballots, *proposed, voting::AgreementMode::Full)
        << "%, top issue "
        << 100.0 * voting::agreement_rate(ballots, *proposed, voting::AgreementMode::TopIssue)
        << "%\n";
      md += a.str();
    }
    emit(md, o, out);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct LiveOptions {
  std::string endpoint_config;
  std::string generator = "interactive";
  std::string probes;
  std::string transcript = "transcript.jsonl";
  std::string session_id = "session-1";
  int pacing_ms = -1;
  bool dry_run = false;
};

std::unique_ptr<connector::ProbeGenerator> make_generator(const LiveOptions& l, const CommonOptions& o,
                                                          std::istream& in, std::ostream& out) {
  if (l.generator == "interactive") {
    return std::make_unique<connector::InteractiveGenerator>(in, &out);
  }
  if (l.generator == "abuse") {
    const fs::path path = l.probes.empty() ? data_dir_of(o) / "abuse_probes.tsv" : fs::path(l.probes);
    return std::make_unique<connector::IssueDatasetGenerator>(
        connector::IssueDatasetGenerator::load(IssueKind::AL, path));
  }
  constexpr std::string_view kScripted = "scripted:";
  if (l.generator.rfind(kScripted, 0) == 0 && l.generator.size() > kScripted.size()) {
    return std::make_unique<connector::ScriptedGenerator>(
        connector::ScriptedGenerator::load(l.generator.substr(kScripted.size())));
  }
  throw Error(ErrorKind::Usage, "unknown generator '" + l.generator +
                                    "' (expected interactive, abuse or scripted:PATH)");
}

int cmd_live(const LiveOptions& l, const CommonOptions& o, std::istream& in, std::ostream& out,
             std::ostream& err) {
  const ReportFormat fmt = report_format(o);
  const UserProfile profile = resolve_profile(o.profile, o);
  if (!l.dry_run && l.endpoint_config.empty()) {
    throw Error(ErrorKind::Usage, "live needs --endpoint-config or --dry-run");
  }
  const RatingConfig config = rating_config(o);

  std::unique_ptr<connector::ChatEndpoint> endpoint;
  connector::SessionOptions session;
  session.session_id = l.session_id;
  if (l.dry_run) {
    endpoint = std::make_unique<connector::EchoEndpoint>();
    session.pacing = std::chrono::milliseconds(0);
  } else {
    auto ep = connector::load_endpoint_config(l.endpoint_config);
    session.pacing = ep.pacing;
    endpoint = std::make_unique<connector::HttpChatEndpoint>(std::move(ep));
  }
  if (l.pacing_ms >= 0) session.pacing = std::chrono::milliseconds(l.pacing_ms);

  const bool interactive = l.generator == "interactive";
  auto generator = make_generator(l, o, in, interactive ? err : out);

  const auto on_exchange = [&](const connector::Exchange& ex) {
    if (ex.failed) {
      err << "exchange failed: " << ex.error << '\n';
    } else if (interactive) {
      err << "bot> " << ex.reply << '\n';
    }
  };
  const auto on_partial = [&](const connector::PartialRating& p) {
    out << "partial " << to_json(p).dump() << '\n' << std::flush;
  };

  const auto result = connector::run_session(*endpoint, *generator, profile, config, session,
                                             on_partial, on_exchange);
  if (!l.transcript.empty()) {
    connector::save_transcript(result.transcript, fs::path(l.transcript));
    if (o.verbosity > 0) err << "transcript saved to " << l.transcript << '\n';
  }
  emit(render(result.report, fmt), o, out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct SensitivityOptions {
  std::string variants;
  std::string format = "canonical";
};

struct Manifest {
  fs::path base_dir;
  std::optional<std::string> corpus;
  std::string format = "canonical";
  std::map<VariantAxis, std::vector<std::string>> axes;
  std::map<std::string, std::map<std::string, std::string>> matrix;
  std::optional<std::string> probes;
};

Manifest load_manifest(const fs::path& path, const std::string& default_format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read variant manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::Parse, path.string() + ": manifest must be an object");
  Manifest m;
  m.base_dir = path.parent_path();
  m.format = doc.value("format", default_format);
  try {
    if (doc.contains("corpus")) m.corpus = doc["corpus"].get<std::string>();
    if (doc.contains("probes")) m.probes = doc["probes"].get<std::string>();
    for (VariantAxis axis : kAllAxes) {
      const std::string key(axis_name(axis));
      if (doc.contains(key)) m.axes[axis] = doc[key].get<std::vector<std::string>>();
    }
    if (doc.contains("matrix")) {
      m.matrix = doc["matrix"].get<std::map<std::string, std::map<std::string, std::string>>>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  return m;
}

std::string resolve_ref(const Manifest& m, const std::string& ref) {
  const fs::path p(ref);
  return p.is_absolute() ? ref : (m.base_dir / p).string();
}

int cmd_sensitivity(const SensitivityOptions& s, const CommonOptions& o, std::ostream& out,
                    std::ostream& err) {
  const ReportFormat fmt = report_format(o);
  const Manifest manifest = load_manifest(s.variants, s.format);
  const CorpusFormat corpus_format = parse_corpus_format(manifest.format);
  const VariantPlan plan = enumerate_variants(manifest.axes);
  const RatingConfig config = rating_config(o);
  const bool has_model = manifest.axes.count(VariantAxis::Model) > 0;
  const bool has_data = manifest.axes.count(VariantAxis::Data) > 0;

  // Scores are computed once per source and re-aggregated per profile.
  std::map<std::string, std::map<IssueKind, IssueScore>> scored;
  const auto scores_for = [&](const std::string& ref) -> const std::map<IssueKind, IssueScore>& {
    auto it = scored.find(ref);
    if (it != scored.end()) return it->second;
    constexpr std::string_view kEndpoint = "endpoint:";
    Corpus corpus;
    if (ref.rfind(kEndpoint, 0) == 0) {
      if (!manifest.probes) throw Error(ErrorKind::Config, "endpoint variants need a \"probes\" script");
      connector::HttpChatEndpoint endpoint(
          connector::load_endpoint_config(resolve_ref(manifest, ref.substr(kEndpoint.size()))));
      auto generator = connector::ScriptedGenerator::load(resolve_ref(manifest, *manifest.probes));
      UserProfile any("variant", std::vector<IssueKind>(kAllIssues.begin(), kAllIssues.end()));
      corpus = connector::run_session(endpoint, generator, any, config).transcript.to_corpus();
    } else {
      corpus = load_corpus(resolve_ref(manifest, ref), corpus_format);
    }
    if (corpus.empty()) throw Error(ErrorKind::UndefinedScore, "variant source " + ref + " has no dialogs");
    if (o.verbosity > 0) err << "scoring " << ref << '\n';
    const std::vector<IssueKind> all(kAllIssues.begin(), kAllIssues.end());
    return scored.emplace(ref, score_corpus(corpus, all, config.checkers)).first->second;
  };

  std::vector<VariantRun> runs;
  for (const auto& assignment : plan.assignments) {
    std::string source;
    if (has_model && has_data) {
      const auto& mid = assignment.at(VariantAxis::Model);
      const auto& did = assignment.at(VariantAxis::Data);
      auto row = manifest.matrix.find(mid);
      if (row == manifest.matrix.end() || !row->second.count(did)) {
        throw Error(ErrorKind::Validation,
                    "manifest matrix has no source for model '" + mid + "' and data '" + did + "'");
      }
      source = row->second.at(did);
    } else if (has_model) {
      source = assignment.at(VariantAxis::Model);
    } else if (has_data) {
      source = assignment.at(VariantAxis::Data);
    } else if (manifest.corpus) {
      source = *manifest.corpus;
    } else {
      throw Error(ErrorKind::Validation, "manifest names no corpus");
    }
    auto user = assignment.find(VariantAxis::User);
    const UserProfile profile = resolve_profile(user == assignment.end() ? o.profile : user->second, o);
    runs.push_back({assignment, rate_scores(scores_for(source), profile, config.binning, config.tie_policy)});
  }

  const SensitivityReport report = build_sensitivity_report(std::move(runs), plan.not_evaluated);
  emit(fmt == ReportFormat::Json ? dump_canonical(to_json(report)) : render_markdown(report), o, out);
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_profiles_list(const CommonOptions& o, std::ostream& out) {
  json list = json::array();
  for (const auto& p : builtin_profiles()) {
    list.push_back({{"name", p.name()}, {"order", join_codes(p.order())}, {"builtin", true}});
  }
  const fs::path dir = profile_dir_of(o);
  if (fs::is_directory(dir)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const auto p = load_profile(f);
      list.push_back({{"name", p.name()}, {"order", join_codes(p.order())}, {"builtin", false}});
    }
  }
  if (report_format(o) == ReportFormat::Json) {
    emit(dump_canonical(list), o, out);
  } else {
    std::string md = "| Profile | Order (high to low) | Builtin |\n|---|---|---|\n";
    for (const auto& p : list) {
      md += "| " + p["name"].get<std::string>() + " | " + p["order"].get<std::string>() + " | " +
            (p["builtin"].get<bool>() ? "yes" : "no") + " |\n";
    }
    emit(md, o, out);
  }
  return kOk;
}

int cmd_profiles_show(const std::string& name, const CommonOptions& o, std::ostream& out) {
  const UserProfile p = resolve_profile(name, o);
  json j{{"name", p.name()}, {"order", json::array()}, {"weights", json::object()}};
  for (IssueKind i : p.order()) {
    j["order"].push_back(std::string(issue_code(i)));
    j["weights"][std::string(issue_code(i))] = p.weight(i);
  }
  emit(dump_canonical(j), o, out);
  return kOk;
}

int cmd_profiles_add(const std::string& name, const std::string& order, const CommonOptions& o,
                     std::ostream& out) {
  if (find_builtin_profile(name)) {
    throw Error(ErrorKind::Usage, "'" + name + "' is a builtin profile and cannot be replaced");
  }
  if (name.find_first_of("/\\") != std::string::npos || name == "." || name == "..") {
    throw Error(ErrorKind::Usage, "profile names cannot contain path separators");
  }
  voting::Ranking ranking;
  try {
    ranking = voting::parse_ranking(order);
  } catch (const Error& e) {
    throw Error(ErrorKind::Usage, e.what());
  }
  UserProfile profile(name, ranking);
  const fs::path dir = profile_dir_of(o);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Config, "cannot create profile directory " + dir.string());
  save_profile(profile, dir / (name + ".json"));
  out << "saved profile " << name << " (" << join_codes(profile.order()) << ") to "
      << (dir / (name + ".json")).string() << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"trustlens: rate chatbot trustworthiness per user profile"};
  app.require_subcommand(1);

  CommonOptions common;
  RateOptions rate;
  SurveyOptions survey;
  LiveOptions live;
  SensitivityOptions sens;
  std::string profile_name;
  std::string profile_order;

  auto* rate_cmd = app.add_subcommand("rate", "Rate a dialog corpus for a user profile");
  rate_cmd->add_option("--corpus", rate.corpus, "Corpus file")->required();
  rate_cmd->add_option("--format", rate.format, "Corpus format: canonical, qa or irc")->capture_default_str();
  rate_cmd->add_option("--irc-gap", rate.irc_gap, "IRC session gap in seconds")->capture_default_str();
  rate_cmd->add_flag("--stats", rate.stats, "Include corpus counts in the JSON report");
  add_common(*rate_cmd, common, true);

  auto* survey_cmd = app.add_subcommand("survey", "Aggregate importance rankings from ballots");
  survey_cmd->add_option("--ballots", survey.ballots, "Ballot CSV file")->required();
  survey_cmd->add_option("--rule", survey.rule, "borda, plurality, copeland or approval")->capture_default_str();
  survey_cmd->add_option("--proposed", survey.proposed, "Proposed ranking (AL,CC,B,IL) or builtin profile name");
  add_common(*survey_cmd, common, false);

  auto* live_cmd = app.add_subcommand("live", "Probe a live chatbot and stream partial ratings");
  live_cmd->add_option("--endpoint-config", live.endpoint_config, "Endpoint config JSON");
  live_cmd->add_option("--generator", live.generator, "interactive, abuse or scripted:PATH")->capture_default_str();
  live_cmd->add_option("--probes", live.probes, "Labeled probe dataset for the abuse generator");
  live_cmd->add_option("--transcript", live.transcript, "Where to save the session transcript ('' to skip)")
      ->capture_default_str();
  live_cmd->add_option("--session-id", live.session_id, "Session id sent to the endpoint")->capture_default_str();
  live_cmd->add_option("--pacing-ms", live.pacing_ms, "Delay between probes (default: endpoint config)");
  live_cmd->add_flag("--dry-run", live.dry_run, "Use the built-in echo bot instead of a live endpoint");
  add_common(*live_cmd, common, true);

  auto* sens_cmd = app.add_subcommand("sensitivity", "Re-rate across model/data/user variants");
  sens_cmd->add_option("--variants", sens.variants, "Variant manifest JSON")->required();
  sens_cmd->add_option("--format", sens.format, "Default corpus format for manifest refs")->capture_default_str();
  add_common(*sens_cmd, common, true);

  auto* profiles_cmd = app.add_subcommand("profiles", "List, show or add user profiles");
  profiles_cmd->require_subcommand(1);
  auto* list_cmd = profiles_cmd->add_subcommand("list", "List builtin and stored profiles");
  add_common(*list_cmd, common, false);
  auto* show_cmd = profiles_cmd->add_subcommand("show", "Show one profile");
  show_cmd->add_option("name", profile_name, "Profile name")->required();
  add_common(*show_cmd, common, false);
  auto* add_cmd = profiles_cmd->add_subcommand("add", "Store a new profile");
  add_cmd->add_option("name", profile_name, "Profile name")->required();
  add_cmd->add_option("order", profile_order, "Issue codes high to low, e.g. IL,AL,B,CC")->required();
  add_common(*add_cmd, common, false);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "trustlens: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (rate_cmd->parsed()) return cmd_rate(rate, common, out, err);
    if (survey_cmd->parsed()) return cmd_survey(survey, common, out);
    if (live_cmd->parsed()) return cmd_live(live, common, in, out, err);
    if (sens_cmd->parsed()) return cmd_sensitivity(sens, common, out, err);
    if (list_cmd->parsed()) return cmd_profiles_list(common, out);
    if (show_cmd->parsed()) return cmd_profiles_show(profile_name, common, out);
    if (add_cmd->parsed()) return cmd_profiles_add(profile_name, profile_order, common, out);
  } catch (const Error& e) {
    err << "trustlens: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "trustlens: " << e.what() << '\n';
    return kUsage;
  }
  err << app.help();
  return kUsage;
}

}  // namespace trustlens::cli
