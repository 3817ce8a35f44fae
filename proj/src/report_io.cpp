#include "trustlens/report_io.hpp"

#include <iomanip>
#include <sstream>

#include "trustlens/error.hpp"

namespace trustlens {

json to_json(const UtteranceLocator& loc) {
  return {{"dialog", loc.dialog}, {"turn", loc.turn}, {"utterance", loc.utterance}};
}

json to_json(const Evidence& e) {
  return {{"locator", to_json(e.locator)}, {"value", e.value}, {"label", e.label}, {"text", e.text}};
}

namespace {

json evidence_array(const std::vector<Evidence>& evidence) {
  json arr = json::array();
  for (const auto& e : evidence) arr.push_back(to_json(e));
  return arr;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

template <typename T>
T get_field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::Parse, std::string("report is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("report field '") + key + "': " + e.what());
  }
}

}  // namespace

json to_json(const IssueScore& s) {
  return {{"issue", std::string(issue_code(s.issue))},
          {"raw", s.raw},
          {"dispersion", optional_number(s.dispersion)},
          {"evidence", evidence_array(s.evidence)},
          {"details", s.details},
          {"flags", s.flags}};
}

json to_json(const CorpusStats& stats) {
  json roles = json::object();
  for (const auto& [role, count] : stats.utterances_per_role) roles[std::string(role_name(role))] = count;
  return {{"dialogs", stats.dialog_count},
          {"turns", stats.turn_count},
          {"utterances", stats.utterance_count},
          {"utterances_per_role", roles}};
}

json to_json(const IssueRating& r) {
  return {{"issue", std::string(issue_code(r.issue))},
          {"raw", r.raw},
          {"dispersion", optional_number(r.dispersion)},
          {"level", std::string(level_name(r.level))},
          {"weight", r.weight},
          {"evidence", evidence_array(r.evidence)},
          {"details", r.details},
          {"flags", r.flags}};
}

json to_json(const RatingReport& report) {
  json issues = json::array();
  for (const auto& r : report.issues) issues.push_back(to_json(r));
  json tallies = json::object();
  for (const auto& [level, tally] : report.tallies) tallies[std::string(level_name(level))] = tally;
  return {{"profile", report.profile},
          {"tie_policy", report.tie_policy},
          {"issues", issues},
          {"tallies", tallies},
          {"aggregate", std::string(level_name(report.aggregate))},
          {"tie", report.tie},
          {"explanation", report.explanation},
          {"flags", report.flags}};
}

RatingReport rating_report_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Parse, "report must be a JSON object");
  RatingReport report;
  report.profile = get_field<std::string>(j, "profile");
  report.tie_policy = get_field<std::string>(j, "tie_policy");
  report.aggregate = parse_level(get_field<std::string>(j, "aggregate"));
  report.tie = get_field<bool>(j, "tie");
  report.explanation = get_field<std::string>(j, "explanation");
  report.flags = get_field<std::vector<std::string>>(j, "flags");
  for (const auto& [level, tally] : get_field<std::map<std::string, int>>(j, "tallies")) {
    report.tallies[parse_level(level)] = tally;
  }
  for (const auto& ji : get_field<json>(j, "issues")) {
    IssueRating r;
    r.issue = issue_from_code(get_field<std::string>(ji, "issue"));
    r.raw = get_field<double>(ji, "raw");
    if (ji.contains("dispersion") && !ji["dispersion"].is_null()) r.dispersion = get_field<double>(ji, "dispersion");
    r.level = parse_level(get_field<std::string>(ji, "level"));
    r.weight = get_field<int>(ji, "weight");
    r.details = get_field<std::map<std::string, double>>(ji, "details");
    r.flags = get_field<std::vector<std::string>>(ji, "flags");
    for (const auto& je : get_field<json>(ji, "evidence")) {
      Evidence e;
      const json loc = get_field<json>(je, "locator");
      e.locator = {get_field<std::size_t>(loc, "dialog"), get_field<std::size_t>(loc, "turn"),
                   get_field<std::size_t>(loc, "utterance")};
      e.value = get_field<double>(je, "value");
      e.label = get_field<std::string>(je, "label");
      e.text = je.value("text", std::string());
      r.evidence.push_back(std::move(e));
    }
    report.issues.push_back(std::move(r));
  }
  return report;
}

json to_json(const voting::VoteResult& result) {
  json scores = json::object();
  for (const auto& [issue, score] : result.scores) scores[std::string(issue_code(issue))] = score;
  json ranking = json::array();
  for (IssueKind i : result.ranking) ranking.push_back(std::string(issue_code(i)));
  return {{"rule", result.rule}, {"scores", scores}, {"ranking", ranking}, {"tie_notes", result.tie_notes}};
}

namespace {

json axes_json(const std::set<VariantAxis>& axes) {
  json arr = json::array();
  for (VariantAxis a : axes) arr.push_back(std::string(axis_name(a)));
  return arr;
}

}  // namespace

json to_json(const SensitivityReport& report) {
  json runs = json::array();
  for (const auto& run : report.runs) {
    json assignment = json::object();
    for (const auto& [axis, id] : run.assignment) assignment[std::string(axis_name(axis))] = id;
    runs.push_back({{"assignment", assignment},
                    {"aggregate", std::string(level_name(run.report.aggregate))},
                    {"report", to_json(run.report)}});
  }
  return {{"type", std::string(sensitivity_type_name(report.type))},
          {"varying_axes", axes_json(report.varying_axes)},
          {"not_evaluated", axes_json(report.not_evaluated)},
          {"base", to_json(report.base)},
          {"runs", runs}};
}

json to_json(const connector::PartialRating& p) {
  return {{"utterance", p.utterance},     {"exchange", p.exchange},
          {"abuse_label", p.abuse_label}, {"cc_utterance", p.cc_utterance},
          {"al_running", p.al_running},   {"cc_running", p.cc_running}};
}

std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

namespace {

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string md_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out;
}

}  // namespace

std::string render_markdown(const RatingReport& report) {
  std::ostringstream md;
  md << "# Trust rating: " << level_name(report.aggregate) << "\n\n";
  md << "Profile `" << report.profile << "`, " << report.tie_policy << " tie-breaking.\n\n";
  md << "| Issue | Raw | Level | Weight |\n|---|---|---|---|\n";
  for (const auto& r : report.issues) {
    md << "| " << issue_code(r.issue) << " | " << fixed(r.raw);
    if (r.dispersion) md << " \xC2\xB1 " << fixed(*r.dispersion);
    md << " | " << level_name(r.level) << " | " << r.weight << " |\n";
  }
  md << "\nTallies: L=" << report.tallies.at(TrustLevel::L) << ", M=" << report.tallies.at(TrustLevel::M)
     << ", H=" << report.tallies.at(TrustLevel::H);
  if (report.tie) md << " (tie)";
  md << "\n\n## Explanation\n\n```\n" << report.explanation << "\n```\n";
  if (!report.flags.empty()) {
    md << "\n## Flags\n\n";
    for (const auto& f : report.flags) md << "- " << f << '\n';
  }
  bool any_evidence = false;
  for (const auto& r : report.issues) any_evidence = any_evidence || !r.evidence.empty();
  if (any_evidence) {
    md << "\n## Evidence\n\n| Issue | Location | Value | Label | Text |\n|---|---|---|---|---|\n";
    for (const auto& r : report.issues) {
      for (const auto& e : r.evidence) {
        md << "| " << issue_code(r.issue) << " | d" << e.locator.dialog << "/t" << e.locator.turn << "/u"
           << e.locator.utterance << " | " << fixed(e.value) << " | " << e.label << " | "
           << md_escape(e.text) << " |\n";
      }
    }
  }
  return md.str();
}

std::string render_markdown(const SensitivityReport& report) {
  std::ostringstream md;
  md << "# Sensitivity: " << sensitivity_type_name(report.type) << "\n\n";
  md << "Varying axes:";
  if (report.varying_axes.empty()) md << " none";
  for (VariantAxis a : report.varying_axes) md << ' ' << axis_name(a);
  md << "\n\nNot evaluated:";
  if (report.not_evaluated.empty()) md << " none";
  for (VariantAxis a : report.not_evaluated) md << ' ' << axis_name(a);
  md << "\n\n| Model | Data | User | Aggregate |\n|---|---|---|---|\n";
  for (const auto& run : report.runs) {
    const auto cell = [&](VariantAxis a) {
      auto it = run.assignment.find(a);
      return it == run.assignment.end() ? std::string("-") : md_escape(it->second);
    };
    md << "| " << cell(VariantAxis::Model) << " | " << cell(VariantAxis::Data) << " | "
       << cell(VariantAxis::User) << " | " << level_name(run.report.aggregate) << " |\n";
  }
  return md.str();
}

std::string render_markdown(const voting::VoteResult& result) {
  std::ostringstream md;
  md << "# Collective ranking (" << result.rule << ")\n\n" << join_codes(result.ranking, " > ") << "\n\n";
  md << "| Issue | Score |\n|---|---|\n";
  for (IssueKind i : result.ranking) md << "| " << issue_code(i) << " | " << result.scores.at(i) << " |\n";
  if (!result.tie_notes.empty()) {
    md << '\n';
    for (const auto& note : result.tie_notes) md << "- " << note << '\n';
  }
  return md.str();
}

}  // namespace trustlens
