#include "trustlens/rating.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trustlens/error.hpp"

namespace trustlens {

std::string_view level_name(TrustLevel level) {
  switch (level) {
    case TrustLevel::L: return "L";
    case TrustLevel::M: return "M";
    case TrustLevel::H: return "H";
  }
  return "?";
}

TrustLevel parse_level(std::string_view name) {
  if (name == "L") return TrustLevel::L;
  if (name == "M") return TrustLevel::M;
  if (name == "H") return TrustLevel::H;
  throw Error(ErrorKind::Parse, "unknown trust level '" + std::string(name) + "'");
}

void BinningConfig::validate() const {
  if (!(low_upper > 0.0 && low_upper < mid_upper && mid_upper < 1.0)) {
    throw Error(ErrorKind::Config, "bins must satisfy 0 < low < mid < 1");
  }
}

TrustLevel bin(double raw, const BinningConfig& config) {
  config.validate();
  if (!(raw >= 0.0 && raw <= 1.0)) {
    throw Error(ErrorKind::Domain, "raw score " + std::to_string(raw) + " outside [0, 1]");
  }
  if (raw < config.low_upper) return TrustLevel::L;
  if (raw <= config.mid_upper) return TrustLevel::M;
  return TrustLevel::H;
}

UserProfile::UserProfile(std::string name, std::vector<IssueKind> order)
    : name_(std::move(name)), order_(std::move(order)) {
  if (name_.empty()) throw Error(ErrorKind::Validation, "profile name is empty");
  if (order_.empty()) throw Error(ErrorKind::Validation, "profile '" + name_ + "' ranks no issues");
  std::set<IssueKind> seen(order_.begin(), order_.end());
  if (seen.size() != order_.size()) {
    throw Error(ErrorKind::Validation, "profile '" + name_ + "' ranks an issue twice");
  }
}

bool UserProfile::contains(IssueKind issue) const {
  return std::find(order_.begin(), order_.end(), issue) != order_.end();
}

int UserProfile::importance(IssueKind issue) const {
  auto it = std::find(order_.begin(), order_.end(), issue);
  if (it == order_.end()) {
    throw Error(ErrorKind::Validation, "profile '" + name_ + "' does not rank issue " +
                                           std::string(issue_code(issue)));
  }
  return static_cast<int>(it - order_.begin()) + 1;
}

int UserProfile::weight(IssueKind issue) const {
  return static_cast<int>(order_.size()) - importance(issue);
}

const std::vector<UserProfile>& builtin_profiles() {
  using enum IssueKind;
  static const std::vector<UserProfile> profiles = {
      UserProfile("P_CU", {CC, AL, B, IL}),
      UserProfile("P_FU", {B, CC, AL, IL}),
      UserProfile("P_PU", {IL, AL, B, CC}),
      UserProfile("P_AU", {AL, CC, B, IL}),
  };
  return profiles;
}

std::optional<UserProfile> find_builtin_profile(std::string_view name) {
  for (const auto& p : builtin_profiles()) {
    if (p.name() == name) return p;
  }
  return std::nullopt;
}

UserProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read profile " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("name") || !doc.contains("order") ||
      !doc["name"].is_string() || !doc["order"].is_array()) {
    throw Error(ErrorKind::Parse, path.string() + ": expected {\"name\": ..., \"order\": [...]}");
  }
  std::vector<IssueKind> order;
  for (const auto& code : doc["order"]) {
    if (!code.is_string()) throw Error(ErrorKind::Parse, path.string() + ": issue codes must be strings");
    order.push_back(issue_from_code(code.get<std::string>()));
  }
  return UserProfile(doc["name"].get<std::string>(), std::move(order));
}

void save_profile(const UserProfile& profile, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["name"] = profile.name();
  doc["order"] = nlohmann::json::array();
  for (IssueKind issue : profile.order()) doc["order"].push_back(std::string(issue_code(issue)));
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Config, "cannot write profile " + path.string());
  out << doc.dump(2) << '\n';
}

std::string_view tie_policy_name(TiePolicy policy) {
  return policy == TiePolicy::Optimistic ? "optimistic" : "pessimistic";
}

TiePolicy parse_tie_policy(std::string_view name) {
  if (name == "optimistic") return TiePolicy::Optimistic;
  if (name == "pessimistic") return TiePolicy::Pessimistic;
  throw Error(ErrorKind::Usage,
              "unknown tie policy '" + std::string(name) + "' (expected optimistic or pessimistic)");
}

const IssueRating* RatingReport::find(IssueKind issue) const {
  for (const auto& r : issues) {
    if (r.issue == issue) return &r;
  }
  return nullptr;
}

namespace {

std::string format_raw(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

RatingReport aggregate_levels(std::vector<IssueRating> issues, const UserProfile& profile,
                              TiePolicy policy, bool with_raw) {
  RatingReport report;
  report.profile = profile.name();
  report.tie_policy = std::string(tie_policy_name(policy));
  for (TrustLevel level : kAllLevels) report.tallies[level] = 0;
  for (const auto& r : issues) report.tallies[r.level] += r.weight;

  // Only levels some issue holds can lead; matters when every weight is 0.
  std::set<TrustLevel> present;
  for (const auto& r : issues) present.insert(r.level);
  int best = -1;
  std::vector<TrustLevel> leaders;
  for (TrustLevel level : present) {
    const int tally = report.tallies[level];
    if (tally > best) {
      best = tally;
      leaders = {level};
    } else if (tally == best) {
      leaders.push_back(level);
    }
  }
  // leaders is in ascending risk order.
  report.tie = leaders.size() > 1;
  report.aggregate = policy == TiePolicy::Optimistic ? leaders.front() : leaders.back();

  std::ostringstream ex;
  for (const auto& r : issues) {
    ex << issue_code(r.issue) << ' ';
    if (with_raw) ex << format_raw(r.raw);
    ex << "\xE2\x86\x92" << level_name(r.level) << " \xC3\x97" << r.weight << '\n';
  }
  ex << "tally L=" << report.tallies[TrustLevel::L] << " M=" << report.tallies[TrustLevel::M]
     << " H=" << report.tallies[TrustLevel::H] << '\n';
  if (report.tie) {
    ex << "tie between";
    for (TrustLevel l : leaders) ex << ' ' << level_name(l);
    ex << "; " << tie_policy_name(policy) << " policy picks " << level_name(report.aggregate)
       << '\n';
  }
  ex << "aggregate " << level_name(report.aggregate) << " for profile " << profile.name();
  report.explanation = ex.str();

  for (const auto& r : issues) {
    for (const auto& flag : r.flags) {
      report.flags.push_back(std::string(issue_code(r.issue)) + ": " + flag);
    }
  }
  report.issues = std::move(issues);
  return report;
}

}  // namespace

RatingReport aggregate_rating(const std::map<IssueKind, TrustLevel>& levels,
                              const UserProfile& profile, TiePolicy policy) {
  std::vector<IssueRating> issues;
  for (IssueKind issue : profile.order()) {
    auto it = levels.find(issue);
    if (it == levels.end()) {
      throw Error(ErrorKind::Validation,
                  "no level for issue " + std::string(issue_code(issue)));
    }
    IssueRating r;
    r.issue = issue;
    r.level = it->second;
    r.weight = profile.weight(issue);
    issues.push_back(std::move(r));
  }
  return aggregate_levels(std::move(issues), profile, policy, false);
}

RatingReport rate_scores(const std::map<IssueKind, IssueScore>& scores, const UserProfile& profile,
                         const BinningConfig& binning, TiePolicy policy) {
  std::vector<IssueRating> issues;
  for (IssueKind issue : profile.order()) {
    auto it = scores.find(issue);
    if (it == scores.end()) {
      throw Error(ErrorKind::Validation,
                  "no score for issue " + std::string(issue_code(issue)));
    }
    const IssueScore& s = it->second;
    IssueRating r;
    r.issue = issue;
    r.raw = s.raw;
    r.dispersion = s.dispersion;
    r.level = bin(s.raw, binning);
    r.weight = profile.weight(issue);
    r.evidence = s.evidence;
    r.details = s.details;
    r.flags = s.flags;
    issues.push_back(std::move(r));
  }
  return aggregate_levels(std::move(issues), profile, policy, true);
}

std::map<IssueKind, IssueScore> score_corpus(const Corpus& corpus,
                                             const std::vector<IssueKind>& issues,
                                             const CheckerSuite& checkers) {
  std::map<IssueKind, IssueScore> scores;
  for (IssueKind issue : issues) scores.emplace(issue, run_checker(issue, corpus, checkers));
  return scores;
}

RatingReport rate_corpus(const Corpus& corpus, const UserProfile& profile,
                         const RatingConfig& config) {
  config.binning.validate();
  const auto scores = score_corpus(corpus, profile.order(), config.checkers);
  return rate_scores(scores, profile, config.binning, config.tie_policy);
}

}  // namespace trustlens
