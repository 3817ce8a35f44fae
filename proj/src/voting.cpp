#include "trustlens/voting.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "trustlens/error.hpp"

namespace trustlens::voting {

std::string_view rule_name(Rule rule) {
  switch (rule) {
    case Rule::Borda: return "borda";
    case Rule::Plurality: return "plurality";
    case Rule::Copeland: return "copeland";
    case Rule::Approval: return "approval";
  }
  return "?";
}

Rule parse_rule(std::string_view name) {
  for (Rule r : {Rule::Borda, Rule::Plurality, Rule::Copeland, Rule::Approval}) {
    if (rule_name(r) == name) return r;
  }
  throw Error(ErrorKind::Usage, "unknown voting rule '" + std::string(name) +
                                    "' (expected borda, plurality, copeland or approval)");
}

namespace {

std::set<IssueKind> as_set(const Ranking& r) { return {r.begin(), r.end()}; }

void check_ranking(const Ranking& r, const std::string& who) {
  if (as_set(r).size() != r.size()) {
    throw Error(ErrorKind::Validation, "ballot " + who + " ranks an issue twice");
  }
}

// Common issue set of ranked ballots.
std::set<IssueKind> ranked_issue_set(const std::vector<Ballot>& ballots) {
  if (ballots.empty()) throw Error(ErrorKind::Validation, "at least one ballot is required");
  std::set<IssueKind> issues;
  bool first = true;
  for (const auto& b : ballots) {
    if (b.ranking.empty()) {
      throw Error(ErrorKind::Validation, "ballot " + b.voter_id + " has no ranking");
    }
    check_ranking(b.ranking, b.voter_id);
    auto set = as_set(b.ranking);
    if (first) {
      issues = std::move(set);
      first = false;
    } else if (set != issues) {
      throw Error(ErrorKind::Validation,
                  "ballot " + b.voter_id + " ranks a different issue set than the others");
    }
  }
  return issues;
}

std::string format_score(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

VoteResult finish(Rule rule, std::map<IssueKind, double> scores) {
  VoteResult result;
  result.rule = std::string(rule_name(rule));
  for (const auto& [issue, score] : scores) result.ranking.push_back(issue);
  // The map iterates in issue-code order, so a stable sort keeps that order
  // among equal scores.
  std::stable_sort(result.ranking.begin(), result.ranking.end(),
                   [&](IssueKind a, IssueKind b) { return scores.at(a) > scores.at(b); });
  for (std::size_t i = 0; i < result.ranking.size();) {
    std::size_t j = i + 1;
    while (j < result.ranking.size() &&
           scores.at(result.ranking[j]) == scores.at(result.ranking[i])) {
      ++j;
    }
    if (j - i > 1) {
      Ranking tied(result.ranking.begin() + static_cast<std::ptrdiff_t>(i),
                   result.ranking.begin() + static_cast<std::ptrdiff_t>(j));
      result.tie_notes.push_back("tie at " + format_score(scores.at(result.ranking[i])) +
                                 " between " + join_codes(tied, ", ") +
                                 "; ordered by issue code");
    }
    i = j;
  }
  result.scores = std::move(scores);
  return result;
}

}  // namespace

VoteResult borda(const std::vector<Ballot>& ballots) {
  const auto issues = ranked_issue_set(ballots);
  const double k = static_cast<double>(issues.size());
  std::map<IssueKind, double> scores;
  for (IssueKind i : issues) scores[i] = 0.0;
  for (const auto& b : ballots) {
    for (std::size_t pos = 0; pos < b.ranking.size(); ++pos) {
      scores[b.ranking[pos]] += k - static_cast<double>(pos + 1);
    }
  }
  return finish(Rule::Borda, std::move(scores));
}

VoteResult plurality(const std::vector<Ballot>& ballots) {
  const auto issues = ranked_issue_set(ballots);
  std::map<IssueKind, double> scores;
  for (IssueKind i : issues) scores[i] = 0.0;
  for (const auto& b : ballots) scores[b.ranking.front()] += 1.0;
  return finish(Rule::Plurality, std::move(scores));
}

std::map<IssueKind, std::map<IssueKind, int>> pairwise_margins(const std::vector<Ballot>& ballots) {
  const auto issues = ranked_issue_set(ballots);
  std::map<IssueKind, std::map<IssueKind, int>> m;
  for (IssueKind a : issues) {
    for (IssueKind b : issues) m[a][b] = 0;
  }
  for (const auto& ballot : ballots) {
    const auto& r = ballot.ranking;
    for (std::size_t i = 0; i < r.size(); ++i) {
      for (std::size_t j = i + 1; j < r.size(); ++j) {
        ++m[r[i]][r[j]];
        --m[r[j]][r[i]];
      }
    }
  }
  return m;
}

VoteResult copeland(const std::vector<Ballot>& ballots) {
  const auto margins = pairwise_margins(ballots);
  std::map<IssueKind, double> scores;
  for (const auto& [a, row] : margins) {
    double s = 0.0;
    for (const auto& [b, margin] : row) {
      if (a == b) continue;
      if (margin > 0) s += 1.0;
      if (margin < 0) s -= 1.0;
    }
    scores[a] = s;
  }
  return finish(Rule::Copeland, std::move(scores));
}

VoteResult approval(const std::vector<Ballot>& ballots) {
  if (ballots.empty()) throw Error(ErrorKind::Validation, "at least one ballot is required");
  std::set<IssueKind> issues(kAllIssues.begin(), kAllIssues.end());
  const bool ranked = std::any_of(ballots.begin(), ballots.end(),
                                  [](const Ballot& b) { return !b.ranking.empty(); });
  if (ranked) {
    std::vector<Ballot> with_rankings;
    for (const auto& b : ballots) {
      if (!b.ranking.empty()) with_rankings.push_back(b);
    }
    issues = ranked_issue_set(with_rankings);
  }
  std::map<IssueKind, double> scores;
  for (IssueKind i : issues) scores[i] = 0.0;
  for (const auto& b : ballots) {
    if (!b.approved) {
      throw Error(ErrorKind::Validation, "ballot " + b.voter_id + " carries no approval set");
    }
    for (IssueKind i : *b.approved) {
      if (!issues.count(i)) {
        throw Error(ErrorKind::Validation, "ballot " + b.voter_id + " approves issue " +
                                               std::string(issue_code(i)) +
                                               " outside the issue set");
      }
      scores[i] += 1.0;
    }
  }
  return finish(Rule::Approval, std::move(scores));
}

VoteResult run_rule(Rule rule, const std::vector<Ballot>& ballots) {
  switch (rule) {
    case Rule::Borda: return borda(ballots);
    case Rule::Plurality: return plurality(ballots);
    case Rule::Copeland: return copeland(ballots);
    case Rule::Approval: return approval(ballots);
  }
  throw Error(ErrorKind::Usage, "unknown voting rule");
}

double agreement_rate(const std::vector<Ballot>& ballots, const Ranking& proposed,
                      AgreementMode mode) {
  const auto issues = ranked_issue_set(ballots);
  check_ranking(proposed, "proposed");
  if (as_set(proposed) != issues) {
    throw Error(ErrorKind::Validation, "proposed ranking covers a different issue set");
  }
  std::size_t agree = 0;
  for (const auto& b : ballots) {
    const bool match = mode == AgreementMode::Full ? b.ranking == proposed
                                                   : b.ranking.front() == proposed.front();
    if (match) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(ballots.size());
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

constexpr std::string_view kApprovePrefix = "approve:";

}  // namespace

Ranking parse_ranking(std::string_view text) {
  Ranking r;
  std::string token;
  for (char c : std::string(text) + ",") {
    if (c == ',' || c == ' ' || c == ';' || c == '>') {
      if (!token.empty()) r.push_back(issue_from_code(token));
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  if (r.empty()) throw Error(ErrorKind::Parse, "empty ranking");
  return r;
}

std::vector<Ballot> parse_ballots(std::istream& in) {
  std::vector<Ballot> ballots;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto fields = split(trimmed, ',');
    if (fields.size() < 2 || fields[0].empty()) {
      throw ParseError(line_no, "expected voter_id followed by issue codes");
    }
    Ballot ballot;
    ballot.voter_id = fields[0];
    try {
      if (fields[1].rfind(kApprovePrefix, 0) == 0) {
        if (fields.size() != 2) throw ParseError(line_no, "approval ballots take one field");
        std::set<IssueKind> approved;
        for (const auto& code : split(std::string_view(fields[1]).substr(kApprovePrefix.size()), ';')) {
          if (!code.empty()) approved.insert(issue_from_code(code));
        }
        ballot.approved = std::move(approved);
      } else {
        for (std::size_t i = 1; i < fields.size(); ++i) {
          if (fields[i].empty()) throw ParseError(line_no, "empty issue code");
          ballot.ranking.push_back(issue_from_code(fields[i]));
        }
        check_ranking(ballot.ranking, ballot.voter_id);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    ballots.push_back(std::move(ballot));
  }
  return ballots;
}

std::vector<Ballot> load_ballots(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read ballot file " + path.string());
  return parse_ballots(in);
}

}  // namespace trustlens::voting
