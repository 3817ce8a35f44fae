#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "trustlens/issue.hpp"

namespace trustlens::voting {

using Ranking = std::vector<IssueKind>;

struct Ballot {
  std::string voter_id;
  Ranking ranking;
  /// Present only on approval ballots.
  std::optional<std::set<IssueKind>> approved;

  bool operator==(const Ballot&) const = default;
};

enum class Rule { Borda, Plurality, Copeland, Approval };

std::string_view rule_name(Rule rule);
Rule parse_rule(std::string_view name);

struct VoteResult {
  std::string rule;
  std::map<IssueKind, double> scores;
  /// Descending score; equal scores ordered by issue code.
  Ranking ranking;
  std::vector<std::string> tie_notes;

  bool operator==(const VoteResult&) const = default;
};

/// Score = sum over ballots of (k - position), positions 1-based.
VoteResult borda(const std::vector<Ballot>& ballots);
/// Score = number of first places.
VoteResult plurality(const std::vector<Ballot>& ballots);
/// Score = pairwise majority wins minus losses.
VoteResult copeland(const std::vector<Ballot>& ballots);
/// Score = number of approvals. Empty approval sets are allowed.
VoteResult approval(const std::vector<Ballot>& ballots);

VoteResult run_rule(Rule rule, const std::vector<Ballot>& ballots);

/// Net pairwise preferences: m[a][b] = #ballots ranking a above b minus
/// #ballots ranking b above a.
std::map<IssueKind, std::map<IssueKind, int>> pairwise_margins(
    const std::vector<Ballot>& ballots);

enum class AgreementMode { Full, TopIssue };

/// Fraction of ballots equal to the proposed ranking (Full) or sharing its
/// top issue (TopIssue).
double agreement_rate(const std::vector<Ballot>& ballots, const Ranking& proposed,
                      AgreementMode mode);

/// CSV, one ballot per row: voter_id, then issue codes in ranked order, or
/// voter_id, "approve:CODE;CODE..." for approval ballots. Throws
/// Error(Parse) with the row number on malformed rows.
std::vector<Ballot> parse_ballots(std::istream& in);
std::vector<Ballot> load_ballots(const std::filesystem::path& path);

/// Accepts "AL,CC,B,IL" or "AL CC B IL".
Ranking parse_ranking(std::string_view text);

}  // namespace trustlens::voting
