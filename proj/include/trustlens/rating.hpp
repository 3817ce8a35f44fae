#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trustlens/checkers.hpp"
#include "trustlens/corpus.hpp"
#include "trustlens/issue.hpp"

namespace trustlens {

/// Three-level risk scale, ordered L < M < H.
enum class TrustLevel { L = 0, M = 1, H = 2 };

inline constexpr std::array<TrustLevel, 3> kAllLevels = {TrustLevel::L, TrustLevel::M,
                                                         TrustLevel::H};

std::string_view level_name(TrustLevel level);
TrustLevel parse_level(std::string_view name);

struct BinningConfig {
  double low_upper = 0.33;  // exclusive upper bound of L
  double mid_upper = 0.67;  // inclusive upper bound of M

  void validate() const;
};

/// L on [0, low_upper), M on [low_upper, mid_upper], H on (mid_upper, 1].
/// Throws Error(Domain) for raw outside [0,1] or NaN.
TrustLevel bin(double raw, const BinningConfig& config = {});

/// Named strict importance ranking, most important issue first.
class UserProfile {
 public:
  UserProfile() = default;
  /// Throws Error(Validation) on an empty or repeating order.
  UserProfile(std::string name, std::vector<IssueKind> order);

  const std::string& name() const noexcept { return name_; }
  const std::vector<IssueKind>& order() const noexcept { return order_; }
  std::size_t size() const noexcept { return order_.size(); }

  bool contains(IssueKind issue) const;
  /// 1 = most important. Throws Error(Validation) for an issue not ranked.
  int importance(IssueKind issue) const;
  /// k - Imp(issue); the least important issue has weight 0.
  int weight(IssueKind issue) const;

  bool operator==(const UserProfile&) const = default;

 private:
  std::string name_;
  std::vector<IssueKind> order_;
};

/// P_CU, P_FU, P_PU and P_AU, in that order.
const std::vector<UserProfile>& builtin_profiles();
std::optional<UserProfile> find_builtin_profile(std::string_view name);

/// Profile file: {"name": ..., "order": ["CC", "AL", ...]}.
UserProfile load_profile(const std::filesystem::path& path);
void save_profile(const UserProfile& profile, const std::filesystem::path& path);

enum class TiePolicy { Optimistic, Pessimistic };

std::string_view tie_policy_name(TiePolicy policy);
TiePolicy parse_tie_policy(std::string_view name);

struct IssueRating {
  IssueKind issue = IssueKind::AL;
  double raw = 0.0;
  std::optional<double> dispersion;
  TrustLevel level = TrustLevel::L;
  int weight = 0;
  std::vector<Evidence> evidence;
  std::map<std::string, double> details;
  std::vector<std::string> flags;

  bool operator==(const IssueRating&) const = default;
};

struct RatingReport {
  std::string profile;
  std::string tie_policy;
  /// Ordered by the profile's importance, most important first.
  std::vector<IssueRating> issues;
  std::map<TrustLevel, int> tallies;
  TrustLevel aggregate = TrustLevel::L;
  bool tie = false;
  std::string explanation;
  std::vector<std::string> flags;

  const IssueRating* find(IssueKind issue) const;
  bool operator==(const RatingReport&) const = default;
};

/// Weighted level count: each issue adds k - Imp(issue) to its level's tally;
/// the top tally wins, ties resolved by the policy. Throws Error(Validation)
/// when a profile issue has no level.
RatingReport aggregate_rating(const std::map<IssueKind, TrustLevel>& levels,
                              const UserProfile& profile,
                              TiePolicy policy = TiePolicy::Pessimistic);

struct RatingConfig {
  CheckerSuite checkers;
  BinningConfig binning;
  TiePolicy tie_policy = TiePolicy::Pessimistic;
};

/// Bins precomputed checker scores and aggregates them for the profile.
RatingReport rate_scores(const std::map<IssueKind, IssueScore>& scores,
                         const UserProfile& profile, const BinningConfig& binning,
                         TiePolicy policy);

/// Runs every checker named by the profile, then rate_scores.
RatingReport rate_corpus(const Corpus& corpus, const UserProfile& profile,
                         const RatingConfig& config);

/// Runs each requested checker once; shared by multi-profile runs.
std::map<IssueKind, IssueScore> score_corpus(const Corpus& corpus,
                                             const std::vector<IssueKind>& issues,
                                             const CheckerSuite& checkers);

}  // namespace trustlens
