#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trustlens {

/// Trust issues rated by the engine. Enumerators are declared in issue-code
/// lexicographic order ("AL" < "B" < "CC" < "IL"); vote tie-breaking relies
/// on that ordering.
enum class IssueKind { AL = 0, B = 1, CC = 2, IL = 3 };

inline constexpr std::array<IssueKind, 4> kAllIssues = {
    IssueKind::AL, IssueKind::B, IssueKind::CC, IssueKind::IL};

std::string_view issue_code(IssueKind issue);
std::optional<IssueKind> parse_issue_code(std::string_view code);
/// Throws Error(Parse) on unknown codes.
IssueKind issue_from_code(std::string_view code);

std::string join_codes(const std::vector<IssueKind>& issues,
                       std::string_view sep = ",");

}  // namespace trustlens
