#include "trustlens/issue.hpp"

#include "trustlens/error.hpp"

namespace trustlens {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "usage error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Config: return "configuration error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::UndefinedScore: return "undefined score";
    case ErrorKind::Transport: return "transport error";
    case ErrorKind::Precondition: return "precondition failed";
  }
  return "error";
}

std::string_view issue_code(IssueKind issue) {
  switch (issue) {
    case IssueKind::AL: return "AL";
    case IssueKind::B: return "B";
    case IssueKind::CC: return "CC";
    case IssueKind::IL: return "IL";
  }
  return "?";
}

std::optional<IssueKind> parse_issue_code(std::string_view code) {
  for (IssueKind issue : kAllIssues) {
    if (issue_code(issue) == code) return issue;
  }
  return std::nullopt;
}

IssueKind issue_from_code(std::string_view code) {
  if (auto issue = parse_issue_code(code)) return *issue;
  throw Error(ErrorKind::Parse,
              "unknown issue code '" + std::string(code) + "' (expected AL, B, CC or IL)");
}

std::string join_codes(const std::vector<IssueKind>& issues, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) out += sep;
    out += issue_code(issues[i]);
  }
  return out;
}

}  // namespace trustlens
