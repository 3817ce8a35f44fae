#include "trustlens/sensitivity.hpp"

#include "trustlens/error.hpp"

namespace trustlens {

std::string_view axis_name(VariantAxis axis) {
  switch (axis) {
    case VariantAxis::Model: return "model";
    case VariantAxis::Data: return "data";
    case VariantAxis::User: return "user";
  }
  return "?";
}

VariantAxis parse_axis(std::string_view name) {
  for (VariantAxis a : kAllAxes) {
    if (axis_name(a) == name) return a;
  }
  throw Error(ErrorKind::Parse, "unknown variant axis '" + std::string(name) + "'");
}

std::string_view sensitivity_type_name(SensitivityType type) {
  switch (type) {
    case SensitivityType::Type1: return "Type-1";
    case SensitivityType::Type2: return "Type-2";
    case SensitivityType::Type3: return "Type-3";
    case SensitivityType::Type4: return "Type-4";
    case SensitivityType::TypeN: return "Type-N";
  }
  return "?";
}

VariantPlan enumerate_variants(const std::map<VariantAxis, std::vector<std::string>>& axes) {
  VariantPlan plan;
  plan.assignments.emplace_back();
  for (VariantAxis axis : kAllAxes) {
    auto it = axes.find(axis);
    if (it == axes.end()) {
      plan.not_evaluated.insert(axis);
      continue;
    }
    if (it->second.empty()) {
      throw Error(ErrorKind::Validation,
                  "variant axis '" + std::string(axis_name(axis)) + "' lists no variants");
    }
    if (it->second.size() == 1) plan.not_evaluated.insert(axis);
    std::vector<AxisAssignment> next;
    next.reserve(plan.assignments.size() * it->second.size());
    for (const auto& partial : plan.assignments) {
      for (const auto& variant : it->second) {
        auto a = partial;
        a[axis] = variant;
        next.push_back(std::move(a));
      }
    }
    plan.assignments = std::move(next);
  }
  return plan;
}

namespace {

std::set<VariantAxis> differing_axes(const AxisAssignment& a, const AxisAssignment& b) {
  std::set<VariantAxis> out;
  for (VariantAxis axis : kAllAxes) {
    auto ia = a.find(axis);
    auto ib = b.find(axis);
    const bool has_a = ia != a.end();
    const bool has_b = ib != b.end();
    if (has_a != has_b || (has_a && ia->second != ib->second)) out.insert(axis);
  }
  return out;
}

std::set<IssueKind> issue_set(const RatingReport& r) {
  std::set<IssueKind> s;
  for (const auto& i : r.issues) s.insert(i.issue);
  return s;
}

}  // namespace

SensitivityClassification classify_runs(const std::vector<VariantRun>& runs) {
  if (runs.empty()) throw Error(ErrorKind::Validation, "sensitivity needs at least one run");
  const auto issues = issue_set(runs.front().report);
  for (const auto& run : runs) {
    if (issue_set(run.report) != issues) {
      throw Error(ErrorKind::Validation, "variant runs rate different issue sets");
    }
  }

  SensitivityClassification result;
  std::set<VariantAxis> combined;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      if (runs[i].report.aggregate == runs[j].report.aggregate) continue;
      const auto diff = differing_axes(runs[i].assignment, runs[j].assignment);
      if (diff.empty()) {
        throw Error(ErrorKind::Validation,
                    "two runs share an assignment but disagree on the aggregate level");
      }
      if (diff.size() == 1) {
        result.varying_axes.insert(*diff.begin());
      } else {
        combined.insert(diff.begin(), diff.end());
      }
    }
  }
  // Aggregates differ only across multi-axis contrasts: the combination of
  // those axes is what sways the rating.
  if (result.varying_axes.empty()) result.varying_axes = combined;

  const auto& v = result.varying_axes;
  if (v.empty()) {
    result.type = SensitivityType::Type1;
  } else if (v.size() >= 2) {
    result.type = SensitivityType::TypeN;
  } else if (v.count(VariantAxis::Model)) {
    result.type = SensitivityType::Type2;
  } else if (v.count(VariantAxis::Data)) {
    result.type = SensitivityType::Type3;
  } else {
    result.type = SensitivityType::Type4;
  }
  return result;
}

SensitivityType classify_sensitivity(const std::vector<VariantRun>& runs) {
  return classify_runs(runs).type;
}

SensitivityReport build_sensitivity_report(std::vector<VariantRun> runs,
                                           std::set<VariantAxis> not_evaluated) {
  const auto cls = classify_runs(runs);
  SensitivityReport report;
  report.base = runs.front().report;
  report.runs = std::move(runs);
  report.varying_axes = cls.varying_axes;
  report.type = cls.type;
  report.not_evaluated = std::move(not_evaluated);
  return report;
}

}  // namespace trustlens
