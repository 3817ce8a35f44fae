#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "trustlens/rating.hpp"

namespace trustlens {

enum class VariantAxis { Model, Data, User };

inline constexpr std::array<VariantAxis, 3> kAllAxes = {VariantAxis::Model, VariantAxis::Data,
                                                        VariantAxis::User};

std::string_view axis_name(VariantAxis axis);
VariantAxis parse_axis(std::string_view name);

using AxisAssignment = std::map<VariantAxis, std::string>;

struct VariantRun {
  AxisAssignment assignment;
  RatingReport report;

  bool operator==(const VariantRun&) const = default;
};

enum class SensitivityType { Type1, Type2, Type3, Type4, TypeN };

std::string_view sensitivity_type_name(SensitivityType type);

struct VariantPlan {
  /// Cartesian product over the provided axes, Model-major.
  std::vector<AxisAssignment> assignments;
  /// Axes that were not provided or that have a single variant, so no
  /// contrast along them exists.
  std::set<VariantAxis> not_evaluated;
};

/// Throws Error(Validation) when a provided axis lists no variants.
VariantPlan enumerate_variants(const std::map<VariantAxis, std::vector<std::string>>& axes);

struct SensitivityClassification {
  SensitivityType type = SensitivityType::Type1;
  std::set<VariantAxis> varying_axes;
};

/// An axis varies when two runs that differ only on that axis have different
/// aggregate levels. If aggregates differ but no such single-axis contrast
/// exists, every axis on which differing runs disagree is reported as varying.
/// Throws Error(Validation) on an empty run list, runs rating different issue
/// sets, or two runs with one assignment and different aggregates.
SensitivityClassification classify_runs(const std::vector<VariantRun>& runs);
SensitivityType classify_sensitivity(const std::vector<VariantRun>& runs);

struct SensitivityReport {
  RatingReport base;
  std::vector<VariantRun> runs;
  std::set<VariantAxis> varying_axes;
  SensitivityType type = SensitivityType::Type1;
  std::set<VariantAxis> not_evaluated;

  bool operator==(const SensitivityReport&) const = default;
};

SensitivityReport build_sensitivity_report(std::vector<VariantRun> runs,
                                           std::set<VariantAxis> not_evaluated);

}  // namespace trustlens
