#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "trustlens/checkers.hpp"
#include "trustlens/connector.hpp"
#include "trustlens/corpus.hpp"
#include "trustlens/rating.hpp"
#include "trustlens/sensitivity.hpp"
#include "trustlens/voting.hpp"

namespace trustlens {

// nlohmann::json keeps object keys sorted, which gives reports a stable key
// order.
using json = nlohmann::json;

json to_json(const UtteranceLocator& loc);
json to_json(const Evidence& evidence);
json to_json(const IssueScore& score);
json to_json(const CorpusStats& stats);
json to_json(const IssueRating& rating);
json to_json(const RatingReport& report);
json to_json(const voting::VoteResult& result);
json to_json(const SensitivityReport& report);
json to_json(const connector::PartialRating& partial);

RatingReport rating_report_from_json(const json& j);

/// Canonical report text: two-space indented JSON with a trailing newline.
std::string dump_canonical(const json& j);

std::string render_markdown(const RatingReport& report);
std::string render_markdown(const SensitivityReport& report);
std::string render_markdown(const voting::VoteResult& result);

}  // namespace trustlens
