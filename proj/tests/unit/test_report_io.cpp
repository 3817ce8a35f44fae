#include <doctest.h>

#include <fstream>

#include "support.hpp"
#include "trustlens/error.hpp"
#include "trustlens/report_io.hpp"

using namespace trustlens;

TEST_SUITE("report_io") {
  TEST_CASE("rating reports survive a JSON round trip") {
    const Corpus corpus = load_corpus(testing::fixture("small.jsonl").string(), CorpusFormat::Canonical);
    RatingConfig config;
    config.checkers = testing::shipped_suite();
    for (const auto& profile : builtin_profiles()) {
      const auto report = rate_corpus(corpus, profile, config);
      const auto text = dump_canonical(to_json(report));
      CHECK(text.back() == '\n');
      const auto back = rating_report_from_json(json::parse(text));
      CHECK(back == report);
      CHECK(dump_canonical(to_json(back)) == text);
    }
  }

  TEST_CASE("malformed reports are parse errors") {
    CHECK_THROWS_AS(rating_report_from_json(json::array()), Error);
    CHECK_THROWS_AS(rating_report_from_json(json{{"profile", "x"}}), Error);
  }

  TEST_CASE("markdown rendering mentions the aggregate and escapes pipes") {
    RatingReport r;
    r.profile = "P_CU";
    r.tie_policy = "pessimistic";
    r.tallies = {{TrustLevel::L, 1}, {TrustLevel::M, 0}, {TrustLevel::H, 0}};
    IssueRating i;
    i.issue = IssueKind::AL;
    i.evidence.push_back({{0, 0, 0}, 0.5, "offensive", "a | b"});
    r.issues.push_back(i);
    const auto md = render_markdown(r);
    CHECK(md.find("# Trust rating: L") == 0);
    CHECK(md.find("a \\| b") != std::string::npos);
  }
}
