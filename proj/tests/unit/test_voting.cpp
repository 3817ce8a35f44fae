#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "../oracles.hpp"
#include "trustlens/error.hpp"
#include "trustlens/voting.hpp"

using namespace trustlens;
using namespace trustlens::voting;
using enum IssueKind;

namespace {

Ballot ranked(std::string id, Ranking r) { return {std::move(id), std::move(r), std::nullopt}; }
Ballot approving(std::string id, std::set<IssueKind> a) { return {std::move(id), {}, std::move(a)}; }

std::vector<Ballot> random_ballots(std::mt19937& gen, bool with_approvals) {
  std::vector<Ballot> out;
  const int n = 1 + static_cast<int>(gen() % 12);
  for (int v = 0; v < n; ++v) {
    Ranking r(kAllIssues.begin(), kAllIssues.end());
    std::shuffle(r.begin(), r.end(), gen);
    Ballot b = ranked("v" + std::to_string(v), r);
    if (with_approvals) {
      std::set<IssueKind> a;
      for (IssueKind i : kAllIssues) {
        if (gen() % 2) a.insert(i);
      }
      b.approved = a;
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

TEST_SUITE("voting") {
  TEST_CASE("borda examples") {
    const auto one = borda({ranked("a", {AL, CC, B, IL})});
    CHECK(one.ranking == Ranking{AL, CC, B, IL});
    CHECK(one.scores.at(AL) == 3);
    CHECK(one.scores.at(IL) == 0);

    const auto three = borda({ranked("a", {AL, CC, B, IL}), ranked("b", {AL, CC, B, IL}), ranked("c", {AL, CC, B, IL})});
    CHECK(three.scores.at(AL) == 9);
    CHECK(three.scores.at(CC) == 6);

    const auto mixed = borda({ranked("a", {B, AL, CC, IL}), ranked("b", {AL, B, CC, IL}), ranked("c", {AL, CC, B, IL})});
    CHECK(mixed.scores.at(AL) == 8);
    CHECK(mixed.scores.at(B) == 6);
    CHECK(mixed.scores.at(CC) == 4);
    CHECK(mixed.scores.at(IL) == 0);
    CHECK(mixed.ranking == Ranking{AL, B, CC, IL});
  }

  TEST_CASE("plurality examples") {
    CHECK(plurality({ranked("a", {CC, AL, B, IL})}).ranking.front() == CC);
    const auto tie = plurality({ranked("a", {CC, AL, B, IL}), ranked("b", {AL, CC, B, IL})});
    CHECK(tie.ranking.front() == AL);
    CHECK(tie.scores.at(AL) == 1);
    CHECK(tie.scores.at(CC) == 1);
    REQUIRE_FALSE(tie.tie_notes.empty());
    CHECK(tie.tie_notes.front().find("AL, CC") != std::string::npos);

    std::vector<Ballot> five;
    for (int i = 0; i < 3; ++i) five.push_back(ranked("i" + std::to_string(i), {IL, AL, B, CC}));
    for (int i = 0; i < 2; ++i) five.push_back(ranked("c" + std::to_string(i), {CC, AL, B, IL}));
    CHECK(plurality(five).ranking.front() == IL);
  }

  TEST_CASE("copeland examples") {
    const auto single = copeland({ranked("a", {B, IL, AL, CC})});
    CHECK(single.ranking == Ranking{B, IL, AL, CC});
    CHECK(single.scores.at(B) == 3);
    CHECK(single.scores.at(IL) == 1);
    CHECK(single.scores.at(AL) == -1);
    CHECK(single.scores.at(CC) == -3);

    const auto cycle = copeland({ranked("a", {AL, B, CC}), ranked("b", {B, CC, AL}), ranked("c", {CC, AL, B})});
    for (IssueKind i : {AL, B, CC}) CHECK(cycle.scores.at(i) == 0);
    CHECK(cycle.ranking == Ranking{AL, B, CC});
    CHECK(cycle.tie_notes.size() == 1);
  }

  TEST_CASE("approval examples") {
    const auto all = approval({approving("a", {AL, B, CC, IL}), approving("b", {AL, B, CC, IL})});
    CHECK(all.tie_notes.size() == 1);
    CHECK(approval({approving("a", {IL})}).ranking.front() == IL);
    const auto r = approval({approving("A", {B, IL}), approving("B", {IL}), approving("C", {CC})});
    CHECK(r.scores.at(IL) == 2);
    CHECK(r.scores.at(B) == 1);
    CHECK(r.scores.at(CC) == 1);
    CHECK(r.scores.at(AL) == 0);
    CHECK(r.ranking == Ranking{IL, B, CC, AL});
    CHECK_THROWS_AS(approval({ranked("x", {AL, B, CC, IL})}), Error);
  }

  TEST_CASE("inconsistent ballots are rejected") {
    CHECK_THROWS_AS(borda({}), Error);
    CHECK_THROWS_AS(borda({ranked("a", {AL, B}), ranked("b", {AL, CC})}), Error);
    CHECK_THROWS_AS(borda({ranked("a", {AL, AL})}), Error);
  }

  TEST_CASE("agreement rates") {
    const std::vector<Ballot> same{ranked("a", {AL, CC, B, IL}), ranked("b", {AL, CC, B, IL})};
    CHECK(agreement_rate(same, {AL, CC, B, IL}, AgreementMode::Full) == 1.0);
    CHECK(agreement_rate(same, {AL, CC, B, IL}, AgreementMode::TopIssue) == 1.0);
    CHECK(agreement_rate(same, {IL, CC, B, AL}, AgreementMode::TopIssue) == 0.0);

    std::vector<Ballot> survey;
    for (int i = 0; i < 42; ++i) survey.push_back(ranked("al" + std::to_string(i), {AL, B, CC, IL}));
    for (int i = 0; i < 9; ++i) survey.push_back(ranked("o" + std::to_string(i), {CC, AL, B, IL}));
    CHECK(agreement_rate(survey, {AL, CC, B, IL}, AgreementMode::TopIssue) == doctest::Approx(42.0 / 51.0));
    CHECK(std::round(100.0 * agreement_rate(survey, {AL, CC, B, IL}, AgreementMode::TopIssue)) == 82);
  }

  TEST_CASE("ballot CSV parsing") {
    std::istringstream in("# survey\nv1, AL, CC, B, IL\n\nv2,approve:B;IL\n");
    const auto ballots = parse_ballots(in);
    REQUIRE(ballots.size() == 2);
    CHECK(ballots[0].ranking == Ranking{AL, CC, B, IL});
    CHECK(ballots[1].approved == std::set<IssueKind>{B, IL});

    std::istringstream bad("v1,AL,CC\nv2,AL,XX\n");
    try {
      parse_ballots(bad);
      FAIL("expected parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    CHECK(parse_ranking("IL > AL > B > CC") == Ranking{IL, AL, B, CC});
    CHECK_THROWS_AS(parse_rule("condorcet"), Error);
  }

  TEST_CASE("anonymity, neutrality and unanimity on random ballots") {
    std::mt19937 gen(2024);
    for (int trial = 0; trial < 250; ++trial) {
      const auto ballots = random_ballots(gen, true);
      for (Rule rule : {Rule::Borda, Rule::Plurality, Rule::Copeland, Rule::Approval}) {
        const auto base = run_rule(rule, ballots);

        auto shuffled = ballots;
        std::shuffle(shuffled.begin(), shuffled.end(), gen);
        CHECK(run_rule(rule, shuffled) == base);

        Ranking sigma(kAllIssues.begin(), kAllIssues.end());
        std::shuffle(sigma.begin(), sigma.end(), gen);
        const auto apply = [&](IssueKind i) { return sigma[static_cast<int>(i)]; };
        auto renamed = ballots;
        for (auto& b : renamed) {
          for (auto& i : b.ranking) i = apply(i);
          std::set<IssueKind> a;
          for (IssueKind i : *b.approved) a.insert(apply(i));
          b.approved = a;
        }
        const auto permuted = run_rule(rule, renamed);
        for (const auto& [issue, score] : base.scores) CHECK(permuted.scores.at(apply(issue)) == score);
      }

      Ranking r(kAllIssues.begin(), kAllIssues.end());
      std::shuffle(r.begin(), r.end(), gen);
      const std::vector<Ballot> unanimous(1 + gen() % 7, ranked("u", r));
      for (Rule rule : {Rule::Borda, Rule::Plurality, Rule::Copeland}) {
        if (rule == Rule::Plurality) {
          CHECK(run_rule(rule, unanimous).ranking.front() == r.front());
        } else {
          CHECK(run_rule(rule, unanimous).ranking == r);
        }
      }
    }
  }

  TEST_CASE("borda totals and oracle agreement") {
    std::mt19937 gen(99);
    for (int trial = 0; trial < 300; ++trial) {
      const auto ballots = random_ballots(gen, false);
      const auto result = borda(ballots);
      double total = 0;
      for (const auto& [i, s] : result.scores) total += s;
      CHECK(total == static_cast<double>(ballots.size()) * 4 * 3 / 2);
      CHECK(result.scores == oracle::borda_scores(ballots));

      const auto m = pairwise_margins(ballots);
      for (IssueKind a : kAllIssues) {
        CHECK(m.at(a).at(a) == 0);
        for (IssueKind b : kAllIssues) CHECK(m.at(a).at(b) == -m.at(b).at(a));
      }
    }
  }
}
