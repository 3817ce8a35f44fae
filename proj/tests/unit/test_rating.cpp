#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "../oracles.hpp"
#include "support.hpp"
#include "trustlens/error.hpp"
#include "trustlens/rating.hpp"

using namespace trustlens;
using L = TrustLevel;

namespace {

std::map<IssueKind, TrustLevel> levels(TrustLevel al, TrustLevel b, TrustLevel cc, TrustLevel il) {
  return {{IssueKind::AL, al}, {IssueKind::B, b}, {IssueKind::CC, cc}, {IssueKind::IL, il}};
}

IssueScore raw_score(IssueKind issue, double raw) {
  IssueScore s;
  s.issue = issue;
  s.raw = raw;
  return s;
}

}  // namespace

TEST_SUITE("rating") {
  TEST_CASE("binning intervals") {
    CHECK(bin(0.0) == L::L);
    CHECK(bin(0.329) == L::L);
    CHECK(bin(0.33) == L::M);
    CHECK(bin(0.67) == L::M);
    CHECK(bin(0.6700001) == L::H);
    CHECK(bin(1.0) == L::H);
    CHECK_THROWS_AS(bin(-0.01), Error);
    CHECK_THROWS_AS(bin(1.01), Error);
    CHECK_THROWS_AS(bin(std::nan("")), Error);
    CHECK_THROWS_AS((BinningConfig{0.7, 0.5}).validate(), Error);
  }

  TEST_CASE("binning is monotone") {
    TrustLevel prev = L::L;
    for (int i = 0; i <= 10000; ++i) {
      const TrustLevel cur = bin(i / 10000.0);
      CHECK(static_cast<int>(cur) >= static_cast<int>(prev));
      prev = cur;
    }
  }

  TEST_CASE("builtin profiles") {
    const auto& all = builtin_profiles();
    REQUIRE(all.size() == 4);
    CHECK(find_builtin_profile("P_FU")->order() ==
          std::vector<IssueKind>{IssueKind::B, IssueKind::CC, IssueKind::AL, IssueKind::IL});
    CHECK(find_builtin_profile("P_PU")->order().front() == IssueKind::IL);
    for (const auto& p : all) {
      std::vector<int> imps;
      for (IssueKind i : kAllIssues) imps.push_back(p.importance(i));
      std::sort(imps.begin(), imps.end());
      CHECK(imps == std::vector<int>{1, 2, 3, 4});
    }
    CHECK_FALSE(find_builtin_profile("P_XX"));
    CHECK_THROWS_AS(UserProfile("dup", {IssueKind::AL, IssueKind::AL}), Error);
    CHECK_THROWS_AS(UserProfile("empty", {}), Error);
  }

  TEST_CASE("profile files round trip") {
    const auto path = std::filesystem::temp_directory_path() / "trustlens_profile_test.json";
    const UserProfile p("mine", {IssueKind::IL, IssueKind::CC});
    save_profile(p, path);
    CHECK(load_profile(path) == p);
    std::filesystem::remove(path);
  }

  TEST_CASE("worked example: tie between L and M resolves to M") {
    const UserProfile p("example", {IssueKind::B, IssueKind::AL, IssueKind::CC, IssueKind::IL});
    const auto r = aggregate_rating(levels(L::M, L::L, L::M, L::H), p, TiePolicy::Pessimistic);
    CHECK(r.aggregate == L::M);
    CHECK(r.tallies.at(L::L) == 3);
    CHECK(r.tallies.at(L::M) == 3);
    CHECK(r.tallies.at(L::H) == 0);
    CHECK(r.tie);
    CHECK(aggregate_rating(levels(L::M, L::L, L::M, L::H), p, TiePolicy::Optimistic).aggregate == L::L);
  }

  TEST_CASE("P_FU tie between H and L") {
    const auto p = *find_builtin_profile("P_FU");
    const auto lv = levels(L::L, L::H, L::L, L::L);
    CHECK(aggregate_rating(lv, p, TiePolicy::Pessimistic).aggregate == L::H);
    CHECK(aggregate_rating(lv, p, TiePolicy::Optimistic).aggregate == L::L);
  }

  TEST_CASE("P_PU over levels L,L,M,M") {
    const auto p = *find_builtin_profile("P_PU");
    const auto r = aggregate_rating(levels(L::L, L::L, L::M, L::M), p);
    CHECK(r.tallies.at(L::M) == 3);
    CHECK(r.tallies.at(L::L) == 3);
    CHECK(r.aggregate == L::M);
  }

  TEST_CASE("explanation lists every issue then the tally") {
    const auto p = *find_builtin_profile("P_CU");
    std::map<IssueKind, IssueScore> scores;
    scores[IssueKind::CC] = raw_score(IssueKind::CC, 0.407);
    scores[IssueKind::AL] = raw_score(IssueKind::AL, 0.0015);
    scores[IssueKind::B] = raw_score(IssueKind::B, 0.063);
    scores[IssueKind::IL] = raw_score(IssueKind::IL, 0.5);
    const auto r = rate_scores(scores, p, {}, TiePolicy::Pessimistic);
    CHECK(r.explanation.find("CC 0.407\xE2\x86\x92M \xC3\x97" "3") == 0);
    CHECK(r.explanation.find("tally L=3 M=3 H=0") != std::string::npos);
    CHECK(r.explanation.find("tie") != std::string::npos);
    CHECK(r.aggregate == L::M);
    REQUIRE(r.issues.size() == 4);
    CHECK(r.issues[0].issue == IssueKind::CC);
    CHECK(r.find(IssueKind::IL)->weight == 0);
  }

  TEST_CASE("missing level for a profile issue is rejected") {
    const auto p = *find_builtin_profile("P_CU");
    std::map<IssueKind, TrustLevel> partial{{IssueKind::AL, L::L}};
    CHECK_THROWS_AS(aggregate_rating(partial, p), Error);
  }

  TEST_CASE("agrees with the brute-force tally on every case") {
    std::vector<IssueKind> order(kAllIssues.begin(), kAllIssues.end());
    int cases = 0;
    do {
      const UserProfile p("perm", order);
      for (int code = 0; code < 81; ++code) {
        std::map<IssueKind, TrustLevel> lv;
        std::vector<TrustLevel> by_rank;
        int c = code;
        for (IssueKind i : order) {
          lv[i] = static_cast<TrustLevel>(c % 3);
          by_rank.push_back(lv[i]);
          c /= 3;
        }
        for (bool pessimistic : {false, true}) {
          const auto expected = oracle::brute_force_aggregate(by_rank, pessimistic);
          const auto r = aggregate_rating(lv, p, pessimistic ? TiePolicy::Pessimistic : TiePolicy::Optimistic);
          CHECK(r.aggregate == expected.aggregate);
          CHECK(r.tie == expected.tie);
          for (TrustLevel level : kAllLevels) CHECK(r.tallies.at(level) == expected.weight[static_cast<int>(level)]);
          ++cases;
        }
      }
    } while (std::next_permutation(order.begin(), order.end()));
    CHECK(cases == 3888);
  }

  TEST_CASE("properties on random inputs") {
    std::mt19937 gen(3);
    for (int i = 0; i < 500; ++i) {
      std::vector<IssueKind> order(kAllIssues.begin(), kAllIssues.end());
      std::shuffle(order.begin(), order.end(), gen);
      const UserProfile p("r", order);
      auto lv = levels(static_cast<L>(gen() % 3), static_cast<L>(gen() % 3), static_cast<L>(gen() % 3),
                       static_cast<L>(gen() % 3));
      const auto pess = aggregate_rating(lv, p, TiePolicy::Pessimistic).aggregate;
      const auto opt = aggregate_rating(lv, p, TiePolicy::Optimistic).aggregate;
      CHECK(static_cast<int>(pess) >= static_cast<int>(opt));

      // The least important issue carries weight 0.
      auto changed = lv;
      changed[order.back()] = static_cast<L>((static_cast<int>(lv[order.back()]) + 1 + gen() % 2) % 3);
      CHECK(aggregate_rating(changed, p, TiePolicy::Pessimistic).aggregate == pess);

      const L same = static_cast<L>(gen() % 3);
      CHECK(aggregate_rating(levels(same, same, same, same), p, TiePolicy::Optimistic).aggregate == same);
    }
  }

  TEST_CASE("profiles over issue subsets") {
    const UserProfile p("two", {IssueKind::AL, IssueKind::IL});
    const auto r = aggregate_rating({{IssueKind::AL, L::H}, {IssueKind::IL, L::L}}, p);
    CHECK(r.aggregate == L::H);
    const UserProfile one("one", {IssueKind::CC});
    CHECK(aggregate_rating({{IssueKind::CC, L::M}}, one).aggregate == L::M);
  }

  TEST_CASE("rate_corpus on a benign corpus") {
    const Corpus c = testing::make_corpus({testing::make_dialog("d", {{Role::User, "the"}, {Role::Agent, "the"}})});
    RatingConfig config;
    config.checkers = testing::shipped_suite();
    const auto r = rate_corpus(c, *find_builtin_profile("P_AU"), config);
    REQUIRE(r.issues.size() == 4);
    for (const auto& i : r.issues) {
      for (const auto& e : i.evidence) CHECK(c.find(e.locator) != nullptr);
    }
    CHECK(r.find(IssueKind::AL)->level == L::L);
    CHECK(r.find(IssueKind::IL)->raw == 0.5);
    CHECK_FALSE(r.flags.empty());
  }
}
