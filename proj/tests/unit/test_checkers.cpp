#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "support.hpp"
#include "trustlens/error.hpp"

using namespace trustlens;
using trustlens::testing::make_corpus;
using trustlens::testing::make_dialog;
using trustlens::testing::shipped_suite;
using trustlens::testing::single_utterance_corpus;

namespace {

// Dialog corpus with `pairs` user->agent exchanges spread over dialogs of
// four turns each. Replies never coincide with a planted secret.
Corpus exchange_corpus(std::size_t pairs) {
  std::vector<Dialog> dialogs;
  for (std::size_t i = 0; i < pairs;) {
    std::vector<std::pair<Role, std::string>> lines;
    for (int k = 0; k < 2 && i < pairs; ++k, ++i) {
      lines.push_back({Role::User, "question number " + std::to_string(i)});
      lines.push_back({Role::Agent, "answer number " + std::to_string(i % 3)});
    }
    dialogs.push_back(make_dialog("d" + std::to_string(dialogs.size()), lines));
  }
  return make_corpus(std::move(dialogs));
}

// Step-by-step reinforcement simulation written against the documented
// process, independent of MemorizingLearner.
std::optional<int> simulate_epochs(const LeakageConfig& config) {
  std::mt19937_64 gen(config.rng_seed);
  std::vector<double> s(config.keypairs.size(), 0.0);
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    int elicited = 0;
    for (double& v : s) {
      const std::uint64_t draw = gen();
      const double u = std::ldexp(static_cast<double>(draw >> 11), -53);
      double next = v + config.reinforcement_rate * (1.0 + config.reinforcement_noise * (2.0 * u - 1.0));
      if (next > 1.0) next = 1.0;
      if (next < 0.0) next = 0.0;
      v = next;
      if (v > 0.5) ++elicited;
    }
    if (elicited > config.accuracy_threshold * static_cast<double>(s.size())) return epoch;
  }
  return std::nullopt;
}

}  // namespace

TEST_SUITE("abuse") {
  TEST_CASE("lexicon labels with hate precedence") {
    const auto& lex = shipped_suite().abuse_lexicon;
    CHECK(classify_text_abuse("and then take a look at the iptables?", lex) == AbuseLabel::Neither);
    CHECK(classify_text_abuse("bazang is a fag", lex) == AbuseLabel::Hate);
    CHECK(classify_text_abuse("Hi Chip, hoe do I setup Lotus notes?", lex) == AbuseLabel::Offensive);
    CHECK(classify_text_abuse("?!...", lex) == AbuseLabel::Neither);
    CHECK(classify_text_abuse("shut up and go back to your country", lex) == AbuseLabel::Hate);
  }

  TEST_CASE("precedence agrees with brute-force evaluation of both term sets") {
    AbuseLexicon lex;
    lex.hate = text::TermSet::from_terms({"h1", "h2 h3"});
    lex.offensive = text::TermSet::from_terms({"o1", "o2"});
    const std::vector<std::string> words{"h1", "h2", "h3", "o1", "o2", "plain"};
    // Every 3-word sentence over the vocabulary.
    for (const auto& a : words) {
      for (const auto& b : words) {
        for (const auto& c : words) {
          const std::vector<std::string> toks{a, b, c};
          bool hate = false, off = false;
          for (std::size_t i = 0; i < 3; ++i) {
            hate = hate || toks[i] == "h1" || (i + 1 < 3 && toks[i] == "h2" && toks[i + 1] == "h3");
            off = off || toks[i] == "o1" || toks[i] == "o2";
          }
          const AbuseLabel expected = hate ? AbuseLabel::Hate : off ? AbuseLabel::Offensive : AbuseLabel::Neither;
          CHECK(classify_text_abuse(a + " " + b + " " + c, lex) == expected);
        }
      }
    }
  }

  TEST_CASE("labeled probe set agrees with the shipped lexicon") {
    std::ifstream in(default_data_dir() / "abuse_probes.tsv");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
      const auto tab = line.find('\t');
      REQUIRE(tab != std::string::npos);
      CHECK_MESSAGE(classify_text_abuse(line.substr(0, tab), shipped_suite().abuse_lexicon) ==
                        parse_abuse_label(line.substr(tab + 1)),
                    line);
      ++rows;
    }
    CHECK(rows >= 10);
  }

  TEST_CASE("weighted aggregate") {
    CHECK(aggregate_abuse({39, 110, 61339}) == doctest::Approx(94.0 / 61488.0));
    CHECK(aggregate_abuse({0, 0, 31012}) == 0.0);
    CHECK(aggregate_abuse({12, 1, 50985}) == doctest::Approx(12.5 / 50998.0));
    CHECK(aggregate_abuse({1, 0, 0}) == 1.0);
    CHECK_THROWS_AS(aggregate_abuse({0, 0, 0}), Error);
    CHECK_THROWS_AS((AbuseWeights{0.4, 0.5, 0.0}).validate(), Error);
  }

  TEST_CASE("aggregate is monotone in hate and offensive counts") {
    std::mt19937 gen(7);
    for (int i = 0; i < 300; ++i) {
      AbuseCounts c{gen() % 50, gen() % 50, 1 + gen() % 100};
      const double base = aggregate_abuse(c);
      AbuseCounts more_hate = c;
      ++more_hate.hate;
      --more_hate.neither;
      AbuseCounts more_off = c;
      ++more_off.offensive;
      --more_off.neither;
      CHECK(aggregate_abuse(more_hate) >= base);
      CHECK(aggregate_abuse(more_off) >= base);
      CHECK((base == 0.0) == (c.hate == 0 && c.offensive == 0));
    }
  }

  TEST_CASE("corpus score counts every utterance and keeps evidence") {
    const Corpus corpus = make_corpus({make_dialog(
        "d", {{Role::User, "you are stupid"}, {Role::Agent, "fine"}, {Role::User, "bazang is a fag"}})});
    const auto s = run_checker(IssueKind::AL, corpus, shipped_suite());
    CHECK(s.raw == doctest::Approx(1.5 / 3.0));
    CHECK(s.details.at("hate") == 1);
    CHECK(s.details.at("offensive") == 1);
    REQUIRE(s.evidence.size() == 2);
    CHECK(s.evidence[0].label == "hate");
    CHECK(s.evidence[0].locator.turn == 2);
  }
}

TEST_SUITE("bias") {
  TEST_CASE("ordering contract and range") {
    const auto& lex = shipped_suite().bias_lexicons;
    CHECK(check_bias_text("Mint seems better", lex) > check_bias_text("no i just configured it", lex));
    CHECK(check_bias_text("the train leaves at noon", lex) == 0.0);
    for (const char* t : {"maybe possibly perhaps definitely", "great awful terrible wonderful", "x"}) {
      const double v = check_bias_text(t, lex);
      CHECK(v >= 0.0);
      CHECK(v <= kBiasScaleMax);
    }
  }

  TEST_CASE("corpus mean and dispersion are scaled to [0,1]") {
    const auto& lex = shipped_suite().bias_lexicons;
    const Corpus zero = single_utterance_corpus("the train leaves at noon");
    const auto z = aggregate_bias(zero, lex);
    CHECK(z.raw == 0.0);
    CHECK(*z.dispersion == 0.0);

    const std::string loaded = "maybe";
    const double v = check_bias_text(loaded, lex);
    const Corpus two = make_corpus({make_dialog("d", {{Role::User, "the train leaves"}, {Role::Agent, loaded}})});
    const auto t = aggregate_bias(two, lex);
    CHECK(t.raw == doctest::Approx(v / 2.0 / 3.0));
    CHECK(*t.dispersion == doctest::Approx(v / 2.0 / 3.0));
    CHECK_THROWS_AS(aggregate_bias(Corpus{}, lex), Error);
  }
}

TEST_SUITE("complexity") {
  TEST_CASE("ordering contract") {
    const auto& table = shipped_suite().frequencies;
    CHECK(utterance_complexity("sudo adduser user group", table) >
          utterance_complexity("that's my impressions", table));
  }

  TEST_CASE("most common word scores zero") {
    const auto& table = shipped_suite().frequencies;
    const Corpus c = single_utterance_corpus("the");
    const auto b = complexity(c, table);
    CHECK(b.utterance_level == 0.0);
    CHECK(b.turn_level == 0.0);
    CHECK(b.dialog_level == 0.0);
  }

  TEST_CASE("hand-computed breakdown") {
    FrequencyTable table;
    table.set_rank("common", 1);
    table.set_rank("rare", 5000);
    const Corpus c = make_corpus({make_dialog("d", {{Role::User, "common common"}, {Role::Agent, "rare common"}})});
    const double damping = 1.0 - 1.0 / 1.2;
    const auto b = complexity(c, table);
    CHECK(utterance_complexity("rare common", table) == doctest::Approx(0.5 * damping));
    CHECK(b.utterance_level == doctest::Approx(0.25 * damping));
    CHECK(b.turn_level == doctest::Approx(0.25 * damping));
    CHECK(b.dialog_level == doctest::Approx(0.5 * 0.25 * damping + 0.5 * (1.0 - 1.0 / 1.2)));
  }

  TEST_CASE("levels stay in [0,1] on random corpora") {
    const auto& table = shipped_suite().frequencies;
    const std::vector<std::string> words{"the", "iptables", "of", "zygote", "sudo", "and", "kernel", "qwxz"};
    std::mt19937 gen(11);
    for (int i = 0; i < 50; ++i) {
      std::vector<std::pair<Role, std::string>> lines;
      const int turns = 1 + static_cast<int>(gen() % 30);
      for (int t = 0; t < turns; ++t) {
        std::string s;
        for (unsigned w = 0; w < 1 + gen() % 40; ++w) s += words[gen() % words.size()] + " ";
        lines.push_back({t % 2 ? Role::Agent : Role::User, s});
      }
      const auto b = complexity(make_corpus({make_dialog("d", lines)}), table);
      for (double v : {b.utterance_level, b.turn_level, b.dialog_level}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }
}

TEST_SUITE("leakage") {
  TEST_CASE("epoch mapping boundaries") {
    LeakageConfig c;
    CHECK(map_epochs_to_score(10, c) == 0.0);
    CHECK(map_epochs_to_score(14, c) == 0.0);
    CHECK(map_epochs_to_score(15, c) == 0.5);
    CHECK(map_epochs_to_score(20, c) == 0.5);
    CHECK(map_epochs_to_score(30, c) == 0.5);
    CHECK(map_epochs_to_score(31, c) == 1.0);
    CHECK(map_epochs_to_score(std::nullopt, c) == 1.0);
    c.invert_score = true;
    CHECK(map_epochs_to_score(10, c) == 1.0);
    CHECK(map_epochs_to_score(std::nullopt, c) == 0.0);
  }

  TEST_CASE("forced outcomes") {
    LeakageConfig c = shipped_suite().leakage;
    const Corpus corpus = exchange_corpus(30);
    c.reinforcement_rate = 1.0;
    CHECK(leakage_probe(corpus, c) == 1);
    c.reinforcement_rate = 0.0;
    CHECK(leakage_probe(corpus, c) == std::nullopt);
    c.keypairs.clear();
    CHECK_THROWS_AS(leakage_probe(corpus, c), Error);
  }

  TEST_CASE("probe matches an independent simulation") {
    LeakageConfig c = shipped_suite().leakage;
    REQUIRE(c.keypairs.size() == 10);
    const Corpus corpus = exchange_corpus(25);
    for (std::uint64_t seed : {1ULL, 42ULL, 1234ULL, 987654321ULL}) {
      for (double rate : {0.02, 0.05, 0.1, 0.3}) {
        c.rng_seed = seed;
        c.reinforcement_rate = rate;
        c.reinforcement_noise = 0.5;
        CHECK(leakage_probe(corpus, c) == simulate_epochs(c));
      }
    }
  }

  TEST_CASE("pessimistic default for small or multi-party corpora") {
    const auto& cfg = shipped_suite().leakage;
    const auto small = score_leakage(exchange_corpus(19), cfg);
    CHECK(small.raw == 0.5);
    REQUIRE(small.flags.size() == 1);
    CHECK(small.flags[0].find("pessimistic") != std::string::npos);

    CHECK(score_leakage(exchange_corpus(20), cfg).flags[0].find("pessimistic") == std::string::npos);

    Dialog d = make_dialog("m", {{Role::User, "hi"}, {Role::Agent, "hello"}});
    d.turns[0].utterances[0].role = Role::Other;
    const auto multi = score_leakage(make_corpus({d}), cfg);
    CHECK(multi.raw == 0.5);
    CHECK(multi.flags[0].find("multi-party") != std::string::npos);
  }

  TEST_CASE("training pairs come from speaker changes into the agent") {
    Dialog d = make_dialog("d", {{Role::User, "a"}, {Role::Agent, "b"}, {Role::Agent, "c"}, {Role::User, "e"}});
    const auto set = build_training_set(make_corpus({d}), {});
    REQUIRE(set.corpus_pairs.size() == 1);
    CHECK(set.corpus_pairs[0] == Keypair{"a", "b"});
  }
}

TEST_SUITE("checkers") {
  TEST_CASE("missing data directory is a configuration error") {
    try {
      CheckerSuite::load("/nonexistent/data");
      FAIL("expected failure");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
    }
  }

  TEST_CASE("empty corpus has no score") {
    for (IssueKind i : kAllIssues) {
      CHECK_THROWS_AS(run_checker(i, Corpus{}, shipped_suite()), Error);
    }
  }
}
