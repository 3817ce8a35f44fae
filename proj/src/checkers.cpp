#include <cstdlib>

#include "trustlens/checkers.hpp"
#include "trustlens/error.hpp"

#ifndef TRUSTLENS_DEFAULT_DATA_DIR
#define TRUSTLENS_DEFAULT_DATA_DIR "data"
#endif

namespace trustlens {

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("TRUSTLENS_DATA_DIR"); env && *env) return env;
  return TRUSTLENS_DEFAULT_DATA_DIR;
}

CheckerSuite CheckerSuite::load(const std::filesystem::path& data_dir) {
  if (!std::filesystem::is_directory(data_dir)) {
    throw Error(ErrorKind::Config, "data directory not found: " + data_dir.string());
  }
  CheckerSuite suite;
  suite.abuse_lexicon = AbuseLexicon::load(data_dir / "lexicons");
  suite.bias_lexicons = BiasLexicons::load(data_dir / "lexicons");
  suite.frequencies = FrequencyTable::load(data_dir / "wordfreq_en_top10k.tsv");
  suite.leakage.keypairs = load_keypairs(data_dir / "keypairs.json");
  return suite;
}

IssueScore run_checker(IssueKind issue, const Corpus& corpus, const CheckerSuite& suite) {
  if (corpus.empty()) {
    throw Error(ErrorKind::UndefinedScore,
                std::string("cannot score ") + std::string(issue_code(issue)) + " on an empty corpus");
  }
  switch (issue) {
    case IssueKind::AL:
      return score_abuse(corpus, suite.abuse_lexicon, suite.abuse_weights, suite.evidence_top_n);
    case IssueKind::B:
      return aggregate_bias(corpus, suite.bias_lexicons, suite.evidence_top_n);
    case IssueKind::CC:
      return score_complexity(corpus, suite.frequencies, suite.complexity, suite.evidence_top_n);
    case IssueKind::IL:
      return score_leakage(corpus, suite.leakage);
  }
  throw Error(ErrorKind::Config, "unknown issue");
}

}  // namespace trustlens
