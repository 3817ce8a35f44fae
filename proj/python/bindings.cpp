#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "trustlens/checkers.hpp"
#include "trustlens/cli.hpp"
#include "trustlens/error.hpp"
#include "trustlens/rating.hpp"
#include "trustlens/report_io.hpp"
#include "trustlens/voting.hpp"

namespace py = pybind11;
using namespace trustlens;

namespace {

// Reports cross the boundary as JSON text; the Python package decodes them.
std::string rate_file(const std::string& path, const std::string& profile_name,
                      const std::string& format, const std::optional<std::string>& data_dir,
                      std::uint64_t seed, const std::string& tie) {
  const auto profile = find_builtin_profile(profile_name);
  if (!profile) throw Error(ErrorKind::Usage, "unknown builtin profile '" + profile_name + "'");
  RatingConfig config;
  {
    py::gil_scoped_release release;
    config.checkers = CheckerSuite::load(data_dir ? std::filesystem::path(*data_dir) : default_data_dir());
  }
  config.checkers.leakage.rng_seed = seed;
  config.tie_policy = parse_tie_policy(tie);
  RatingReport report;
  {
    py::gil_scoped_release release;
    report = rate_corpus(load_corpus(path, parse_corpus_format(format)), *profile, config);
  }
  return to_json(report).dump();
}

std::string aggregate_levels(const std::map<std::string, std::string>& levels,
                             const std::vector<std::string>& order, const std::string& tie) {
  std::vector<IssueKind> issues;
  for (const auto& code : order) issues.push_back(issue_from_code(code));
  std::map<IssueKind, TrustLevel> parsed;
  for (const auto& [code, level] : levels) parsed[issue_from_code(code)] = parse_level(level);
  return to_json(aggregate_rating(parsed, UserProfile("custom", issues), parse_tie_policy(tie))).dump();
}

std::string vote(const std::vector<std::vector<std::string>>& rankings, const std::string& rule) {
  std::vector<voting::Ballot> ballots;
  for (const auto& r : rankings) {
    voting::Ballot b;
    b.voter_id = "v" + std::to_string(ballots.size() + 1);
    for (const auto& code : r) b.ranking.push_back(issue_from_code(code));
    ballots.push_back(std::move(b));
  }
  return to_json(voting::run_rule(voting::parse_rule(rule), ballots)).dump();
}

py::tuple run_cli(const std::vector<std::string>& args, const std::string& input) {
  std::vector<std::string> argv{"trustlens"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli::run(argv, in, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the trustlens chatbot trust-rating engine";

  // The module keeps the type alive; the extra reference is never dropped.
  static py::handle error_type =
      py::exception<Error>(m, "TrustlensError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("default_data_dir", [] { return default_data_dir(); });

  m.def(
      "bin",
      [](double raw, double low, double high) {
        return std::string(level_name(bin(raw, {low, high})));
      },
      py::arg("raw"), py::arg("low") = 0.33, py::arg("high") = 0.67,
      "Map a raw [0,1] score to 'L', 'M' or 'H'.");

  m.def(
      "aggregate_abuse",
      [](std::uint64_t hate, std::uint64_t offensive, std::uint64_t neither) {
        return aggregate_abuse({hate, offensive, neither});
      },
      py::arg("hate"), py::arg("offensive"), py::arg("neither"));

  m.def(
      "map_epochs_to_score",
      [](std::optional<int> epochs) { return map_epochs_to_score(epochs, LeakageConfig{}); },
      py::arg("epochs"), "None means the secret was never elicited.");

  m.def(
      "builtin_profiles",
      [] {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& p : builtin_profiles()) out.emplace_back(p.name(), join_codes(p.order()));
        return out;
      },
      "Builtin profiles as (name, 'CODE,CODE,...') pairs.");

  m.def("aggregate_rating_json", &aggregate_levels, py::arg("levels"), py::arg("order"),
        py::arg("tie") = "pessimistic");
  m.def("rate_corpus_json", &rate_file, py::arg("path"), py::arg("profile") = "P_CU",
        py::arg("format") = "canonical", py::arg("data_dir") = py::none(), py::arg("seed") = 42,
        py::arg("tie") = "pessimistic");
  m.def("vote_json", &vote, py::arg("rankings"), py::arg("rule") = "borda");
  m.def("run_cli", &run_cli, py::arg("args"), py::arg("stdin") = "",
        "Run the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
