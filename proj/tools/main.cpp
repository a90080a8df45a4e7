#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "props.hpp"
#include "session.hpp"

using namespace deltaforge;
using namespace deltaforge::cli;

namespace {

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deltaforge: certified differential-algebra sessions"};
  app.require_subcommand(1);

  RunFlags flags;
  std::optional<unsigned> max_order, max_degree;
  std::optional<std::size_t> max_steps;
  auto add_limits = [&](CLI::App* sub) {
    sub->add_option("--max-order", max_order, "Reject inputs of higher order (Unknown)");
    sub->add_option("--max-degree", max_degree, "Reject inputs of higher total degree (Unknown)");
    sub->add_option("--max-steps", max_steps, "Reduction step budget");
  };

  std::string file;
  bool json = false;
  auto* run_cmd = app.add_subcommand("run", "Run a session file ('-' reads stdin)");
  run_cmd->add_option("file", file, "Session file (.dfs)")->required();
  run_cmd->add_flag("--json", json, "Print the JSON report");
  run_cmd->add_flag("--keep-going", flags.keep_going, "Continue after command errors");
  add_limits(run_cmd);

  std::string dir;
  bool update = false;
  auto* corpus_cmd = app.add_subcommand("corpus", "Check every .dfs in a directory against its .expected.json");
  corpus_cmd->add_option("dir", dir, "Corpus directory")->required();
  corpus_cmd->add_flag("--update", update, "Rewrite the expectations");
  add_limits(corpus_cmd);

  std::uint64_t seed = 1;
  std::size_t cases = 500;
  std::string suite;
  auto* props_cmd = app.add_subcommand("props", "Run the seeded property suites");
  props_cmd->add_option("--seed", seed, "Random seed");
  props_cmd->add_option("--cases", cases, "Cases per suite");
  props_cmd->add_option("--suite", suite, "Run one suite only");

  CLI11_PARSE(app, argc, argv);

  try {
    if (const char* env = std::getenv("DELTAFORGE_LIMITS")) apply_limits_spec(flags.limits, env);
    if (max_order) flags.limits.max_order = *max_order;
    if (max_degree) flags.limits.max_degree = *max_degree;
    if (max_steps) flags.limits.max_steps = *max_steps;

    if (*run_cmd) {
      const std::string name = file == "-" ? "stdin" : file;
      Report rep = run_source(read_input(file), name, flags);
      if (json)
        std::cout << rep.json.dump(2) << "\n";
      else
        std::cout << render_text(rep.json);
      return rep.exit_code;
    }
    if (*corpus_cmd) {
      CorpusResult res = run_corpus(dir, flags, update);
      std::cout << res.summary() << "\n";
      return res.ok() ? 0 : 2;
    }
    if (*props_cmd) {
      bool ok = true;
      for (const PropResult& r : run_properties(seed, cases, suite)) {
        std::cout << (r.failures.empty() ? "PASS " : "FAIL ") << r.suite << " (" << r.cases << " cases";
        if (r.skipped) std::cout << ", " << r.skipped << " skipped";
        std::cout << ")\n";
        for (const auto& f : r.failures) std::cout << "  " << f << "\n";
        ok = ok && r.failures.empty();
      }
      return ok ? 0 : 2;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
