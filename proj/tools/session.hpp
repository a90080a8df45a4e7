#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "deltaforge/syntax.hpp"

namespace deltaforge::cli {

using Json = nlohmann::ordered_json;

struct Limits {
  unsigned max_order = 12;
  unsigned max_degree = 16;
  std::size_t max_steps = 200000;
};

/// Applies `key=value` pairs separated by commas or spaces (max_order,
/// max_degree, max_steps). Throws Error on unknown keys or bad values.
void apply_limits_spec(Limits& limits, std::string_view spec);

/// One top-level statement: its tokens (ending with an End token) and the
/// source text it was parsed from.
struct Statement {
  std::string keyword;
  std::vector<Token> tokens;
  int line = 0;
  std::string echo;
};

struct Session {
  std::string name;
  std::vector<Statement> statements;
};

/// Splits source text into statements. A statement starts on a new line
/// outside any bracket. Throws ParseError on unknown keywords or unbalanced
/// brackets.
Session parse_session(std::string_view source, std::string name = "session");

struct RunFlags {
  bool keep_going = false;
  Limits limits;
};

struct Report {
  Json json;  // includes "timing"
  int exit_code = 0;
};

/// Executes the statements in order. Errors abort the run unless keep_going
/// is set; in both cases they are recorded in the report and force exit 1.
Report run(const Session& session, const RunFlags& flags);

/// Parses and runs; a ParseError becomes a report with a diagnostic entry.
Report run_source(std::string_view source, const std::string& name, const RunFlags& flags);

/// Aligned plain-text rendering of a report.
std::string render_text(const Json& report);

/// Report without the timing field, pretty-printed with a trailing newline.
std::string canonical_json(const Json& report);

struct CorpusResult {
  std::size_t cases = 0;
  std::vector<std::string> mismatches;
  std::vector<std::string> missing;
  std::string summary() const;
  bool ok() const { return mismatches.empty() && missing.empty(); }
};

/// Runs every `*.dfs` in `dir` and byte-compares against `*.expected.json`.
/// With `update`, rewrites the expectations instead.
CorpusResult run_corpus(const std::string& dir, const RunFlags& flags, bool update = false);

}  // namespace deltaforge::cli
