#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kfr/config.hpp"
#include "kfr_tools/audit.hpp"

namespace kfr::cli {

struct CommonOptions {
  std::string config_path;             // empty = built-in defaults
  std::vector<std::string> overrides;  // "section.key=value"
  std::uint64_t seed = 0;
  std::string out_dir;  // empty = io.out_dir from the config
};

/// Defaults, then the config file, then --set overrides, then --out.
RunConfig resolve_config(const CommonOptions& o);

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

// Each command returns a process exit code. Errors are reported on `err` as a
// single JSON object and never leave partial primary outputs behind.

int cmd_gen(const CommonOptions& o, int count, Streams s);
int cmd_train(const CommonOptions& o, Streams s);
/// `corpus_path` empty = the held-out corpus described by the eval section.
int cmd_eval(const CommonOptions& o, const std::string& checkpoint_path, const std::string& corpus_path, Streams s);
int cmd_audit(const CommonOptions& o, int cases, audit::Fault fault, Streams s);

inline constexpr const char* kCorpusFile = "corpus.jsonl";
inline constexpr const char* kCheckpointFile = "checkpoint.json";
inline constexpr const char* kLogFile = "log.jsonl";
inline constexpr const char* kSummaryFile = "summary.json";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kEpisodesFile = "episodes.jsonl";
inline constexpr const char* kResolvedConfigFile = "config.json";

struct Corpus {
  RunConfig config;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> episode_seeds;
};

/// Throws FormatError on a malformed file.
Corpus read_corpus(const std::string& path);

}  // namespace kfr::cli
