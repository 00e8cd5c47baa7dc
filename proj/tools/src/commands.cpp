#include "kfr_tools/commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "kfr/checkpoint.hpp"
#include "kfr/env.hpp"
#include "kfr/error.hpp"
#include "kfr/metrics.hpp"
#include "kfr/protocol.hpp"
#include "kfr/training.hpp"

namespace kfr::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kCorpusFormat = "kfr-corpus";
constexpr int kCorpusVersion = 1;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path prepare_out_dir(const RunConfig& cfg) {
  const fs::path dir(cfg.io.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
  return dir;
}

json episode_json(const EpisodeRecord& e) {
  return json{{"seed", e.seed},
              {"j", e.j},
              {"f", e.f},
              {"jf", e.jf},
              {"reward", e.reward.r_total},
              {"keyframes", e.keyframes},
              {"target_segments", e.target_segments},
              {"segments_covered", e.segments_covered}};
}

std::string summary_line(const EvalReport& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "j=%.4f f=%.4f jf=%.4f episodes=%zu", r.j_mean, r.f_mean, r.jf_mean,
                r.episodes.size());
  return buf;
}

// Runs `body`, turning any exception into a one-line JSON error record.
template <class F>
int guarded(Streams s, F&& body) {
  auto report = [&](const char* type, const std::string& msg, const json& extra) {
    json rec{{"error", type}, {"message", msg}};
    rec.update(extra);
    s.err << rec.dump() << "\n";
  };
  try {
    return body();
  } catch (const ConfigError& e) {
    report("config", e.what(), {{"key", e.key()}});
    return 2;
  } catch (const FormatError& e) {
    report("format", e.what(), json::object());
    return 3;
  } catch (const GenerationError& e) {
    report("generation", e.what(), {{"seed", e.seed()}});
    return 4;
  } catch (const ParseError& e) {
    report("parse", e.what(), {{"kind", std::string(to_string(e.kind()))}});
    return 5;
  } catch (const PreconditionError& e) {
    report("precondition", e.what(), json::object());
    return 6;
  } catch (const std::exception& e) {
    report("io", e.what(), json::object());
    return 1;
  }
}

}  // namespace

RunConfig resolve_config(const CommonOptions& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  for (const auto& kv : o.overrides) apply_override(cfg, kv);
  if (!o.out_dir.empty()) cfg.io.out_dir = o.out_dir;
  cfg.validate();
  return cfg;
}

Corpus read_corpus(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw FormatError("corpus " + path + " is empty");
  const json head = json::parse(line, nullptr, false);
  if (head.is_discarded() || !head.is_object() || head.value("format", "") != kCorpusFormat)
    throw FormatError("corpus header field format is wrong");
  if (head.value("version", 0) != kCorpusVersion) throw FormatError("corpus header field version is unsupported");
  if (!head.contains("config") || !head.contains("count") || !head.contains("seed"))
    throw FormatError("corpus header is missing config, count or seed");
  Corpus c;
  c.config = config_from_text(head["config"].dump());
  c.seed = head["seed"].get<std::uint64_t>();
  const auto count = head["count"].get<std::size_t>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.contains("seed") || !rec["seed"].is_number_unsigned())
      throw FormatError("corpus record " + std::to_string(c.episode_seeds.size()) + " has no seed");
    c.episode_seeds.push_back(rec["seed"].get<std::uint64_t>());
  }
  if (c.episode_seeds.size() != count)
    throw FormatError("corpus holds " + std::to_string(c.episode_seeds.size()) + " records, header says " +
                      std::to_string(count));
  return c;
}

int cmd_gen(const CommonOptions& o, int count, Streams s) {
  return guarded(s, [&] {
    const RunConfig cfg = resolve_config(o);
    if (count < 0) throw ConfigError("--count", "must be non-negative");
    const auto seeds = corpus_seeds(o.seed, count);
    // io settings describe where the corpus went, not what it contains
    json embedded = json::parse(config_to_text(cfg));
    embedded.erase("io");
    std::string text = json{{"format", kCorpusFormat},
                            {"version", kCorpusVersion},
                            {"seed", o.seed},
                            {"count", count},
                            {"config", embedded}}
                           .dump() +
                       "\n";
    int segments = 0;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const auto e = generate_episode(cfg.env, seeds[i]);
      segments += static_cast<int>(e.target_object().visibility.size());
      text += json{{"index", i},
                   {"seed", seeds[i]},
                   {"frames", e.frames},
                   {"objects", e.objects.size()},
                   {"query", std::string(to_string(e.query.type))},
                   {"target_segments", e.target_object().visibility.size()}}
                  .dump() +
              "\n";
    }
    const auto dir = prepare_out_dir(cfg);
    write_file_atomic((dir / kCorpusFile).string(), text);
    s.out << "wrote " << count << " episodes to " << (dir / kCorpusFile).string();
    if (count > 0) s.out << " (mean target segments " << double(segments) / count << ")";
    s.out << "\n";
    return 0;
  });
}

int cmd_train(const CommonOptions& o, Streams s) {
  return guarded(s, [&] {
    const RunConfig cfg = resolve_config(o);
    const auto dir = prepare_out_dir(cfg);
    std::string log;
    const int every = std::max(1, cfg.grpo.iterations / 10);
    const auto result = run_training(cfg, o.seed, [&](const LogRecord& r) {
      log += to_json_line(r) + "\n";
      if ((r.iteration + 1) % every == 0)
        s.err << "iteration " << r.iteration + 1 << "/" << cfg.grpo.iterations << " mean_reward " << r.mean_reward
              << "\n";
    });
    const auto heldout = corpus_seeds(cfg.eval.seed, cfg.eval.corpus_size);
    const auto ec = cfg.eval_config();
    const auto before = evaluate(result.initial, heldout, ec);
    const auto after = evaluate(result.final_params, heldout, ec);
    const json summary{{"seed", o.seed},
                       {"iterations", cfg.grpo.iterations},
                       {"heldout_episodes", heldout.size()},
                       {"initial_jf", before.jf_mean},
                       {"trained_jf", after.jf_mean},
                       {"improvement", after.jf_mean - before.jf_mean}};
    write_file_atomic((dir / kResolvedConfigFile).string(), config_to_text(cfg));
    write_file_atomic((dir / kLogFile).string(), log);
    write_file_atomic((dir / kSummaryFile).string(), summary.dump(2) + "\n");
    save_checkpoint(result.final_params, (dir / kCheckpointFile).string());
    s.out << "initial " << summary_line(before) << "\n";
    s.out << "trained " << summary_line(after) << "\n";
    return 0;
  });
}

int cmd_eval(const CommonOptions& o, const std::string& checkpoint_path, const std::string& corpus_path, Streams s) {
  return guarded(s, [&] {
    RunConfig cfg = resolve_config(o);
    const auto params = load_checkpoint(checkpoint_path, cfg.policy.k_max);
    std::vector<std::uint64_t> seeds;
    if (corpus_path.empty()) {
      seeds = corpus_seeds(cfg.eval.seed, cfg.eval.corpus_size);
    } else {
      auto corpus = read_corpus(corpus_path);
      cfg.env = corpus.config.env;  // episodes regenerate under the corpus's own settings
      seeds = std::move(corpus.episode_seeds);
      if (seeds.empty()) throw FormatError("corpus " + corpus_path + " holds no episodes");
    }
    const auto report = evaluate(params, seeds, cfg.eval_config());
    std::string episodes;
    for (const auto& e : report.episodes) episodes += episode_json(e).dump() + "\n";
    const json doc{{"j_mean", report.j_mean},
                   {"f_mean", report.f_mean},
                   {"jf_mean", report.jf_mean},
                   {"episodes", report.episodes.size()},
                   {"f_tolerance", cfg.eval.f_tolerance}};
    const auto dir = prepare_out_dir(cfg);
    write_file_atomic((dir / kEpisodesFile).string(), episodes);
    write_file_atomic((dir / kReportFile).string(), doc.dump(2) + "\n");
    s.out << summary_line(report) << "\n";
    return 0;
  });
}

int cmd_audit(const CommonOptions& o, int cases, audit::Fault fault, Streams s) {
  return guarded(s, [&] {
    resolve_config(o);  // rejects a bad config even though the oracles ignore it
    if (cases < 1) throw ConfigError("--cases", "must be at least 1");
    const auto report = audit::run(o.seed, cases, fault);
    audit::print(report, s.out);
    return report.passed() ? 0 : 1;
  });
}

}  // namespace kfr::cli
