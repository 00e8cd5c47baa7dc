#include "kfr/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kfr/error.hpp"

namespace kfr {

namespace {

using nlohmann::json;

// Reads keys from one JSON object and rejects anything it was not asked for.
class Section {
 public:
  Section(const json& parent, std::string name) : name_(std::move(name)) {
    const auto it = parent.find(name_);
    if (it == parent.end()) return;
    if (!it->is_object()) throw ConfigError(name_, "section must be an object");
    obj_ = &*it;
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!obj_) return;
    const auto it = obj_->find(key);
    if (it == obj_->end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError(name_ + "." + key, "value has the wrong type");
    }
  }

  void finish() const {
    if (!obj_) return;
    for (const auto& [k, v] : obj_->items()) {
      if (!seen_.count(k)) throw ConfigError(name_ + "." + k, "unknown key");
    }
  }

 private:
  std::string name_;
  const json* obj_ = nullptr;
  std::set<std::string> seen_;
};

json to_json(const RunConfig& c) {
  const auto& e = c.env;
  const auto& r = c.rewards;
  const auto& g = c.grpo;
  return json{
      {"env",
       {{"t_min", e.t_min},
        {"t_max", e.t_max},
        {"grid", e.grid},
        {"objects_min", e.objects_min},
        {"objects_max", e.objects_max},
        {"occlusion_prob", e.occlusion_prob},
        {"min_target_segments", e.min_target_segments},
        {"query_mix",
         {{"last_to_disappear", e.query_mix.last_to_disappear},
          {"last_to_sound", e.query_mix.last_to_sound},
          {"attribute_match", e.query_mix.attribute_match}}},
        {"colors", e.vocabulary.colors},
        {"shapes", e.vocabulary.shapes},
        {"presence_noise", e.presence_noise},
        {"jitter_px", e.jitter_px},
        {"gamma", e.gamma},
        {"train_frames_min", e.train_frames_min},
        {"train_frames_max", e.train_frames_max},
        {"eval_frames", e.eval_frames},
        {"max_retries", e.max_retries}}},
      {"rewards",
       {{"lambda_diversity", r.lambda_diversity},
        {"lambda_count", r.lambda_count},
        {"lambda_saliency", r.lambda_saliency},
        {"alpha_k", r.alpha_k},
        {"alpha_a", r.alpha_a},
        {"alpha_g", r.alpha_g},
        {"overlap_punish", r.overlap_punish},
        {"dist_reward", r.dist_reward},
        {"k0", r.k0}}},
      {"grpo",
       {{"group_size", g.step.group_size},
        {"beta", g.step.beta},
        {"clip_eps", g.step.clip_eps},
        {"lr", g.step.learning_rate},
        {"epochs_per_group", g.step.epochs_per_group},
        {"advantage_epsilon", g.step.advantage_epsilon},
        {"iterations", g.iterations},
        {"eval_every", g.eval_every},
        {"corrupt_response_prob", g.corrupt_response_prob}}},
      {"policy", {{"k_max", c.policy.k_max}, {"init_scale", c.policy.init_scale}}},
      {"eval",
       {{"corpus_size", c.eval.corpus_size},
        {"seed", c.eval.seed},
        {"f_tolerance", c.eval.f_tolerance},
        {"threads", c.eval.threads}}},
      {"io", {{"out_dir", c.io.out_dir}}},
  };
}

RunConfig from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    static const std::set<std::string> sections{"env", "rewards", "grpo", "policy", "eval", "io"};
    if (!sections.count(k)) throw ConfigError(k, "unknown section");
  }
  RunConfig c;
  {
    Section s(j, "env");
    auto& e = c.env;
    s.read("t_min", e.t_min);
    s.read("t_max", e.t_max);
    s.read("grid", e.grid);
    s.read("objects_min", e.objects_min);
    s.read("objects_max", e.objects_max);
    s.read("occlusion_prob", e.occlusion_prob);
    s.read("min_target_segments", e.min_target_segments);
    json mix;
    s.read("query_mix", mix);
    if (!mix.is_null()) {
      const json wrapper{{"env.query_mix", mix}};
      Section m(wrapper, "env.query_mix");
      m.read("last_to_disappear", e.query_mix.last_to_disappear);
      m.read("last_to_sound", e.query_mix.last_to_sound);
      m.read("attribute_match", e.query_mix.attribute_match);
      m.finish();
    }
    s.read("colors", e.vocabulary.colors);
    s.read("shapes", e.vocabulary.shapes);
    s.read("presence_noise", e.presence_noise);
    s.read("jitter_px", e.jitter_px);
    s.read("gamma", e.gamma);
    s.read("train_frames_min", e.train_frames_min);
    s.read("train_frames_max", e.train_frames_max);
    s.read("eval_frames", e.eval_frames);
    s.read("max_retries", e.max_retries);
    s.finish();
  }
  {
    Section s(j, "rewards");
    auto& r = c.rewards;
    s.read("lambda_diversity", r.lambda_diversity);
    s.read("lambda_count", r.lambda_count);
    s.read("lambda_saliency", r.lambda_saliency);
    s.read("alpha_k", r.alpha_k);
    s.read("alpha_a", r.alpha_a);
    s.read("alpha_g", r.alpha_g);
    s.read("overlap_punish", r.overlap_punish);
    s.read("dist_reward", r.dist_reward);
    s.read("k0", r.k0);
    s.finish();
  }
  {
    Section s(j, "grpo");
    auto& g = c.grpo;
    s.read("group_size", g.step.group_size);
    s.read("beta", g.step.beta);
    s.read("clip_eps", g.step.clip_eps);
    s.read("lr", g.step.learning_rate);
    s.read("epochs_per_group", g.step.epochs_per_group);
    s.read("advantage_epsilon", g.step.advantage_epsilon);
    s.read("iterations", g.iterations);
    s.read("eval_every", g.eval_every);
    s.read("corrupt_response_prob", g.corrupt_response_prob);
    s.finish();
  }
  {
    Section s(j, "policy");
    s.read("k_max", c.policy.k_max);
    s.read("init_scale", c.policy.init_scale);
    s.finish();
  }
  {
    Section s(j, "eval");
    s.read("corpus_size", c.eval.corpus_size);
    s.read("seed", c.eval.seed);
    s.read("f_tolerance", c.eval.f_tolerance);
    s.read("threads", c.eval.threads);
    s.finish();
  }
  {
    Section s(j, "io");
    s.read("out_dir", c.io.out_dir);
    s.finish();
  }
  c.validate();
  return c;
}

}  // namespace

void RunConfig::validate() const {
  env.validate();
  auto fail = [](const char* key, const char* msg) { throw ConfigError(key, msg); };
  auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  const auto& r = rewards;
  if (!nonneg(r.lambda_diversity)) fail("rewards.lambda_diversity", "must be non-negative");
  if (!nonneg(r.lambda_count)) fail("rewards.lambda_count", "must be non-negative");
  if (!nonneg(r.lambda_saliency)) fail("rewards.lambda_saliency", "must be non-negative");
  if (!nonneg(r.alpha_k)) fail("rewards.alpha_k", "must be non-negative");
  if (!nonneg(r.alpha_a)) fail("rewards.alpha_a", "must be non-negative");
  if (!nonneg(r.alpha_g)) fail("rewards.alpha_g", "must be non-negative");
  if (r.lambda_diversity + r.lambda_count + r.lambda_saliency <= 0.0)
    fail("rewards.lambda_diversity", "lambdas must not all be zero");
  if (r.alpha_k + r.alpha_a + r.alpha_g <= 0.0) fail("rewards.alpha_k", "alphas must not all be zero");
  if (!std::isfinite(r.overlap_punish)) fail("rewards.overlap_punish", "must be finite");
  if (!nonneg(r.dist_reward)) fail("rewards.dist_reward", "must be non-negative");
  if (r.k0 < 1) fail("rewards.k0", "must be at least 1");
  const auto& g = grpo.step;
  if (g.group_size < 2) fail("grpo.group_size", "must be at least 2");
  if (!nonneg(g.beta)) fail("grpo.beta", "must be non-negative");
  if (!(g.clip_eps > 0.0 && g.clip_eps < 1.0)) fail("grpo.clip_eps", "must lie in (0, 1)");
  if (!(nonneg(g.learning_rate) && g.learning_rate > 0.0)) fail("grpo.lr", "must be positive");
  if (g.epochs_per_group < 1) fail("grpo.epochs_per_group", "must be at least 1");
  if (!nonneg(g.advantage_epsilon)) fail("grpo.advantage_epsilon", "must be non-negative");
  // the library-side checks stay authoritative
  rewards.validate();
  grpo.step.validate();
  if (grpo.iterations < 0) throw ConfigError("grpo.iterations", "must be non-negative");
  if (grpo.eval_every < 0) throw ConfigError("grpo.eval_every", "must be non-negative");
  if (!(grpo.corrupt_response_prob >= 0.0 && grpo.corrupt_response_prob <= 1.0))
    throw ConfigError("grpo.corrupt_response_prob", "must lie in [0, 1]");
  if (policy.k_max < 1 || policy.k_max > 24) throw ConfigError("policy.k_max", "must lie within [1, 24]");
  if (!(policy.init_scale >= 0.0) || !std::isfinite(policy.init_scale))
    throw ConfigError("policy.init_scale", "must be non-negative");
  if (eval.corpus_size < 1) throw ConfigError("eval.corpus_size", "must be at least 1");
  if (eval.f_tolerance < 0) throw ConfigError("eval.f_tolerance", "must be non-negative");
  if (eval.threads < 1) throw ConfigError("eval.threads", "must be at least 1");
  if (io.out_dir.empty()) throw ConfigError("io.out_dir", "must not be empty");
}

PipelineConfig RunConfig::pipeline() const {
  PipelineConfig p;
  p.weights = rewards;
  p.jitter_px = env.jitter_px;
  p.gamma = env.gamma;
  return p;
}

EvalConfig RunConfig::eval_config() const {
  EvalConfig e;
  e.env = env;
  e.pipeline = pipeline();
  e.f_tolerance = eval.f_tolerance;
  e.seed = eval.seed;
  e.threads = eval.threads;
  return e;
}

RunConfig config_from_text(std::string_view text) {
  const json j = json::parse(text.begin(), text.end(), nullptr, false, /*ignore_comments=*/true);
  if (j.is_discarded()) throw ConfigError("<root>", "config is not valid JSON");
  return from_json(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_text(ss.str());
}

std::string config_to_text(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError(std::string(assignment), "override must be key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  const auto dot = key.find('.');
  if (dot == std::string::npos) throw ConfigError(key, "override key must be section.key");
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json j = to_json(cfg);
  const std::string section = key.substr(0, dot);
  const std::string field = key.substr(dot + 1);
  if (!j.contains(section)) throw ConfigError(key, "unknown section");
  auto& sec = j[section];
  const auto dot2 = field.find('.');
  if (dot2 == std::string::npos) {
    if (!sec.contains(field)) throw ConfigError(key, "unknown key");
    sec[field] = value;
  } else {
    const auto outer = field.substr(0, dot2);
    const auto inner = field.substr(dot2 + 1);
    if (!sec.contains(outer) || !sec[outer].is_object() || !sec[outer].contains(inner))
      throw ConfigError(key, "unknown key");
    sec[outer][inner] = value;
  }
  cfg = from_json(j);
}

}  // namespace kfr
