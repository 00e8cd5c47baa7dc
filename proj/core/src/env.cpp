#include "kfr/env.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "kfr/error.hpp"
#include "kfr/matching.hpp"

namespace kfr {

namespace {

constexpr int kMinSegmentLength = 3;
constexpr double kPresenceVisible = 0.8;
constexpr double kPresenceHidden = 0.2;

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

bool any_interval_contains(const std::vector<Interval>& v, int t) {
  return std::any_of(v.begin(), v.end(), [t](const Interval& i) { return i.contains(t); });
}

std::vector<Interval> sample_segments(int frames, int count, Rng& rng) {
  const int min_gap = std::max(3, frames / 10);
  for (int n = count; n >= 1; --n) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      std::set<int> cuts;
      while (static_cast<int>(cuts.size()) < 2 * n) cuts.insert(uniform_int(rng, 0, frames));
      std::vector<int> c(cuts.begin(), cuts.end());
      bool ok = true;
      std::vector<Interval> segs;
      for (int i = 0; i < n && ok; ++i) {
        Interval s{c[static_cast<std::size_t>(2 * i)], c[static_cast<std::size_t>(2 * i + 1)]};
        ok = s.length() >= kMinSegmentLength;
        if (ok && !segs.empty()) ok = s.begin - segs.back().end >= min_gap;
        segs.push_back(s);
      }
      if (ok) return segs;
    }
  }
  return {Interval{0, frames}};
}

std::vector<Interval> sample_sound(const std::vector<Interval>& visibility, Rng& rng) {
  std::vector<Interval> out;
  for (const auto& seg : visibility) {
    if (!bernoulli(rng, 0.5)) continue;
    const int a = uniform_int(rng, seg.begin, seg.end - 1);
    const int len = uniform_int(rng, 1, std::min(4, seg.end - a));
    out.push_back({a, a + len});
  }
  return out;
}

std::vector<BBox> sample_trajectory(int frames, int grid, int half_extent, Rng& rng) {
  const double lo = half_extent;
  const double hi = grid - half_extent;
  double cx = uniform_real(rng, lo, hi);
  double cy = uniform_real(rng, lo, hi);
  double vx = uniform_real(rng, -1.5, 1.5);
  double vy = uniform_real(rng, -1.5, 1.5);
  std::vector<BBox> out;
  out.reserve(static_cast<std::size_t>(frames));
  for (int t = 0; t < frames; ++t) {
    const double rx = std::clamp(std::round(cx), lo, hi);
    const double ry = std::clamp(std::round(cy), lo, hi);
    out.push_back({rx - half_extent, ry - half_extent, rx + half_extent, ry + half_extent});
    cx += vx;
    cy += vy;
    if (cx < lo || cx > hi) {
      vx = -vx;
      cx = std::clamp(cx, lo, hi);
    }
    if (cy < lo || cy > hi) {
      vy = -vy;
      cy = std::clamp(cy, lo, hi);
    }
  }
  return out;
}

int sample_query_type(const QueryMix& mix, Rng& rng) {
  const double total = mix.last_to_disappear + mix.last_to_sound + mix.attribute_match;
  const double u = uniform01(rng) * total;
  if (u < mix.last_to_disappear) return 0;
  if (u < mix.last_to_disappear + mix.last_to_sound) return 1;
  return 2;
}

std::optional<int> unique_argmax(const std::vector<SimObject>& objects, auto key) {
  int best = -1;
  int best_key = -1;
  int ties = 0;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const int k = key(objects[i]);
    if (k < 0) continue;
    if (k > best_key) {
      best_key = k;
      best = static_cast<int>(i);
      ties = 1;
    } else if (k == best_key) {
      ++ties;
    }
  }
  if (best < 0 || ties != 1) return std::nullopt;
  return best;
}

bool co_visible_somewhere(const std::vector<SimObject>& objects, int target, int frames) {
  const auto& tgt = objects[static_cast<std::size_t>(target)];
  for (int t = 0; t < frames; ++t) {
    if (!tgt.visible_at(t)) continue;
    for (std::size_t i = 0; i < objects.size(); ++i) {
      if (static_cast<int>(i) != target && objects[i].visible_at(t)) return true;
    }
  }
  return false;
}

void finish_episode(Episode& e) {
  const auto& tgt = e.target_object();
  e.gt_masks.clear();
  e.gt_boxes.clear();
  for (int t = 0; t < e.frames; ++t) {
    if (tgt.visible_at(t)) {
      auto m = render_object(tgt, t, e.grid, e.vocabulary);
      e.gt_boxes.emplace_back(mask_bounds(m));
      e.gt_masks.push_back(std::move(m));
    } else {
      e.gt_boxes.emplace_back(std::nullopt);
      e.gt_masks.emplace_back(e.grid, e.grid);
    }
  }
  e.observations = compute_observations(e);
}

std::string lower_word(std::string_view w) {
  std::string s(w);
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

}  // namespace

std::vector<Interval> runs_of(const std::vector<bool>& flags) {
  std::vector<Interval> out;
  const int n = static_cast<int>(flags.size());
  for (int t = 0; t < n;) {
    if (!flags[static_cast<std::size_t>(t)]) {
      ++t;
      continue;
    }
    int e = t;
    while (e < n && flags[static_cast<std::size_t>(e)]) ++e;
    out.push_back({t, e});
    t = e;
  }
  return out;
}

std::string_view to_string(QueryType q) {
  switch (q) {
    case QueryType::last_to_disappear: return "LAST_TO_DISAPPEAR";
    case QueryType::last_to_sound: return "LAST_TO_SOUND";
    case QueryType::attribute_match: return "ATTRIBUTE_MATCH";
  }
  return "?";
}

std::optional<QueryType> query_type_from_string(std::string_view s) {
  for (auto q : {QueryType::last_to_disappear, QueryType::last_to_sound, QueryType::attribute_match}) {
    if (to_string(q) == s) return q;
  }
  return std::nullopt;
}

bool SimObject::visible_at(int t) const { return any_interval_contains(visibility, t); }
bool SimObject::sounding_at(int t) const { return any_interval_contains(sound, t); }

int SimObject::position_band(int t, int grid) const {
  const auto& b = trajectory[static_cast<std::size_t>(t)];
  const double center = 0.5 * (b.x1 + b.x2);
  return std::clamp(static_cast<int>(center * 3.0 / grid), 0, 2);
}

std::vector<std::int64_t> Episode::gt_areas() const {
  std::vector<std::int64_t> a;
  a.reserve(gt_masks.size());
  for (const auto& m : gt_masks) a.push_back(mask_area(m));
  return a;
}

void EnvConfig::validate() const {
  auto fail = [](const char* key, const char* msg) { throw ConfigError(std::string("env.") + key, msg); };
  if (t_min < 8 || t_max > 64 || t_min > t_max) fail("t_min", "frame range must lie within [8, 64]");
  if (grid < 32 || grid > 256) fail("grid", "grid must lie within [32, 256]");
  if (objects_min < 1 || objects_max > 6 || objects_min > objects_max)
    fail("objects_min", "object count range must lie within [1, 6]");
  if (!(occlusion_prob >= 0.0 && occlusion_prob <= 1.0)) fail("occlusion_prob", "must lie in [0, 1]");
  if (min_target_segments < 1 || min_target_segments > 3)
    fail("min_target_segments", "must lie within [1, 3]");
  const auto& m = query_mix;
  if (!(m.last_to_disappear >= 0 && m.last_to_sound >= 0 && m.attribute_match >= 0) ||
      m.last_to_disappear + m.last_to_sound + m.attribute_match <= 0.0)
    fail("query_mix", "weights must be non-negative with a positive sum");
  if (objects_max == 1 && (m.last_to_disappear > 0 || m.last_to_sound > 0))
    fail("query_mix", "temporal queries need at least two objects");
  if (vocabulary.colors.empty()) fail("colors", "vocabulary needs at least one color");
  if (vocabulary.shapes.empty()) fail("shapes", "vocabulary needs at least one shape");
  std::set<std::string> words;
  for (const auto* list : {&vocabulary.colors, &vocabulary.shapes, &vocabulary.sizes, &vocabulary.positions}) {
    for (const auto& w : *list) {
      if (w.empty() || lower_word(w) != w ||
          !std::all_of(w.begin(), w.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); }))
        fail("colors", "vocabulary words must be lowercase alphanumeric");
      if (!words.insert(w).second) fail("colors", "vocabulary words must be unique");
    }
  }
  for (const auto& s : vocabulary.shapes) {
    if (s != "circle" && s != "square" && s != "triangle") fail("shapes", "shapes must be circle, square or triangle");
  }
  if (vocabulary.sizes.size() != 2) fail("sizes", "exactly two size bands are rendered");
  if (vocabulary.positions.size() != 3) fail("positions", "exactly three position bands are rendered");
  if (!(presence_noise >= 0.0) || !std::isfinite(presence_noise)) fail("presence_noise", "must be non-negative");
  if (!(jitter_px >= 0.0) || !std::isfinite(jitter_px)) fail("jitter_px", "must be non-negative");
  if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma", "must lie in (0, 1]");
  if (train_frames_min < 1 || train_frames_min > train_frames_max)
    fail("train_frames_min", "training clip range must be non-empty and positive");
  if (eval_frames < 1) fail("eval_frames", "must be at least 1");
  if (max_retries < 1) fail("max_retries", "must be at least 1");
}

std::optional<int> resolve_query(const Query& q, const std::vector<SimObject>& objects) {
  switch (q.type) {
    case QueryType::last_to_disappear:
      return unique_argmax(objects, [](const SimObject& o) { return o.last_visible_end(); });
    case QueryType::last_to_sound:
      return unique_argmax(objects, [](const SimObject& o) { return o.last_sound_end(); });
    case QueryType::attribute_match: {
      std::optional<int> found;
      for (std::size_t i = 0; i < objects.size(); ++i) {
        const auto& a = objects[i].attributes;
        if (a.color != q.color || a.shape != q.shape) continue;
        if (found) return std::nullopt;
        found = static_cast<int>(i);
      }
      return found;
    }
  }
  return std::nullopt;
}

BinaryMask render_object(const SimObject& o, int t, int grid, const Vocabulary& v) {
  const auto& b = o.trajectory[static_cast<std::size_t>(t)];
  const auto& shape = v.shapes[static_cast<std::size_t>(o.attributes.shape)];
  BinaryMask m(grid, grid);
  const int x0 = std::max(0, static_cast<int>(b.x1));
  const int y0 = std::max(0, static_cast<int>(b.y1));
  const int x1 = std::min(grid, static_cast<int>(b.x2));
  const int y1 = std::min(grid, static_cast<int>(b.y2));
  const double cx = 0.5 * (b.x1 + b.x2);
  const double cy = 0.5 * (b.y1 + b.y2);
  const double rx = 0.5 * b.width();
  const double ry = 0.5 * b.height();
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const double px = x + 0.5;
      const double py = y + 0.5;
      bool inside = true;
      if (shape == "circle") {
        const double nx = (px - cx) / rx;
        const double ny = (py - cy) / ry;
        inside = nx * nx + ny * ny <= 1.0;
      } else if (shape == "triangle") {
        const double frac = (py - b.y1) / b.height();  // apex at the top
        inside = std::abs(px - cx) <= frac * rx + 0.5;
      }
      if (inside) m.set(x, y);
    }
  }
  return m;
}

std::vector<FrameObservation> compute_observations(const Episode& e) {
  const auto& tgt = e.target_object();
  const int post_gap_window = std::max(1, (e.frames + 19) / 20);
  const double others = std::max<std::size_t>(1, e.objects.size() - 1);
  std::vector<FrameObservation> obs(static_cast<std::size_t>(e.frames));
  for (int t = 0; t < e.frames; ++t) {
    auto& o = obs[static_cast<std::size_t>(t)];
    const bool vis = tgt.visible_at(t);
    o.presence_score = std::clamp((vis ? kPresenceVisible : kPresenceHidden) +
                                      e.presence_noise[static_cast<std::size_t>(t)],
                                  0.0, 1.0);
    o.time_position = static_cast<double>(t) / e.frames;
    o.sound_active = tgt.sounding_at(t) ? 1.0 : 0.0;
    for (const auto& seg : tgt.visibility) {
      if (seg.begin > 0 && t >= seg.begin && t < seg.begin + post_gap_window) o.post_gap = 1.0;
    }
    int crowd = 0;
    for (std::size_t i = 0; i < e.objects.size(); ++i) {
      if (static_cast<int>(i) != e.target && e.objects[i].visible_at(t)) ++crowd;
    }
    o.crowding = crowd / others;
  }
  return obs;
}

Episode generate_episode(const EnvConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto& vocab = cfg.vocabulary;
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    Rng rng = make_rng(seed, Stream::env, {static_cast<std::uint64_t>(attempt)});
    Episode e;
    e.seed = seed;
    e.grid = cfg.grid;
    e.vocabulary = vocab;
    e.frames = uniform_int(rng, cfg.t_min, cfg.t_max);
    e.duration_s = e.frames;
    const int n = uniform_int(rng, cfg.objects_min, cfg.objects_max);
    const int qtype = sample_query_type(cfg.query_mix, rng);

    const ObjectAttributes proto{
        uniform_int(rng, 0, static_cast<int>(vocab.colors.size()) - 1),
        uniform_int(rng, 0, static_cast<int>(vocab.shapes.size()) - 1),
        uniform_int(rng, 0, 1)};
    for (int i = 0; i < n; ++i) {
      SimObject o;
      o.id = i;
      o.attributes.color = bernoulli(rng, 0.5) ? proto.color
                                               : uniform_int(rng, 0, static_cast<int>(vocab.colors.size()) - 1);
      o.attributes.shape = bernoulli(rng, 0.5) ? proto.shape
                                               : uniform_int(rng, 0, static_cast<int>(vocab.shapes.size()) - 1);
      o.attributes.size = bernoulli(rng, 0.5) ? proto.size : uniform_int(rng, 0, 1);
      const int half = o.attributes.size == 0 ? uniform_int(rng, 4, 6) : uniform_int(rng, 7, 10);
      o.trajectory = sample_trajectory(e.frames, e.grid, half, rng);
      int segments = 1;
      for (int k = 0; k < 2; ++k) segments += bernoulli(rng, cfg.occlusion_prob) ? 1 : 0;
      o.visibility = sample_segments(e.frames, segments, rng);
      o.sound = sample_sound(o.visibility, rng);
      e.objects.push_back(std::move(o));
    }

    e.query.type = static_cast<QueryType>(qtype);
    if (e.query.type == QueryType::attribute_match) {
      const auto& pick = e.objects[static_cast<std::size_t>(uniform_int(rng, 0, n - 1))].attributes;
      e.query.color = pick.color;
      e.query.shape = pick.shape;
    } else if (n < 2) {
      continue;
    }
    const auto target = resolve_query(e.query, e.objects);
    if (!target) continue;
    e.target = *target;
    if (static_cast<int>(e.target_object().visibility.size()) < cfg.min_target_segments) continue;
    if (is_temporal(e.query.type) && !co_visible_somewhere(e.objects, e.target, e.frames)) continue;

    std::normal_distribution<double> noise(0.0, 1.0);
    e.presence_noise.resize(static_cast<std::size_t>(e.frames));
    for (auto& v : e.presence_noise) v = cfg.presence_noise * noise(rng);
    e.source_frames.resize(static_cast<std::size_t>(e.frames));
    for (int t = 0; t < e.frames; ++t) e.source_frames[static_cast<std::size_t>(t)] = t;
    finish_episode(e);
    return e;
  }
  throw GenerationError(seed, "no solvable episode within the retry budget");
}

Episode resample(const Episode& e, int n) {
  require(n >= 1, "resample: clip length must be positive");
  const int count = std::min(n, e.frames);
  std::vector<int> idx(static_cast<std::size_t>(count), 0);
  for (int i = 0; i < count && count > 1; ++i) {
    idx[static_cast<std::size_t>(i)] = (2 * i * (e.frames - 1) + (count - 1)) / (2 * (count - 1));
  }
  Episode c;
  c.seed = e.seed;
  c.frames = count;
  c.grid = e.grid;
  c.duration_s = e.duration_s;
  c.vocabulary = e.vocabulary;
  c.target = e.target;
  c.query = e.query;
  for (const auto& o : e.objects) {
    SimObject r;
    r.id = o.id;
    r.attributes = o.attributes;
    std::vector<bool> vis, snd;
    for (int t : idx) {
      r.trajectory.push_back(o.trajectory[static_cast<std::size_t>(t)]);
      vis.push_back(o.visible_at(t));
      snd.push_back(o.sounding_at(t));
    }
    r.visibility = runs_of(vis);
    r.sound = runs_of(snd);
    c.objects.push_back(std::move(r));
  }
  for (int t : idx) {
    c.gt_masks.push_back(e.gt_masks[static_cast<std::size_t>(t)]);
    c.gt_boxes.push_back(e.gt_boxes[static_cast<std::size_t>(t)]);
    c.presence_noise.push_back(e.presence_noise[static_cast<std::size_t>(t)]);
    c.source_frames.push_back(e.source_frames[static_cast<std::size_t>(t)]);
  }
  c.observations = compute_observations(c);
  return c;
}

int train_clip_length(const EnvConfig& cfg, Rng& rng) {
  return uniform_int(rng, cfg.train_frames_min, cfg.train_frames_max);
}

std::vector<int> matching_objects(const Episode& e, int frame, const LocalInstruction& ins) {
  require(frame >= 0 && frame < e.frames, "mock_ground: frame out of range");
  const auto& tgt = e.target_object();
  const int tgt_band = tgt.position_band(frame, e.grid);
  std::vector<int> out;
  for (std::size_t i = 0; i < e.objects.size(); ++i) {
    const auto& o = e.objects[i];
    if (!o.visible_at(frame)) continue;
    if (ins.has(AttributeKind::color) && o.attributes.color != tgt.attributes.color) continue;
    if (ins.has(AttributeKind::shape) && o.attributes.shape != tgt.attributes.shape) continue;
    if (ins.has(AttributeKind::size) && o.attributes.size != tgt.attributes.size) continue;
    if (ins.has(AttributeKind::position) && o.position_band(frame, e.grid) != tgt_band) continue;
    out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<BBox> mock_ground(const Episode& e, int frame, const LocalInstruction& ins,
                              double jitter_px, Rng& rng) {
  const auto matches = matching_objects(e, frame, ins);
  std::vector<BBox> out;
  if (matches.empty()) return out;
  const double specificity = 1.0 / static_cast<double>(matches.size());
  const double mag = jitter_px * (1.0 - specificity);
  const double g = e.grid;
  for (int i : matches) {
    BBox b = mask_bounds(render_object(e.objects[static_cast<std::size_t>(i)], frame, e.grid, e.vocabulary));
    if (mag > 0.0) {
      b.x1 += uniform_real(rng, -mag, mag);
      b.y1 += uniform_real(rng, -mag, mag);
      b.x2 += uniform_real(rng, -mag, mag);
      b.y2 += uniform_real(rng, -mag, mag);
      b.x1 = std::clamp(b.x1, 0.0, g - 1.0);
      b.y1 = std::clamp(b.y1, 0.0, g - 1.0);
      b.x2 = std::clamp(b.x2, b.x1 + 1.0, g);
      b.y2 = std::clamp(b.y2, b.y1 + 1.0, g);
    }
    out.push_back(b);
  }
  return out;
}

PropagationResult propagate(const Episode& e, const std::vector<DetectionTuple>& anchors,
                            double gamma) {
  require(gamma > 0.0 && gamma <= 1.0, "propagate: gamma must lie in (0, 1]");
  PropagationResult r;
  for (int t = 0; t < e.frames; ++t) r.masks.emplace_back(e.grid, e.grid);

  struct Anchor {
    int frame;
    double quality;
    int track;
  };
  std::vector<Anchor> live;
  const auto& tgt = e.target_object();
  for (const auto& a : anchors) {
    require(a.frame_idx >= 0 && a.frame_idx < e.frames, "propagate: anchor frame out of range");
    if (!tgt.visible_at(a.frame_idx) || !a.bbox.valid()) {
      r.ignored.push_back(a);
      continue;
    }
    const int track = static_cast<int>(r.tracks.size());
    require(r.object_ids.emplace(a, track).second, "propagate: duplicate detection tuple");
    r.tracks.push_back(a);
    r.track_frames.emplace_back();
    live.push_back({a.frame_idx, box_iou(a.bbox, *e.gt_boxes[static_cast<std::size_t>(a.frame_idx)]), track});
  }

  for (const auto& seg : tgt.visibility) {
    std::vector<const Anchor*> in_seg;
    for (const auto& a : live) {
      if (seg.contains(a.frame)) in_seg.push_back(&a);
    }
    if (in_seg.empty()) continue;
    for (int t = seg.begin; t < seg.end; ++t) {
      int best = e.frames;
      for (const auto* a : in_seg) best = std::min(best, std::abs(t - a->frame));
      double q = 0.0;
      int n = 0;
      for (const auto* a : in_seg) {
        if (std::abs(t - a->frame) != best) continue;
        q += a->quality;
        ++n;
        r.track_frames[static_cast<std::size_t>(a->track)].push_back(t);
      }
      const double ratio = (q / n) * std::pow(gamma, best);
      r.masks[static_cast<std::size_t>(t)] = erode_to_ratio(e.gt_masks[static_cast<std::size_t>(t)], ratio);
    }
  }
  return r;
}

RolloutResult rollout_pipeline(const Episode& e, const std::vector<int>& frames,
                               const std::vector<LocalInstruction>& instructions,
                               int roll_out_idx, const PipelineConfig& cfg, Rng& rng) {
  require(!frames.empty(), "rollout_pipeline: no keyframes");
  require(frames.size() == instructions.size(), "rollout_pipeline: one instruction per keyframe");
  RolloutResult out;
  std::vector<std::vector<BBox>> gt_per_keyframe;
  std::map<int, int> per_frame_count;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const int f = frames[k];
    require(f >= 0 && f < e.frames, "rollout_pipeline: keyframe out of range");
    auto boxes = mock_ground(e, f, instructions[k], cfg.jitter_px, rng);
    int& next = per_frame_count[f];
    for (const auto& b : boxes) out.detections.push_back({roll_out_idx, f, next++, b});
    out.boxes_per_keyframe.push_back(std::move(boxes));
    const auto& gt = e.gt_boxes[static_cast<std::size_t>(f)];
    gt_per_keyframe.push_back(gt ? std::vector<BBox>{*gt} : std::vector<BBox>{});
  }
  out.propagation = propagate(e, out.detections, cfg.gamma);
  const auto areas = e.gt_areas();
  const auto keyframe = keyframe_quality_reward(frames, areas, cfg.weights);
  const double r_a = alignment_reward(out.boxes_per_keyframe, gt_per_keyframe);
  const double r_g = global_consistency_reward(out.propagation.masks, e.gt_masks);
  out.reward = total_reward(keyframe, r_a, r_g, cfg.weights);
  return out;
}

std::string describe_instruction(const Episode& e, int frame, const LocalInstruction& ins) {
  require(frame >= 0 && frame < e.frames, "describe_instruction: frame out of range");
  const auto& tgt = e.target_object();
  const auto& v = e.vocabulary;
  std::vector<std::string> words;
  if (ins.has(AttributeKind::color)) words.push_back(v.colors[static_cast<std::size_t>(tgt.attributes.color)]);
  if (ins.has(AttributeKind::size)) words.push_back(v.sizes[static_cast<std::size_t>(tgt.attributes.size)]);
  if (ins.has(AttributeKind::shape)) words.push_back(v.shapes[static_cast<std::size_t>(tgt.attributes.shape)]);
  if (ins.has(AttributeKind::position)) {
    words.push_back("on the");
    words.push_back(v.positions[static_cast<std::size_t>(tgt.position_band(frame, e.grid))]);
  }
  if (!ins.has(AttributeKind::shape)) words.push_back("object");
  std::string s = "the";
  for (const auto& w : words) s += " " + w;
  return s;
}

std::optional<LocalInstruction> instruction_from_description(const Vocabulary& v,
                                                             std::string_view text) {
  std::uint8_t kinds = 0;
  auto mark = [&](const std::vector<std::string>& list, AttributeKind k, const std::string& w) {
    if (std::find(list.begin(), list.end(), w) != list.end()) kinds |= static_cast<std::uint8_t>(1U << static_cast<int>(k));
  };
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    const auto w = lower_word(word);
    mark(v.colors, AttributeKind::color, w);
    mark(v.shapes, AttributeKind::shape, w);
    mark(v.sizes, AttributeKind::size, w);
    mark(v.positions, AttributeKind::position, w);
    word.clear();
  };
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      word.push_back(ch);
    } else {
      flush();
    }
  }
  flush();
  if (kinds == 0) return std::nullopt;
  return LocalInstruction{kinds};
}

}  // namespace kfr
