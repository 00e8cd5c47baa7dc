#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "kfr/geometry.hpp"
#include "kfr/policy.hpp"
#include "kfr/rewards.hpp"
#include "kfr/rng.hpp"

namespace kfr {

/// Half-open frame interval [begin, end).
struct Interval {
  int begin = 0;
  int end = 0;

  int length() const { return end - begin; }
  bool contains(int t) const { return t >= begin && t < end; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Maximal runs of `true` in a per-frame flag vector.
std::vector<Interval> runs_of(const std::vector<bool>& flags);

enum class QueryType { last_to_disappear, last_to_sound, attribute_match };

std::string_view to_string(QueryType q);
std::optional<QueryType> query_type_from_string(std::string_view s);
inline bool is_temporal(QueryType q) { return q != QueryType::attribute_match; }

struct Vocabulary {
  std::vector<std::string> colors{"red", "green", "blue", "yellow", "purple"};
  std::vector<std::string> shapes{"circle", "square", "triangle"};
  std::vector<std::string> sizes{"small", "large"};
  std::vector<std::string> positions{"left", "center", "right"};

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

struct ObjectAttributes {
  int color = 0;
  int shape = 0;
  int size = 0;

  friend bool operator==(const ObjectAttributes&, const ObjectAttributes&) = default;
};

struct SimObject {
  int id = 0;
  ObjectAttributes attributes;
  std::vector<BBox> trajectory;  // per-frame extent, defined on every frame
  std::vector<Interval> visibility;
  std::vector<Interval> sound;

  bool visible_at(int t) const;
  bool sounding_at(int t) const;
  /// Index into Vocabulary::positions for the frame's center column.
  int position_band(int t, int grid) const;
  int last_visible_end() const { return visibility.empty() ? -1 : visibility.back().end; }
  int last_sound_end() const { return sound.empty() ? -1 : sound.back().end; }
};

struct Query {
  QueryType type = QueryType::attribute_match;
  int color = -1;  // attribute_match only
  int shape = -1;
};

struct Episode {
  std::uint64_t seed = 0;
  int frames = 0;
  int grid = 64;
  int duration_s = 0;  // source video length; at least `frames`
  Vocabulary vocabulary;
  std::vector<SimObject> objects;
  int target = 0;  // index into objects
  Query query;
  MaskSequence gt_masks;                   // target only, empty where invisible
  std::vector<std::optional<BBox>> gt_boxes;
  std::vector<double> presence_noise;
  std::vector<FrameObservation> observations;
  std::vector<int> source_frames;  // frame index in the generated episode

  const SimObject& target_object() const { return objects[static_cast<std::size_t>(target)]; }
  std::vector<std::int64_t> gt_areas() const;
};

struct QueryMix {
  double last_to_disappear = 0.4;
  double last_to_sound = 0.3;
  double attribute_match = 0.3;
};

struct EnvConfig {
  int t_min = 24;
  int t_max = 48;
  int grid = 64;
  int objects_min = 2;
  int objects_max = 5;
  double occlusion_prob = 0.5;
  int min_target_segments = 2;
  QueryMix query_mix;
  Vocabulary vocabulary;
  double presence_noise = 0.15;
  double jitter_px = 3.0;
  double gamma = 0.97;
  int train_frames_min = 8;
  int train_frames_max = 24;
  int eval_frames = 24;
  int max_retries = 2000;

  void validate() const;
};

/// Raised when no solvable episode turned up within max_retries.
class GenerationError : public std::runtime_error {
 public:
  GenerationError(std::uint64_t seed, const std::string& what)
      : std::runtime_error(what + " (seed " + std::to_string(seed) + ")"), seed_(seed) {}
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

/// The unique object satisfying the query, or nullopt when none or several do.
std::optional<int> resolve_query(const Query& q, const std::vector<SimObject>& objects);

/// Renders an object's shape inside its frame extent.
BinaryMask render_object(const SimObject& o, int t, int grid, const Vocabulary& v);

/// Recomputes observations from visibility, sound and stored noise.
std::vector<FrameObservation> compute_observations(const Episode& e);

Episode generate_episode(const EnvConfig& cfg, std::uint64_t seed);

/// Evenly spaced sub-clip of `n` frames (all frames if n >= frames).
Episode resample(const Episode& e, int n);

/// Frame count for a training clip, uniform in [train_frames_min, train_frames_max].
int train_clip_length(const EnvConfig& cfg, Rng& rng);

// -- mock System 2 ----------------------------------------------------------

/// Visible objects at `frame` that share the target's value on every kind the
/// instruction names.
std::vector<int> matching_objects(const Episode& e, int frame, const LocalInstruction& ins);

/// GT boxes of the matching objects, jittered by jitter_px * (1 - 1/|matches|).
std::vector<BBox> mock_ground(const Episode& e, int frame, const LocalInstruction& ins,
                              double jitter_px, Rng& rng);

struct DetectionTuple {
  int roll_out_idx = 0;
  int frame_idx = 0;
  int pred_obj_idx = 0;
  BBox bbox;

  auto key() const { return std::tuple(roll_out_idx, frame_idx, pred_obj_idx); }
  friend bool operator<(const DetectionTuple& a, const DetectionTuple& b) { return a.key() < b.key(); }
  friend bool operator==(const DetectionTuple&, const DetectionTuple&) = default;
};

struct PropagationResult {
  MaskSequence masks;
  std::map<DetectionTuple, int> object_ids;  // tuple -> assigned track id
  std::vector<DetectionTuple> tracks;        // track id -> tuple
  std::vector<std::vector<int>> track_frames;  // frames each track drove
  std::vector<DetectionTuple> ignored;       // anchors on target-absent frames
};

/// Mock mask propagation. Within each visibility segment of the target that
/// holds an anchor, frame t gets the GT mask eroded to IoU q * gamma^d, where d
/// is the distance to the nearest anchor(s) and q their mean box IoU against
/// the target box. Segments without anchors and invisible frames stay empty.
PropagationResult propagate(const Episode& e, const std::vector<DetectionTuple>& anchors,
                            double gamma);

struct PipelineConfig {
  RewardWeights weights;
  double jitter_px = 3.0;
  double gamma = 0.97;
};

struct RolloutResult {
  std::vector<DetectionTuple> detections;
  std::vector<std::vector<BBox>> boxes_per_keyframe;
  PropagationResult propagation;
  RewardBreakdown reward;
};

/// Ground -> tag -> propagate -> score. `frames` may hold duplicates.
RolloutResult rollout_pipeline(const Episode& e, const std::vector<int>& frames,
                               const std::vector<LocalInstruction>& instructions,
                               int roll_out_idx, const PipelineConfig& cfg, Rng& rng);

inline RolloutResult rollout_pipeline(const Episode& e, const KeyframeAction& a, int roll_out_idx,
                                      const PipelineConfig& cfg, Rng& rng) {
  return rollout_pipeline(e, a.selected, a.instructions, roll_out_idx, cfg, rng);
}

/// Words naming the target's value for each kind in the instruction.
std::string describe_instruction(const Episode& e, int frame, const LocalInstruction& ins);

/// Kinds mentioned by vocabulary words in free text; nullopt if none.
std::optional<LocalInstruction> instruction_from_description(const Vocabulary& v,
                                                             std::string_view text);

}  // namespace kfr
