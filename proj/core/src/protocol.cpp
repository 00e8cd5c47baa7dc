#include "kfr/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "json.hpp"
#include "kfr/error.hpp"
#include "kfr/rng.hpp"

namespace kfr {

namespace {

using nlohmann::json;

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";
constexpr int kMaxDuration = 59 * 60 + 59;

std::pair<int, int> example_span(const PromptSpec& spec) {
  Rng rng(derive_seed(spec.seed, {0x70726f6d7074ULL}));
  std::uniform_int_distribution<int> start(0, spec.duration_s - 1);
  const int s = start(rng);
  std::uniform_int_distribution<int> len(0, std::min(3, spec.duration_s - s));
  return {s, s + len(rng)};
}

void validate_spec(const PromptSpec& spec) {
  require(spec.duration_s > 0 && spec.duration_s <= kMaxDuration, "prompt: duration out of range");
  require(spec.moment_hint >= 1, "prompt: moment hint must be positive");
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

KeyframeEntry entry_from_json(const json& j, int duration_s) {
  if (!j.is_object()) throw ParseError(ParseErrorKind::bad_json, "entry is not an object");
  for (const char* key : {"start_time", "end_time", "description"}) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      throw ParseError(ParseErrorKind::bad_json, std::string("missing string field ") + key);
    }
  }
  KeyframeEntry e;
  e.start_time = j["start_time"].get<std::string>();
  e.end_time = j["end_time"].get<std::string>();
  e.description = j["description"].get<std::string>();
  const int s = parse_timestamp(e.start_time);
  const int t = parse_timestamp(e.end_time);
  if (s > t) throw ParseError(ParseErrorKind::bad_timestamp, "start_time after end_time");
  if (t > duration_s) throw ParseError(ParseErrorKind::bad_timestamp, "end_time beyond the video");
  if (trim(e.description).empty()) throw ParseError(ParseErrorKind::empty_description, "description is blank");
  return e;
}

}  // namespace

std::string_view to_string(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::missing_answer: return "MissingAnswer";
    case ParseErrorKind::bad_json: return "BadJson";
    case ParseErrorKind::bad_timestamp: return "BadTimestamp";
    case ParseErrorKind::empty_description: return "EmptyDescription";
  }
  return "?";
}

std::string render_prompt(const PromptSpec& spec) {
  validate_spec(spec);
  const auto [s, e] = example_span(spec);
  std::string p;
  p += "You are given a " + std::to_string(spec.duration_s) + " seconds video and the instruction: \"" +
       spec.reference_instruction + "\". The instruction may depend on how things change over time.\n";
  p += "- Work out exactly which object(s) the instruction refers to.\n";
  p += "- Pick roughly " + std::to_string(spec.moment_hint) + " moments where the target is clearly visible.\n";
  p += "- For each moment, write a short description that identifies the object in that single frame.\n";
  p += "- Use only visible cues such as color, shape, size or position; leave out motion, timing and comparisons.\n";
  p += "- Spread the moments over the whole video. Do not pick adjacent or overlapping timestamps.\n";
  p += "- Put your reasoning in <think></think> and the result in <answer></answer> as JSON, for example:\n";
  p += "<think> reasoning about the video and the instruction </think>\n";
  p += "<answer>\n";
  p += "{\n\"start_time\": \"" + format_timestamp(s) + "\",\n\"end_time\": \"" + format_timestamp(e) +
       "\",\n\"description\": \"what the target looks like at this moment\"\n}\n";
  p += "</answer>\n";
  return p;
}

std::string render_audio_prompt(const PromptSpec& spec) {
  validate_spec(spec);
  std::string p;
  p += "You are given " + std::to_string(spec.duration_s) + " seconds of audio, an image and the instruction: \"" +
       spec.reference_instruction + "\". The instruction involves sound and timing.\n";
  p += "- Start by listing every sound source visible in the image, people and instruments alike.\n";
  p += "- Use the audio to decide which object the instruction refers to.\n";
  p += "- Describe that object so it can be found in the image without the audio, using visible cues only.\n";
  p += "- Put your reasoning in <think></think> and the result in <answer></answer>.\n";
  return p;
}

int parse_timestamp(std::string_view mmss) {
  const bool shape = mmss.size() == 5 && mmss[2] == ':' &&
                     std::isdigit(static_cast<unsigned char>(mmss[0])) &&
                     std::isdigit(static_cast<unsigned char>(mmss[1])) &&
                     std::isdigit(static_cast<unsigned char>(mmss[3])) &&
                     std::isdigit(static_cast<unsigned char>(mmss[4]));
  if (!shape) throw ParseError(ParseErrorKind::bad_timestamp, "timestamp is not MM:SS");
  const int mm = (mmss[0] - '0') * 10 + (mmss[1] - '0');
  const int ss = (mmss[3] - '0') * 10 + (mmss[4] - '0');
  if (mm > 59 || ss > 59) throw ParseError(ParseErrorKind::bad_timestamp, "timestamp field out of range");
  return mm * 60 + ss;
}

std::string format_timestamp(int seconds) {
  require(seconds >= 0 && seconds <= kMaxDuration, "format_timestamp: out of range");
  const int mm = seconds / 60;
  const int ss = seconds % 60;
  std::string out = "00:00";
  out[0] = static_cast<char>('0' + mm / 10);
  out[1] = static_cast<char>('0' + mm % 10);
  out[3] = static_cast<char>('0' + ss / 10);
  out[4] = static_cast<char>('0' + ss % 10);
  return out;
}

KeyframeAnswer parse_response(std::string_view text, int duration_s) {
  const auto open = text.rfind(kAnswerOpen);
  if (open == std::string_view::npos) throw ParseError(ParseErrorKind::missing_answer, "no <answer> tag");
  const auto body_begin = open + kAnswerOpen.size();
  const auto close = text.find(kAnswerClose, body_begin);
  if (close == std::string_view::npos) throw ParseError(ParseErrorKind::missing_answer, "unterminated <answer>");

  KeyframeAnswer answer;
  const auto head = text.substr(0, open);
  const auto think_open = head.rfind(kThinkOpen);
  if (think_open != std::string_view::npos) {
    const auto tb = think_open + kThinkOpen.size();
    const auto think_close = head.find(kThinkClose, tb);
    if (think_close != std::string_view::npos) answer.think = std::string(head.substr(tb, think_close - tb));
  }

  const auto payload = text.substr(body_begin, close - body_begin);
  const json doc = json::parse(payload.begin(), payload.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw ParseError(ParseErrorKind::bad_json, "answer is not valid JSON");
  if (doc.is_object()) {
    answer.entries.push_back(entry_from_json(doc, duration_s));
  } else if (doc.is_array()) {
    if (doc.empty()) throw ParseError(ParseErrorKind::bad_json, "answer list is empty");
    for (const auto& item : doc) answer.entries.push_back(entry_from_json(item, duration_s));
  } else {
    throw ParseError(ParseErrorKind::bad_json, "answer must be an object or a list");
  }
  return answer;
}

std::string serialize_answer(const KeyframeAnswer& answer) {
  json list = json::array();
  for (const auto& e : answer.entries) {
    list.push_back({{"start_time", e.start_time}, {"end_time", e.end_time}, {"description", e.description}});
  }
  std::string out;
  out += kThinkOpen;
  out += answer.think;
  out += kThinkClose;
  out += "\n";
  out += kAnswerOpen;
  out += "\n";
  out += list.dump(2);
  out += "\n";
  out += kAnswerClose;
  return out;
}

std::vector<int> answer_to_frames(const KeyframeAnswer& answer, int frames, int duration_s) {
  require(frames >= 1 && duration_s >= 1, "answer_to_frames: frames and duration must be positive");
  std::vector<int> out;
  out.reserve(answer.entries.size());
  for (const auto& e : answer.entries) {
    const double mid = 0.5 * (parse_timestamp(e.start_time) + parse_timestamp(e.end_time));
    const auto f = static_cast<int>(std::lround(mid * frames / duration_s));
    out.push_back(std::clamp(f, 0, frames - 1));
  }
  return out;
}

int frame_to_second(int frame, int frames, int duration_s) {
  require(frames >= 1 && frame >= 0 && frame < frames, "frame_to_second: frame out of range");
  return static_cast<int>(std::lround(static_cast<double>(frame) * duration_s / frames));
}

}  // namespace kfr
