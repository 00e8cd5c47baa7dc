#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kfr {

/// One selected moment of a keyframe response.
struct KeyframeEntry {
  std::string start_time;  // "MM:SS"
  std::string end_time;
  std::string description;

  friend bool operator==(const KeyframeEntry&, const KeyframeEntry&) = default;
};

struct KeyframeAnswer {
  std::vector<KeyframeEntry> entries;
  std::string think;

  friend bool operator==(const KeyframeAnswer&, const KeyframeAnswer&) = default;
};

enum class ParseErrorKind { missing_answer, bad_json, bad_timestamp, empty_description };

std::string_view to_string(ParseErrorKind k);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}
  ParseErrorKind kind() const noexcept { return kind_; }

 private:
  ParseErrorKind kind_;
};

struct PromptSpec {
  int duration_s = 0;
  std::string reference_instruction;
  int moment_hint = 4;
  std::uint64_t seed = 0;  // drives the example timestamps
};

/// Keyframe selection prompt.
std::string render_prompt(const PromptSpec& spec);

/// Audio variant; asks for a single grounding description.
std::string render_audio_prompt(const PromptSpec& spec);

/// Seconds encoded by a zero-padded "MM:SS" string.
int parse_timestamp(std::string_view mmss);
std::string format_timestamp(int seconds);

/// Parses the last <answer> block. Throws ParseError on any defect; never
/// throws anything else.
KeyframeAnswer parse_response(std::string_view text, int duration_s);

/// Inverse of parse_response for well-formed answers.
std::string serialize_answer(const KeyframeAnswer& answer);

/// Midpoint of each span on the frame grid; duplicates are preserved.
std::vector<int> answer_to_frames(const KeyframeAnswer& answer, int frames, int duration_s);

/// Span start second that maps back to `frame` under answer_to_frames.
int frame_to_second(int frame, int frames, int duration_s);

}  // namespace kfr
