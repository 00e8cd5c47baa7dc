#include "kfr_tools/generators.hpp"

#include <array>
#include <string_view>

namespace kfr::gen {

namespace {

int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

constexpr std::array<std::string_view, 12> kWords = {
    "the", "red", "small", "circle", "on", "left", "object", "\"quoted\"", "line\nbreak", "tab\there", "ünï", "\\"};

constexpr std::array<std::string_view, 14> kFragments = {
    "<answer>", "</answer>", "<think>", "</think>", "{", "}", "[", "]", "\"start_time\":", "\"00:0",
    ":", ",", "\"description\": \"x\"", "null"};

}  // namespace

KeyframeAnswer random_answer(Rng& rng, int duration_s) {
  KeyframeAnswer a;
  const int n_think = pick(rng, 0, 6);
  for (int i = 0; i < n_think; ++i) a.think += std::string(kWords[pick(rng, 0, 5)]) + " ";
  const int n = pick(rng, 1, 6);
  for (int i = 0; i < n; ++i) {
    const int s = pick(rng, 0, duration_s);
    const int e = pick(rng, s, duration_s);
    std::string d = "the";
    const int words = pick(rng, 1, 4);
    for (int w = 0; w < words; ++w) d += " " + std::string(kWords[static_cast<std::size_t>(pick(rng, 1, int(kWords.size()) - 1))]);
    a.entries.push_back({format_timestamp(s), format_timestamp(e), d});
  }
  return a;
}

std::string fuzz_response(Rng& rng, int duration_s) {
  switch (pick(rng, 0, 3)) {
    case 0: {  // raw bytes
      std::string s(static_cast<std::size_t>(pick(rng, 0, 200)), '\0');
      for (auto& c : s) c = static_cast<char>(pick(rng, 0, 255));
      return s;
    }
    case 1: {  // tag and JSON fragments
      std::string s;
      const int n = pick(rng, 0, 40);
      for (int i = 0; i < n; ++i) s += kFragments[static_cast<std::size_t>(pick(rng, 0, int(kFragments.size()) - 1))];
      return s;
    }
    default: {  // a valid response with a few bytes flipped, dropped or duplicated
      std::string s = serialize_answer(random_answer(rng, duration_s));
      const int edits = pick(rng, 1, 4);
      for (int i = 0; i < edits && !s.empty(); ++i) {
        const auto at = static_cast<std::size_t>(pick(rng, 0, int(s.size()) - 1));
        switch (pick(rng, 0, 2)) {
          case 0: s[at] = static_cast<char>(pick(rng, 0, 255)); break;
          case 1: s.erase(at, static_cast<std::size_t>(pick(rng, 1, 8))); break;
          default: s.insert(at, s.substr(at, static_cast<std::size_t>(pick(rng, 1, 8)))); break;
        }
      }
      return s;
    }
  }
}

}  // namespace kfr::gen
