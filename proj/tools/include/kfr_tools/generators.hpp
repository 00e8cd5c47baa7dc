#pragma once

#include <string>

#include "kfr/protocol.hpp"
#include "kfr/rng.hpp"

namespace kfr::gen {

/// Well-formed answer with 1-6 entries inside [0, duration_s].
KeyframeAnswer random_answer(Rng& rng, int duration_s);

/// Arbitrary bytes, tag fragments and mutated well-formed responses.
std::string fuzz_response(Rng& rng, int duration_s);

}  // namespace kfr::gen
