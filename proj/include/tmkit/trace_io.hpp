#pragma once

#include "tmkit/engine.hpp"

#include <string>

namespace tmkit {

/// Stable line format: tick<TAB>stage<TAB>thing<TAB>event<TAB>var=value,...
/// A missing event is written as "-". Lines starting with '#' are comments.
std::string trace_to_tsv(const Trace& trace, bool header = true);

/// One JSON object per entry.
std::string trace_to_jsonl(const Trace& trace);

/// tick<TAB>var... table of per-tick state variables.
std::string ticks_to_tsv(const Trace& trace);

}  // namespace tmkit
