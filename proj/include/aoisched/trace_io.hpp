#pragma once

#include <iosfwd>
#include <string>

#include "aoisched/engine.hpp"

namespace aoisched {

/// Header of the per-(slot, sensor) trace CSV. Column order is fixed.
inline constexpr const char* kTraceCsvHeader =
    "slot,sensor,mode,age,attempt,latency_attempt,latency_total,utility,laxity,served,dropped,graced";

void write_trace_csv(std::ostream& out, const Trace& trace);
std::string trace_csv(const Trace& trace);

/**
 * Rebuilds a trace from its CSV. M and T come from the data, every other
 * parameter from `base`. The CSV does not carry the channel state; it is
 * reconstructed as ON exactly on slots with a service. Regenerations and
 * activations are recovered from mode transitions between consecutive slots.
 *
 * Throws std::runtime_error on malformed input.
 */
Trace trace_from_csv(std::istream& in, const EngineConfig& base);

}  // namespace aoisched
