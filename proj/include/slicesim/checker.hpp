#pragma once

#include <string>
#include <vector>

#include "slicesim/channel.hpp"
#include "slicesim/model.hpp"

namespace slicesim {

// Independent post-hoc verification of an emitted decision against the
// constraint set of the per-slot program: the vehicle partition and link
// indicators (1), the cumulative quality prefix (3), the per-leader backhaul
// budget (6), pool exclusivity (8) and per-transmitter RB uniqueness (9).
// Rates behind (6) are recomputed from the snapshot rather than trusted
// from the decision. Returns one message per violation.
std::vector<std::string> check_decision(const SlotDecision& decision,
                                        const SlicePartition& partition,
                                        const ChannelSnapshot& snap,
                                        const VideoCatalog& catalog);

}  // namespace slicesim
