#pragma once

#include <span>

#include "transit_fuse/model.hpp"

namespace tfuse {

// One train leg enriched with the endpoints of its trip chain.
struct TrainLegContext {
    std::string device_day_id;
    std::string board_station;
    std::string alight_station;
    std::optional<std::string> route_id;
    Timestamp board_time = 0;
    Timestamp alight_time = 0;
    GridCell origin_cell;       // first cell of the whole chain
    GridCell destination_cell;  // last cell of the whole chain
    TravelMode access_mode = TravelMode::Unknown;
    TravelMode egress_mode = TravelMode::Unknown;
    int chain_index = 0;  // position of the train leg within its chain
};

// Groups legs by device_day_id, orders them by time, and splits whenever the
// gap between consecutive legs reaches dwell_gap_s. Overlapping legs within
// one device-day are an input error.
std::vector<TripChain> assemble_chains(std::span<const Leg> legs, int64_t dwell_gap_s = 1800);

struct ContextExtraction {
    std::vector<TrainLegContext> contexts;
    int64_t skipped_missing_station = 0;
    int64_t skipped_same_station = 0;
};

// For each train leg of each chain: origin = chain's first start cell,
// destination = chain's last end cell, access/egress = modes of the
// adjacent legs (Unknown at chain boundaries).
ContextExtraction extract_train_contexts(std::span<const TripChain> chains);

}  // namespace tfuse
