#include "transit_fuse/chains.hpp"

#include <algorithm>
#include <map>

#include "transit_fuse/error.hpp"

namespace tfuse {

std::vector<TripChain> assemble_chains(std::span<const Leg> legs, int64_t dwell_gap_s) {
    if (dwell_gap_s <= 0) throw InputError("dwell_gap must be positive");

    std::map<std::string, std::vector<Leg>> by_device;
    for (const Leg& l : legs) {
        if (l.start_time > l.end_time) {
            throw InputError("leg ends before it starts for device_day " + l.device_day_id);
        }
        by_device[l.device_day_id].push_back(l);
    }

    std::vector<TripChain> chains;
    for (auto& [id, device_legs] : by_device) {
        std::stable_sort(device_legs.begin(), device_legs.end(),
                         [](const Leg& a, const Leg& b) { return a.start_time < b.start_time; });
        TripChain current{id, {}};
        for (Leg& l : device_legs) {
            if (!current.legs.empty()) {
                int64_t const gap = l.start_time - current.legs.back().end_time;
                if (gap < 0) throw InputError("overlapping legs for device_day " + id);
                if (gap >= dwell_gap_s) {
                    chains.push_back(std::move(current));
                    current = TripChain{id, {}};
                }
            }
            current.legs.push_back(std::move(l));
        }
        if (!current.legs.empty()) chains.push_back(std::move(current));
    }
    return chains;
}

ContextExtraction extract_train_contexts(std::span<const TripChain> chains) {
    ContextExtraction out;
    for (const TripChain& chain : chains) {
        if (chain.legs.empty()) continue;
        for (size_t i = 0; i < chain.legs.size(); ++i) {
            const Leg& leg = chain.legs[i];
            if (leg.mode != TravelMode::Train) continue;
            if (!leg.board_station || !leg.alight_station) {
                ++out.skipped_missing_station;
                continue;
            }
            if (*leg.board_station == *leg.alight_station) {
                ++out.skipped_same_station;
                continue;
            }
            TrainLegContext ctx;
            ctx.device_day_id = chain.device_day_id;
            ctx.board_station = *leg.board_station;
            ctx.alight_station = *leg.alight_station;
            ctx.route_id = leg.route_id;
            ctx.board_time = leg.start_time;
            ctx.alight_time = leg.end_time;
            ctx.origin_cell = chain.legs.front().start_cell;
            ctx.destination_cell = chain.legs.back().end_cell;
            ctx.access_mode = i > 0 ? chain.legs[i - 1].mode : TravelMode::Unknown;
            ctx.egress_mode =
                i + 1 < chain.legs.size() ? chain.legs[i + 1].mode : TravelMode::Unknown;
            ctx.chain_index = static_cast<int>(i);
            out.contexts.push_back(std::move(ctx));
        }
    }
    return out;
}

}  // namespace tfuse
