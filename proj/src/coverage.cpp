#include "transit_fuse/coverage.hpp"

#include <algorithm>

#include "transit_fuse/error.hpp"

namespace tfuse {

std::map<std::string, StationCellFlows> compile_cell_flows(
    std::span<const TrainLegContext> contexts) {
    std::map<std::string, std::map<GridCell, int64_t>> origin_tallies;
    std::map<std::string, std::map<GridCell, int64_t>> destination_tallies;
    for (const TrainLegContext& c : contexts) {
        ++origin_tallies[c.board_station][c.origin_cell];
        ++destination_tallies[c.alight_station][c.destination_cell];
    }

    std::map<std::string, StationCellFlows> out;
    auto const fill = [&out](const std::map<std::string, std::map<GridCell, int64_t>>& tallies,
                             FlowSide side) {
        for (const auto& [station, cells] : tallies) {
            CellFlowList& list =
                side == FlowSide::Origin ? out[station].origin : out[station].destination;
            list.station_id = station;
            list.side = side;
            for (const auto& [cell, count] : cells) list.entries.push_back({cell, count});
        }
    };
    fill(origin_tallies, FlowSide::Origin);
    fill(destination_tallies, FlowSide::Destination);
    for (auto& [station, flows] : out) {
        flows.origin.station_id = station;
        flows.destination.station_id = station;
        flows.destination.side = FlowSide::Destination;
    }
    return out;
}

double gini(std::span<const double> values) {
    if (values.empty()) throw InputError("gini undefined for an empty list");
    double total = 0.0;
    for (double v : values) {
        if (!(v > 0.0)) throw InputError("gini requires strictly positive values");
        total += v;
    }
    // Sorted form of the mean-absolute-difference Gini:
    //   G = 2 * sum_i(i * x_(i)) / (n * sum x) - (n + 1) / n
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double const n = static_cast<double>(sorted.size());
    double weighted = 0.0;
    for (size_t i = 0; i < sorted.size(); ++i) {
        weighted += static_cast<double>(i + 1) * sorted[i];
    }
    double const g = 2.0 * weighted / (n * total) - (n + 1.0) / n;
    return std::clamp(g, 0.0, 1.0);
}

double radius_of_gyration_km(const CellFlowList& flows, const Station& station,
                             const ProjectionFrame& frame) {
    if (flows.entries.empty()) {
        throw InputError("radius of gyration undefined for an empty cell list");
    }
    double weighted = 0.0;
    double total = 0.0;
    for (const CellFlow& f : flows.entries) {
        double const d = haversine_km(frame.cell_centroid(f.cell), station.coords());
        weighted += d * static_cast<double>(f.count);
        total += static_cast<double>(f.count);
    }
    return weighted / total;
}

std::map<std::string, StationModeVectors> mode_vectors(
    std::span<const TrainLegContext> contexts) {
    std::map<std::string, std::array<int64_t, kNumModes>> access, egress;
    for (const TrainLegContext& c : contexts) {
        ++access[c.board_station][static_cast<size_t>(c.access_mode)];
        ++egress[c.alight_station][static_cast<size_t>(c.egress_mode)];
    }

    std::map<std::string, StationModeVectors> out;
    auto const normalize = [](const std::array<int64_t, kNumModes>& counts, ModeVector& v) {
        int64_t total = 0;
        for (int64_t c : counts) total += c;
        if (total == 0) return;  // all-zero vector, not NaN
        for (size_t i = 0; i < kNumModes; ++i) {
            v[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
        }
    };
    for (const auto& [station, counts] : access) normalize(counts, out[station].access);
    for (const auto& [station, counts] : egress) normalize(counts, out[station].egress);
    return out;
}

std::vector<StationProfile> build_station_profiles(std::span<const TrainLegContext> contexts,
                                                   const StationRegistry& registry,
                                                   const ProjectionFrame& frame) {
    auto const flows = compile_cell_flows(contexts);
    auto const modes = mode_vectors(contexts);

    std::vector<StationProfile> profiles;
    profiles.reserve(registry.size());
    for (const Station& station : registry.stations()) {
        StationProfile p;
        p.station_id = station.station_id;
        auto const fit = flows.find(station.station_id);
        if (fit != flows.end()) {
            const CellFlowList& o = fit->second.origin;
            const CellFlowList& d = fit->second.destination;
            p.n_origin = static_cast<int64_t>(o.entries.size());
            p.n_destination = static_cast<int64_t>(d.entries.size());
            auto const counts_of = [](const CellFlowList& list) {
                std::vector<double> c;
                c.reserve(list.entries.size());
                for (const CellFlow& f : list.entries) c.push_back(static_cast<double>(f.count));
                return c;
            };
            if (!o.entries.empty()) {
                p.gini_origin = gini(counts_of(o));
                p.rg_origin_km = radius_of_gyration_km(o, station, frame);
            }
            if (!d.entries.empty()) {
                p.gini_destination = gini(counts_of(d));
                p.rg_destination_km = radius_of_gyration_km(d, station, frame);
            }
        }
        auto const mit = modes.find(station.station_id);
        if (mit != modes.end()) {
            p.access_modes = mit->second.access;
            p.egress_modes = mit->second.egress;
        }
        profiles.push_back(std::move(p));
    }
    return profiles;
}

}  // namespace tfuse
