#pragma once

#include <array>
#include <span>

#include "transit_fuse/chains.hpp"
#include "transit_fuse/model.hpp"

namespace tfuse {

enum class FlowSide { Origin, Destination };

struct CellFlow {
    GridCell cell;
    int64_t count = 0;  // > 0
};

// Grid cells associated with one side of one station, with passenger counts.
struct CellFlowList {
    std::string station_id;
    FlowSide side = FlowSide::Origin;
    std::vector<CellFlow> entries;  // unique cells, ordered by cell
};

struct StationCellFlows {
    CellFlowList origin;
    CellFlowList destination;
};

// Origin side of station k: chain origin cells of contexts boarding at k.
// Destination side: chain destination cells of contexts alighting at k.
std::map<std::string, StationCellFlows> compile_cell_flows(
    std::span<const TrainLegContext> contexts);

// Mean-absolute-difference Gini index over positive values; 0 for a uniform
// list, approaching (n-1)/n as one value dominates.
double gini(std::span<const double> values);

// Flow-weighted mean great-circle distance (km) from cell centroids to the
// station. This is the paper-style population radius of gyration, not the
// RMS dispersion about a centroid.
double radius_of_gyration_km(const CellFlowList& flows, const Station& station,
                             const ProjectionFrame& frame);

using ModeVector = std::array<double, kNumModes>;

struct StationModeVectors {
    ModeVector access{};  // proportions over contexts boarding at the station
    ModeVector egress{};  // proportions over contexts alighting at the station
};

// Normalized access/egress mode shares per station; all-zero vectors when a
// station has no observations on that side.
std::map<std::string, StationModeVectors> mode_vectors(
    std::span<const TrainLegContext> contexts);

struct StationProfile {
    std::string station_id;
    int64_t n_origin = 0;
    int64_t n_destination = 0;
    double gini_origin = 0.0;
    double gini_destination = 0.0;
    double rg_origin_km = 0.0;
    double rg_destination_km = 0.0;
    ModeVector access_modes{};
    ModeVector egress_modes{};
};

// One profile per registry station (sorted by id). Stations without trace
// observations keep zero metrics rather than failing.
std::vector<StationProfile> build_station_profiles(std::span<const TrainLegContext> contexts,
                                                   const StationRegistry& registry,
                                                   const ProjectionFrame& frame);

}  // namespace tfuse
