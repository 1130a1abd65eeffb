#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "transit_fuse/model.hpp"

namespace tfuse {

// Planted-signal mode: station demand becomes a known monotone function of
// catchment breadth so the fusion model's recovery can be verified.
struct PlantedSpec {
    int n_min = 4;
    int n_max = 80;
    double noise_share_max = 0.08;  // per-station egress tram share, demand-independent
};

struct SynthConfig {
    int n_days = 5;
    std::string start_date = "2021-09-06";
    int journeys_per_day = 1000;
    double opt_in_rate = 0.025;
    double apc_imputation_rate = 0.0;
    double imputation_noise_sigma = 0.1;
    double transfer_rate = 0.05;
    double no_access_rate = 0.05;  // chain starts at the board station
    double no_egress_rate = 0.05;  // chain ends at the alight station

    // Access/egress leg mode distribution in frozen mode order
    // (Bus, PrivateCar, Cycling, Subway, Train, Tram, Walking, Unknown).
    // Train must stay 0: train access only arises from transfers.
    std::array<double, kNumModes> feeder_mode_weights = {0.18, 0.16, 0.08, 0.03,
                                                         0.0,  0.03, 0.50, 0.02};

    int n_lines = 4;
    int stations_per_line = 12;  // including the shared hub
    double headway_min = 10.0;
    double runtime_min = 2.5;  // per inter-station hop
    double service_start_hour = 5.0;
    double service_end_hour = 23.0;
    double station_spacing_km = 2.5;
    double station_weight_spread = 1.0;  // lognormal sigma of boarding demand
    double attraction_spread = 1.0;      // lognormal sigma of alighting attraction
    double gravity_exponent = 1.0;
    int catchment_radius_cells = 6;
    int catchment_cells_per_station = 40;
    int station_dwell_s = 480;  // margin between legs; keeps coarsened legs ordered
    ProjectionFrame frame{60.0, 24.5};
    std::optional<PlantedSpec> planted;
};

void validate_synth_config(const SynthConfig& cfg);

// Returns a config whose ridership is a planted monotone function of each
// station's origin/destination cell breadth, with one demand-independent
// noise feature (egress tram share) and full observation (p = 1, no noise).
SynthConfig plant_relationship(SynthConfig cfg);

struct NetStation {
    Station station;
    int line = 0;  // primary line; every line passes the hub
    int pos = 0;   // 0 = hub
    GridCell cell;
    double board_weight = 1.0;
    double attraction = 1.0;
    std::vector<GridCell> origin_cells;  // catchment, origin side
    std::vector<GridCell> dest_cells;    // catchment, destination side
    double egress_tram_share = -1.0;     // >= 0 only in planted mode
};

struct ToyNetwork {
    std::vector<NetStation> stations;        // index 0 = hub
    std::vector<std::vector<size_t>> lines;  // station indices, lines[l][0] = hub
    int64_t headway_s = 0;
    int64_t runtime_s = 0;
    int64_t service_start_s = 0;
    int64_t service_end_s = 0;

    StationRegistry registry() const;
};

// Deterministic under (cfg, seed); the network layer of the simulator.
ToyNetwork build_network(const SynthConfig& cfg, uint64_t seed);

struct GenerateResult {
    std::filesystem::path apc_path;
    std::filesystem::path trace_path;
    std::filesystem::path stations_path;
    std::filesystem::path sidecar_path;
    int64_t journey_count = 0;
    int64_t train_leg_count = 0;
    int64_t opt_in_count = 0;
    int64_t trace_row_count = 0;
    int64_t apc_row_count = 0;
};

// Simulates journeys day by day (day d uses the derived seed (seed, d), so
// serial and parallel generation match bit-exactly), writes the APC file
// with exact counts of all passengers, the raw trace file of opted-in
// passengers, the station registry, and the ground-truth sidecar JSON.
GenerateResult generate(const SynthConfig& cfg, uint64_t seed,
                        const std::filesystem::path& out_dir, std::string_view manifest = {});

}  // namespace tfuse
