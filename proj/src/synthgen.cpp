#include "transit_fuse/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include <json.hpp>

#include "transit_fuse/error.hpp"
#include "transit_fuse/ingest.hpp"
#include "transit_fuse/rng.hpp"
#include "transit_fuse/util.hpp"

namespace tfuse {

namespace {

// feeder speeds in km/h, frozen mode order
constexpr std::array<double, kNumModes> kModeSpeedKmh = {20.0, 30.0, 15.0, 30.0,
                                                         60.0, 18.0, 5.0,  5.0};

[[noreturn]] void config_error(const std::string& msg) {
    throw InputError("synth config: " + msg);
}

double worst_feeder_km(const SynthConfig& cfg) {
    double const reach_m = (cfg.catchment_radius_cells + 1) * kCellSizeM;
    return reach_m * 1.4143 / 1000.0;
}

double worst_tail_hours(const SynthConfig& cfg) {
    double const feeder_h = worst_feeder_km(cfg) / 5.0;  // slowest feeder mode
    double const wait_h = (cfg.station_dwell_s / 3600.0) + cfg.headway_min / 60.0;
    double const ride_h = (cfg.stations_per_line - 1) * cfg.runtime_min / 60.0;
    return feeder_h + 2.0 * wait_h + 2.0 * ride_h + cfg.station_dwell_s / 3600.0 + feeder_h +
           0.25;  // trailing quarter-hour rounding slack
}

}  // namespace

void validate_synth_config(const SynthConfig& cfg) {
    if (cfg.n_days < 1) config_error("n_days must be >= 1");
    if (cfg.journeys_per_day < 0) config_error("journeys_per_day must be >= 0");
    if (!(cfg.opt_in_rate >= 0.0 && cfg.opt_in_rate <= 1.0)) {
        config_error("opt_in_rate must be in [0, 1]");
    }
    if (!(cfg.apc_imputation_rate >= 0.0 && cfg.apc_imputation_rate < 1.0)) {
        config_error("apc_imputation_rate must be in [0, 1)");
    }
    if (cfg.imputation_noise_sigma < 0.0) config_error("imputation_noise_sigma must be >= 0");
    for (double r : {cfg.transfer_rate, cfg.no_access_rate, cfg.no_egress_rate}) {
        if (!(r >= 0.0 && r <= 1.0)) config_error("rates must be in [0, 1]");
    }
    if (cfg.n_lines < 2 || cfg.n_lines > 4) config_error("n_lines must be in [2, 4]");
    if (cfg.stations_per_line < 3) config_error("every rail line needs >= 3 stations");
    if (cfg.headway_min <= 0.0 || cfg.runtime_min <= 0.0 || cfg.station_spacing_km <= 0.0) {
        config_error("headway, runtime and spacing must be positive");
    }
    if (cfg.station_dwell_s <= 450) {
        config_error("station_dwell_s must exceed 450 s so quarter-hour rounding cannot "
                     "reorder legs");
    }
    if (cfg.station_dwell_s + cfg.headway_min * 60.0 + 450.0 >= 1800.0) {
        config_error("station_dwell_s + headway + rounding slack must stay below the 30 min "
                     "chain dwell gap");
    }
    double total_weight = 0.0;
    for (double w : cfg.feeder_mode_weights) {
        if (w < 0.0) config_error("feeder mode weights must be non-negative");
        total_weight += w;
    }
    if (total_weight <= 0.0) config_error("feeder mode weights must not all be zero");
    if (cfg.feeder_mode_weights[static_cast<size_t>(TravelMode::Train)] != 0.0) {
        config_error("feeder Train weight must be 0; train access arises from transfers");
    }
    if (cfg.catchment_radius_cells < 1) config_error("catchment_radius_cells must be >= 1");
    int const pool = (2 * cfg.catchment_radius_cells + 1) * (2 * cfg.catchment_radius_cells + 1) - 1;
    if (cfg.catchment_cells_per_station < 1 || cfg.catchment_cells_per_station > pool) {
        config_error("catchment_cells_per_station must be in [1, " + std::to_string(pool) + "]");
    }
    if (cfg.planted) {
        if (cfg.planted->n_min < 1 || cfg.planted->n_max < cfg.planted->n_min) {
            config_error("planted breadth bounds must satisfy 1 <= n_min <= n_max");
        }
        if (cfg.planted->n_max > pool) {
            config_error("planted n_max exceeds the catchment cell pool");
        }
        if (!(cfg.planted->noise_share_max >= 0.0 && cfg.planted->noise_share_max <= 1.0)) {
            config_error("planted noise_share_max must be in [0, 1]");
        }
    }
    if (cfg.service_end_hour - cfg.service_start_hour < 4.0) {
        config_error("service window must span at least 4 hours");
    }
    double const clamp_hi = cfg.service_end_hour - 3.0;
    double const clamp_lo = cfg.service_start_hour + 0.5;
    if (clamp_hi <= clamp_lo) config_error("service window too short for demand sampling");
    if (clamp_hi + worst_tail_hours(cfg) >= 23.99) {
        config_error("journeys could cross midnight; shorten lines or the service window");
    }
    validate_lat_lon(cfg.frame.lat0, cfg.frame.lon0);
    parse_iso_date(cfg.start_date);
}

SynthConfig plant_relationship(SynthConfig cfg) {
    cfg.planted = PlantedSpec{};
    cfg.opt_in_rate = 1.0;
    cfg.apc_imputation_rate = 0.0;
    cfg.transfer_rate = 0.0;
    cfg.no_access_rate = 0.0;
    cfg.no_egress_rate = 0.0;
    cfg.gravity_exponent = 0.0;
    // a mode that never occurs keeps one feature column constant
    cfg.feeder_mode_weights[static_cast<size_t>(TravelMode::Subway)] = 0.0;
    validate_synth_config(cfg);
    return cfg;
}

StationRegistry ToyNetwork::registry() const {
    std::vector<Station> all;
    all.reserve(stations.size());
    for (const NetStation& s : stations) all.push_back(s.station);
    return StationRegistry(std::move(all));
}

ToyNetwork build_network(const SynthConfig& cfg, uint64_t seed) {
    validate_synth_config(cfg);
    ToyNetwork net;
    net.headway_s = std::llround(cfg.headway_min * 60.0);
    net.runtime_s = std::llround(cfg.runtime_min * 60.0);
    net.service_start_s = std::llround(cfg.service_start_hour * 3600.0);
    net.service_end_s = std::llround(cfg.service_end_hour * 3600.0);

    int const per_line = cfg.stations_per_line;
    size_t const n_stations = 1 + static_cast<size_t>(cfg.n_lines) * (per_line - 1);
    net.stations.resize(n_stations);
    net.lines.assign(cfg.n_lines, {});

    double const hub_x = 20000.0, hub_y = 20000.0;
    auto const make_station = [&](size_t idx, const std::string& name, double x, double y) {
        NetStation& s = net.stations[idx];
        char id[8];
        std::snprintf(id, sizeof(id), "S%03zu", idx);
        s.station.station_id = id;
        s.station.name = name;
        LatLon const p = cfg.frame.from_local(x, y);
        s.station.lat = p.lat;
        s.station.lon = p.lon;
        s.cell = cfg.frame.snap(p);
    };

    make_station(0, "Central Hub", hub_x, hub_y);
    net.stations[0].line = -1;
    net.stations[0].pos = 0;
    for (int l = 0; l < cfg.n_lines; ++l) {
        net.lines[l].push_back(0);
        double const angle = 0.37 + l * 6.283185307179586 / cfg.n_lines;
        for (int q = 1; q < per_line; ++q) {
            size_t const idx = 1 + static_cast<size_t>(l) * (per_line - 1) + (q - 1);
            char name[32];
            std::snprintf(name, sizeof(name), "L%d stop %d", l, q);
            double const x = hub_x + q * cfg.station_spacing_km * 1000.0 * std::cos(angle);
            double const y = hub_y + q * cfg.station_spacing_km * 1000.0 * std::sin(angle);
            make_station(idx, name, x, y);
            net.stations[idx].line = l;
            net.stations[idx].pos = q;
            net.lines[l].push_back(idx);
        }
    }

    Rng rng(derive_seed(seed, 42));

    std::vector<int> planted_origin, planted_dest;
    if (cfg.planted) {
        // geometric ramp of breadths, assigned to stations in shuffled order
        std::vector<int> ramp(n_stations);
        double const ratio = static_cast<double>(cfg.planted->n_max) / cfg.planted->n_min;
        for (size_t i = 0; i < n_stations; ++i) {
            double const frac = n_stations == 1 ? 0.0 : static_cast<double>(i) / (n_stations - 1);
            ramp[i] = static_cast<int>(std::llround(cfg.planted->n_min * std::pow(ratio, frac)));
        }
        planted_origin = ramp;
        rng.shuffle(planted_origin);
        planted_dest = ramp;
        rng.shuffle(planted_dest);
    }

    for (size_t i = 0; i < n_stations; ++i) {
        NetStation& s = net.stations[i];
        if (cfg.planted) {
            s.board_weight = static_cast<double>(planted_origin[i]);
            s.attraction = static_cast<double>(planted_dest[i]);
            s.egress_tram_share = rng.uniform(0.0, cfg.planted->noise_share_max);
        } else {
            s.board_weight = std::exp(cfg.station_weight_spread * rng.normal());
            s.attraction = std::exp(cfg.attraction_spread * rng.normal());
        }

        int const r = cfg.catchment_radius_cells;
        std::vector<GridCell> candidates;
        candidates.reserve((2 * r + 1) * (2 * r + 1) - 1);
        for (int dy = -r; dy <= r; ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
                if (dx == 0 && dy == 0) continue;
                candidates.push_back({s.cell.ix + dx, s.cell.iy + dy});
            }
        }
        auto const sample_cells = [&rng, &candidates](size_t k) {
            std::vector<GridCell> cells(candidates);
            k = std::min(k, cells.size());
            for (size_t i2 = 0; i2 < k; ++i2) {
                size_t const j = i2 + rng.below(cells.size() - i2);
                std::swap(cells[i2], cells[j]);
            }
            cells.resize(k);
            return cells;
        };
        size_t const n_origin = cfg.planted ? static_cast<size_t>(planted_origin[i])
                                            : static_cast<size_t>(cfg.catchment_cells_per_station);
        size_t const n_dest = cfg.planted ? static_cast<size_t>(planted_dest[i])
                                          : static_cast<size_t>(cfg.catchment_cells_per_station);
        s.origin_cells = sample_cells(n_origin);
        s.dest_cells = sample_cells(n_dest);
    }
    return net;
}

namespace {

struct TripKey {
    int day = 0;
    int line = 0;
    int dir = 0;  // 0 = outbound from hub, 1 = inbound
    int64_t dep = 0;
    auto operator<=>(const TripKey&) const = default;
};

struct TripTally {
    std::vector<int64_t> boards;  // indexed by path step (travel order)
    std::vector<int64_t> alights;
};

struct Truth {
    std::map<std::string, std::array<int64_t, 24>> boardings_by_hour;
    std::map<std::string, std::array<int64_t, 24>> alightings_by_hour;
    std::map<std::string, std::map<std::string, int64_t>> od;
    std::map<std::string, std::array<int64_t, kNumModes>> access_modes;
    std::map<std::string, std::array<int64_t, kNumModes>> egress_modes;
    std::map<std::string, std::map<GridCell, int64_t>> origin_cells;
    std::map<std::string, std::map<GridCell, int64_t>> dest_cells;
    std::vector<std::string> opt_in_ids;
    nlohmann::json journeys = nlohmann::json::array();
    int64_t journey_count = 0;
    int64_t train_leg_count = 0;
};

std::string route_name(int line, int dir) {
    return "R" + std::to_string(line) + (dir == 0 ? "a" : "b");
}

std::string feeder_stop(TravelMode m, const std::string& suffix) {
    char const letter = m == TravelMode::Bus ? 'B' : (m == TravelMode::Subway ? 'U' : 'T');
    return std::string("F") + letter + "-" + suffix;
}

std::string cell_suffix(const GridCell& c) {
    return std::to_string(c.ix) + "_" + std::to_string(c.iy);
}

class Simulator {
public:
    Simulator(const SynthConfig& cfg, const ToyNetwork& net, uint64_t seed)
        : cfg_(cfg), net_(net), seed_(seed) {
        for (const NetStation& s : net_.stations) board_weights_.push_back(s.board_weight);
        cal_ = Calendar{};
        clamp_lo_h_ = cfg.service_start_hour + 0.5;
        clamp_hi_h_ = cfg.service_end_hour - 3.0;
    }

    void run_day(int day, Truth& truth, std::vector<RawLegRecord>& trace_rows,
                 std::map<TripKey, TripTally>& trips) {
        Rng rng(derive_seed(seed_, 1000 + static_cast<uint64_t>(day)));
        int64_t const date = parse_iso_date(cfg_.start_date) + day;
        std::string const date_str = format_iso_date(date);
        for (int j = 0; j < cfg_.journeys_per_day; ++j) {
            simulate_journey(day, date, date_str, "dev" + std::to_string(j), rng, truth,
                             trace_rows, trips);
        }
    }

private:
    const SynthConfig& cfg_;
    const ToyNetwork& net_;
    uint64_t seed_;
    std::vector<double> board_weights_;
    Calendar cal_;
    double clamp_lo_h_ = 0.0, clamp_hi_h_ = 0.0;

    double sample_departure_hours(Rng& rng) const {
        double const u = rng.real01();
        double h = 0.0;
        if (u < 0.35) {
            h = 8.0 + rng.normal();
        } else if (u < 0.70) {
            h = 17.5 + 1.25 * rng.normal();
        } else {
            h = rng.uniform(clamp_lo_h_, clamp_hi_h_);
        }
        return std::clamp(h, clamp_lo_h_, clamp_hi_h_);
    }

    size_t pick_alight(size_t line, size_t board, bool exclude_hub, Rng& rng) const {
        std::vector<size_t> members;
        std::vector<double> weights;
        const NetStation& from = net_.stations[board];
        for (size_t idx : net_.lines[line]) {
            if (idx == board) continue;
            if (exclude_hub && idx == 0) continue;
            const NetStation& to = net_.stations[idx];
            double const d = haversine_km(from.station.coords(), to.station.coords());
            members.push_back(idx);
            weights.push_back(to.attraction / std::pow(1.0 + d, cfg_.gravity_exponent));
        }
        return members[rng.categorical(weights)];
    }

    TravelMode draw_feeder_mode(double tram_share, Rng& rng) const {
        if (tram_share >= 0.0) {
            if (rng.real01() < tram_share) return TravelMode::Tram;
            auto weights = cfg_.feeder_mode_weights;
            weights[static_cast<size_t>(TravelMode::Tram)] = 0.0;
            return static_cast<TravelMode>(rng.categorical(weights));
        }
        return static_cast<TravelMode>(rng.categorical(cfg_.feeder_mode_weights));
    }

    LatLon jitter_in_cell(const GridCell& cell, Rng& rng) const {
        double const x = (cell.ix + 0.5) * kCellSizeM + rng.uniform(-100.0, 100.0);
        double const y = (cell.iy + 0.5) * kCellSizeM + rng.uniform(-100.0, 100.0);
        return cfg_.frame.from_local(x, y);
    }

    // Boards the first trip of (line, dir) passing `step` at or after t_ready.
    struct Boarding {
        TripKey key;
        Timestamp board_time = 0;
    };
    Boarding next_trip(int day, int64_t day_t0, int line, int dir, int step,
                       Timestamp t_ready) const {
        int64_t const base = day_t0 + net_.service_start_s + step * net_.runtime_s;
        int64_t dep = 0;
        if (t_ready > base) {
            dep = (t_ready - base + net_.headway_s - 1) / net_.headway_s;
        }
        int64_t const dep_time = day_t0 + net_.service_start_s + dep * net_.headway_s;
        if (dep_time > day_t0 + net_.service_end_s) {
            throw InvariantError("no train available after clamped departure time");
        }
        return {{day, line, dir, dep}, base + dep * net_.headway_s};
    }

    int step_of(int line, size_t station, int dir) const {
        int const pos = net_.stations[station].pos;
        int const len = static_cast<int>(net_.lines[line].size());
        return dir == 0 ? pos : len - 1 - pos;
    }

    struct TrainRide {
        size_t board = 0, alight = 0;
        int line = 0, dir = 0;
        Timestamp board_time = 0, alight_time = 0;
    };

    TrainRide ride(int day, int64_t day_t0, int line, size_t board, size_t alight,
                   Timestamp t_ready, std::map<TripKey, TripTally>& trips) const {
        int const dir = net_.stations[board].pos < net_.stations[alight].pos ||
                                (board == 0)
                            ? 0
                            : 1;
        int const step_b = step_of(line, board, dir);
        int const step_a = step_of(line, alight, dir);
        Boarding const boarding = next_trip(day, day_t0, line, dir, step_b, t_ready);
        TripTally& tally = trips[boarding.key];
        if (tally.boards.empty()) {
            tally.boards.assign(net_.lines[line].size(), 0);
            tally.alights.assign(net_.lines[line].size(), 0);
        }
        ++tally.boards[step_b];
        ++tally.alights[step_a];

        TrainRide r;
        r.board = board;
        r.alight = alight;
        r.line = line;
        r.dir = dir;
        r.board_time = boarding.board_time;
        r.alight_time = boarding.board_time + (step_a - step_b) * net_.runtime_s;
        return r;
    }

    void record_train_leg(Truth& truth, const TrainRide& r, const GridCell& origin,
                          const GridCell& destination, TravelMode access, TravelMode egress,
                          bool opt_in, const std::string& device_tag,
                          const std::string& date_str) const {
        const std::string& b = net_.stations[r.board].station.station_id;
        const std::string& a = net_.stations[r.alight].station.station_id;
        ++truth.boardings_by_hour[b][cal_.hour_of_day(r.board_time)];
        ++truth.alightings_by_hour[a][cal_.hour_of_day(r.alight_time)];
        ++truth.od[b][a];
        ++truth.access_modes[b][static_cast<size_t>(access)];
        ++truth.egress_modes[a][static_cast<size_t>(egress)];
        ++truth.origin_cells[b][origin];
        ++truth.dest_cells[a][destination];
        ++truth.train_leg_count;
        truth.journeys.push_back({device_tag, date_str, opt_in, b, a,
                                  route_name(r.line, r.dir), origin.ix, origin.iy,
                                  destination.ix, destination.iy,
                                  std::string(mode_label(access)),
                                  std::string(mode_label(egress)), r.board_time,
                                  r.alight_time});
    }

    void simulate_journey(int day, int64_t date, const std::string& date_str,
                          const std::string& device_tag, Rng& rng, Truth& truth,
                          std::vector<RawLegRecord>& trace_rows,
                          std::map<TripKey, TripTally>& trips) {
        int64_t const day_t0 = date * kSecondsPerDay;
        bool const opt_in = rng.bernoulli(cfg_.opt_in_rate);

        size_t const board = rng.categorical(board_weights_);
        bool const transfer = board != 0 && rng.bernoulli(cfg_.transfer_rate);
        int const line1 = board == 0 ? static_cast<int>(rng.below(net_.lines.size()))
                                     : net_.stations[board].line;
        int line2 = line1;
        size_t alight = 0;
        if (transfer) {
            line2 = static_cast<int>(rng.below(net_.lines.size() - 1));
            if (line2 >= line1) ++line2;
            alight = pick_alight(line2, board, /*exclude_hub=*/true, rng);
        } else {
            alight = pick_alight(line1, board, /*exclude_hub=*/false, rng);
        }

        bool const has_access = !rng.bernoulli(cfg_.no_access_rate);
        bool const has_egress = !rng.bernoulli(cfg_.no_egress_rate);

        const NetStation& st_b = net_.stations[board];
        const NetStation& st_a = net_.stations[alight];

        std::vector<RawLegRecord> legs;
        Timestamp t = day_t0 + std::llround(sample_departure_hours(rng) * 3600.0);

        GridCell origin_cell = st_b.cell;
        TravelMode access_mode = TravelMode::Unknown;
        Timestamp arrive_b = t;
        if (has_access) {
            origin_cell = st_b.origin_cells[rng.below(st_b.origin_cells.size())];
            LatLon const home = jitter_in_cell(origin_cell, rng);
            access_mode = draw_feeder_mode(-1.0, rng);
            double const km = haversine_km(home, st_b.station.coords());
            int64_t const dur = std::max<int64_t>(
                60, std::llround(km / kModeSpeedKmh[static_cast<size_t>(access_mode)] * 3600.0));
            RawLegRecord leg;
            leg.device_tag = device_tag;
            leg.date = date;
            leg.mode = access_mode;
            leg.start_time = t;
            leg.end_time = t + dur;
            leg.start_lat = home.lat;
            leg.start_lon = home.lon;
            leg.end_lat = st_b.station.lat;
            leg.end_lon = st_b.station.lon;
            if (is_pt_vehicle_mode(access_mode)) {
                leg.board_station = feeder_stop(access_mode, cell_suffix(origin_cell));
                leg.alight_station = feeder_stop(access_mode, st_b.station.station_id);
            }
            legs.push_back(std::move(leg));
            arrive_b = t + dur;
        }

        GridCell dest_cell = st_a.cell;
        TravelMode egress_mode = TravelMode::Unknown;
        LatLon work{};
        if (has_egress) {
            dest_cell = st_a.dest_cells[rng.below(st_a.dest_cells.size())];
            work = jitter_in_cell(dest_cell, rng);
            egress_mode = draw_feeder_mode(st_a.egress_tram_share, rng);
        }

        auto const train_record = [&](const TrainRide& r) {
            RawLegRecord leg;
            leg.device_tag = device_tag;
            leg.date = date;
            leg.mode = TravelMode::Train;
            leg.start_time = r.board_time;
            leg.end_time = r.alight_time;
            leg.start_lat = net_.stations[r.board].station.lat;
            leg.start_lon = net_.stations[r.board].station.lon;
            leg.end_lat = net_.stations[r.alight].station.lat;
            leg.end_lon = net_.stations[r.alight].station.lon;
            leg.board_station = net_.stations[r.board].station.station_id;
            leg.alight_station = net_.stations[r.alight].station.station_id;
            leg.route_id = route_name(r.line, r.dir);
            return leg;
        };

        Timestamp after = 0;
        if (transfer) {
            TrainRide const r1 =
                ride(day, day_t0, line1, board, 0, arrive_b + cfg_.station_dwell_s, trips);
            TrainRide const r2 = ride(day, day_t0, line2, 0, alight,
                                      r1.alight_time + cfg_.station_dwell_s, trips);
            legs.push_back(train_record(r1));
            legs.push_back(train_record(r2));
            record_train_leg(truth, r1, origin_cell, dest_cell,
                             has_access ? access_mode : TravelMode::Unknown, TravelMode::Train,
                             opt_in, device_tag, date_str);
            record_train_leg(truth, r2, origin_cell, dest_cell, TravelMode::Train,
                             has_egress ? egress_mode : TravelMode::Unknown, opt_in, device_tag,
                             date_str);
            after = r2.alight_time;
        } else {
            TrainRide const r =
                ride(day, day_t0, line1, board, alight, arrive_b + cfg_.station_dwell_s, trips);
            legs.push_back(train_record(r));
            record_train_leg(truth, r, origin_cell, dest_cell,
                             has_access ? access_mode : TravelMode::Unknown,
                             has_egress ? egress_mode : TravelMode::Unknown, opt_in, device_tag,
                             date_str);
            after = r.alight_time;
        }

        if (has_egress) {
            double const km = haversine_km(st_a.station.coords(), work);
            int64_t const dur = std::max<int64_t>(
                60, std::llround(km / kModeSpeedKmh[static_cast<size_t>(egress_mode)] * 3600.0));
            RawLegRecord leg;
            leg.device_tag = device_tag;
            leg.date = date;
            leg.mode = egress_mode;
            leg.start_time = after + cfg_.station_dwell_s;
            leg.end_time = leg.start_time + dur;
            leg.start_lat = st_a.station.lat;
            leg.start_lon = st_a.station.lon;
            leg.end_lat = work.lat;
            leg.end_lon = work.lon;
            if (is_pt_vehicle_mode(egress_mode)) {
                leg.board_station = feeder_stop(egress_mode, st_a.station.station_id);
                leg.alight_station = feeder_stop(egress_mode, cell_suffix(dest_cell));
            }
            legs.push_back(std::move(leg));
        }

        ++truth.journey_count;
        if (opt_in) {
            truth.opt_in_ids.push_back(device_tag + "|" + date_str);
            for (RawLegRecord& leg : legs) trace_rows.push_back(std::move(leg));
        }
    }
};

nlohmann::json cells_json(const std::map<GridCell, int64_t>& cells) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [cell, count] : cells) arr.push_back({cell.ix, cell.iy, count});
    return arr;
}

}  // namespace

GenerateResult generate(const SynthConfig& cfg, uint64_t seed,
                        const std::filesystem::path& out_dir, std::string_view manifest) {
    validate_synth_config(cfg);
    ToyNetwork const net = build_network(cfg, seed);
    std::filesystem::create_directories(out_dir);

    Truth truth;
    std::vector<RawLegRecord> trace_rows;
    std::map<TripKey, TripTally> trips;
    Simulator sim(cfg, net, seed);
    for (int day = 0; day < cfg.n_days; ++day) {
        sim.run_day(day, truth, trace_rows, trips);
    }

    // APC emission: per-trip counts of all passengers; a seeded fraction of
    // trips is flagged imputed and perturbed by trip-level multiplicative
    // noise that keeps the running load non-negative and the terminus
    // balanced.
    std::vector<APCEvent> events;
    Rng apc_rng(derive_seed(seed, 555));
    int64_t const start_day = parse_iso_date(cfg.start_date);
    for (const auto& [key, tally] : trips) {
        bool const imputed =
            cfg.apc_imputation_rate > 0.0 && apc_rng.bernoulli(cfg.apc_imputation_rate);
        size_t const path_len = tally.boards.size();
        std::vector<int64_t> boards = tally.boards;
        std::vector<int64_t> alights = tally.alights;
        if (imputed) {
            double const f = apc_rng.lognormal(cfg.imputation_noise_sigma);
            int64_t onboard = 0;
            for (size_t step = 0; step < path_len; ++step) {
                int64_t a = std::min<int64_t>(std::llround(f * tally.alights[step]), onboard);
                if (step + 1 == path_len) a = onboard;
                onboard -= a;
                int64_t const b =
                    step + 1 == path_len ? 0 : std::llround(f * tally.boards[step]);
                onboard += b;
                boards[step] = b;
                alights[step] = a;
            }
        }
        int64_t const date = start_day + key.day;
        std::string const date_str = format_iso_date(date);
        std::string const route = route_name(key.line, key.dir);
        char trip_suffix[16];
        std::snprintf(trip_suffix, sizeof(trip_suffix), "_%04lld",
                      static_cast<long long>(key.dep));
        std::string const trip_id = route + "_" + date_str + trip_suffix;
        const std::vector<size_t>& line = net.lines[static_cast<size_t>(key.line)];
        for (size_t step = 0; step < path_len; ++step) {
            size_t const station_idx =
                key.dir == 0 ? line[step] : line[path_len - 1 - step];
            APCEvent e;
            e.route_id = route;
            e.trip_id = trip_id;
            e.station_id = net.stations[station_idx].station.station_id;
            e.timestamp = date * kSecondsPerDay + net.service_start_s + key.dep * net.headway_s +
                          static_cast<int64_t>(step) * net.runtime_s;
            e.boardings = boards[step];
            e.alightings = alights[step];
            e.imputed = imputed;
            events.push_back(std::move(e));
        }
    }

    GenerateResult result;
    result.apc_path = out_dir / "apc.csv";
    result.trace_path = out_dir / "trace.csv";
    result.stations_path = out_dir / "stations.csv";
    result.sidecar_path = out_dir / "sidecar.json";
    result.journey_count = truth.journey_count;
    result.train_leg_count = truth.train_leg_count;
    result.opt_in_count = static_cast<int64_t>(truth.opt_in_ids.size());
    result.trace_row_count = static_cast<int64_t>(trace_rows.size());
    result.apc_row_count = static_cast<int64_t>(events.size());

    StationRegistry const registry = net.registry();
    write_station_file(result.stations_path, registry, manifest);
    write_apc_file(result.apc_path, events, manifest);
    write_trace_file(result.trace_path, trace_rows, manifest);

    nlohmann::json sidecar;
    sidecar["manifest"] = std::string(manifest);
    sidecar["frame"] = {{"lat0", cfg.frame.lat0}, {"lon0", cfg.frame.lon0}};
    sidecar["journey_count"] = truth.journey_count;
    sidecar["train_leg_count"] = truth.train_leg_count;
    auto const hours_json = [](const std::map<std::string, std::array<int64_t, 24>>& tallies) {
        nlohmann::json obj = nlohmann::json::object();
        for (const auto& [station, hours] : tallies) obj[station] = hours;
        return obj;
    };
    sidecar["true_boardings"] = hours_json(truth.boardings_by_hour);
    sidecar["true_alightings"] = hours_json(truth.alightings_by_hour);
    nlohmann::json od = nlohmann::json::object();
    for (const auto& [b, row] : truth.od) {
        nlohmann::json row_json = nlohmann::json::object();
        for (const auto& [a, count] : row) row_json[a] = count;
        od[b] = std::move(row_json);
    }
    sidecar["true_od"] = std::move(od);
    auto const modes_json = [](const std::map<std::string, std::array<int64_t, kNumModes>>& m) {
        nlohmann::json obj = nlohmann::json::object();
        for (const auto& [station, counts] : m) obj[station] = counts;
        return obj;
    };
    sidecar["true_access_modes"] = modes_json(truth.access_modes);
    sidecar["true_egress_modes"] = modes_json(truth.egress_modes);
    nlohmann::json flows = nlohmann::json::object();
    for (const NetStation& s : net.stations) {
        const std::string& id = s.station.station_id;
        nlohmann::json entry;
        auto const oit = truth.origin_cells.find(id);
        auto const dit = truth.dest_cells.find(id);
        entry["origin"] =
            oit == truth.origin_cells.end() ? nlohmann::json::array() : cells_json(oit->second);
        entry["destination"] =
            dit == truth.dest_cells.end() ? nlohmann::json::array() : cells_json(dit->second);
        flows[id] = std::move(entry);
    }
    sidecar["true_cell_flows"] = std::move(flows);
    sidecar["opt_in_ids"] = truth.opt_in_ids;
    if (cfg.planted) {
        nlohmann::json planted;
        planted["signal_boardings"] = "n_origin";
        planted["signal_alightings"] = "n_destination";
        planted["noise_feature"] = "egress_tram";
        nlohmann::json n_origin = nlohmann::json::object();
        nlohmann::json n_dest = nlohmann::json::object();
        nlohmann::json noise = nlohmann::json::object();
        for (const NetStation& s : net.stations) {
            n_origin[s.station.station_id] = s.origin_cells.size();
            n_dest[s.station.station_id] = s.dest_cells.size();
            noise[s.station.station_id] = s.egress_tram_share;
        }
        planted["n_origin_cells"] = std::move(n_origin);
        planted["n_destination_cells"] = std::move(n_dest);
        planted["egress_tram_share"] = std::move(noise);
        sidecar["planted_features"] = std::move(planted);
    } else {
        sidecar["planted_features"] = nullptr;
    }
    sidecar["true_journeys_schema"] = {
        "device_tag", "date",           "opt_in",         "board",       "alight",
        "route",      "origin_ix",      "origin_iy",      "destination_ix",
        "destination_iy", "access_mode", "egress_mode",   "board_time",  "alight_time"};
    sidecar["true_journeys"] = std::move(truth.journeys);

    std::ofstream out(result.sidecar_path);
    if (!out) throw InputError("cannot write file: " + result.sidecar_path.string());
    out << sidecar.dump(1) << '\n';
    return result;
}

}  // namespace tfuse
