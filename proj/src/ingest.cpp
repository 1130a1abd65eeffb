#include "transit_fuse/ingest.hpp"

#include <fstream>
#include <sstream>

#include "transit_fuse/error.hpp"
#include "transit_fuse/rng.hpp"
#include "transit_fuse/util.hpp"

namespace tfuse {

namespace {

struct LineReader {
    std::ifstream in;
    std::string path;
    size_t line_no = 0;

    explicit LineReader(const std::filesystem::path& p) : in(p), path(p.string()) {
        if (!in) throw InputError("cannot open file: " + path);
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw InputError(path + ":" + std::to_string(line_no) + ": " + msg);
    }

    bool next(std::string& line) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty() && line[0] == '#') continue;  // manifest header
            return true;
        }
        return false;
    }

    void expect_header(std::string_view header) {
        std::string line;
        if (!next(line)) fail("missing header row");
        if (line != header) fail("header mismatch, expected '" + std::string(header) + "'");
    }
};

bool parse_bool(std::string_view s, const LineReader& r) {
    if (s == "true") return true;
    if (s == "false") return false;
    r.fail("malformed boolean: '" + std::string(s) + "'");
}

std::optional<std::string> opt_field(std::string_view s) {
    if (s.empty()) return std::nullopt;
    return std::string(s);
}

std::string opt_str(const std::optional<std::string>& s) {
    return s ? *s : std::string();
}

}  // namespace

std::vector<APCEvent> parse_apc_file(const std::filesystem::path& path,
                                     const StationRegistry* registry) {
    LineReader r(path);
    r.expect_header(kApcHeader);
    std::vector<APCEvent> out;
    std::string line;
    while (r.next(line)) {
        auto const f = split_fields(line);
        if (f.size() != 7) r.fail("expected 7 fields, got " + std::to_string(f.size()));
        try {
            APCEvent e;
            e.route_id = std::string(f[0]);
            e.trip_id = std::string(f[1]);
            e.station_id = std::string(f[2]);
            e.timestamp = parse_iso_datetime(f[3]);
            e.boardings = parse_int(f[4], "boardings");
            e.alightings = parse_int(f[5], "alightings");
            e.imputed = parse_bool(f[6], r);
            if (e.boardings < 0 || e.alightings < 0) r.fail("negative passenger count");
            if (registry != nullptr && !registry->contains(e.station_id)) {
                r.fail("unknown station_id: " + e.station_id);
            }
            out.push_back(std::move(e));
        } catch (const InputError& err) {
            if (std::string_view(err.what()).starts_with(r.path)) throw;
            r.fail(err.what());
        }
    }
    return out;
}

TraceParse parse_trace_file(const std::filesystem::path& path) {
    LineReader r(path);
    r.expect_header(kTraceHeader);
    TraceParse out;
    std::string line;
    while (r.next(line)) {
        auto const f = split_fields(line);
        if (f.size() != 12) r.fail("expected 12 fields, got " + std::to_string(f.size()));
        try {
            RawLegRecord rec;
            rec.device_tag = std::string(f[0]);
            rec.date = parse_iso_date(f[1]);
            rec.mode = parse_mode(f[2], &out.unknown_mode_count);
            rec.start_time = parse_iso_datetime(f[3]);
            rec.end_time = parse_iso_datetime(f[4]);
            rec.start_lat = parse_double(f[5], "start_lat");
            rec.start_lon = parse_double(f[6], "start_lon");
            rec.end_lat = parse_double(f[7], "end_lat");
            rec.end_lon = parse_double(f[8], "end_lon");
            rec.board_station = opt_field(f[9]);
            rec.alight_station = opt_field(f[10]);
            rec.route_id = opt_field(f[11]);
            if (rec.start_time > rec.end_time) r.fail("leg ends before it starts");
            validate_lat_lon(rec.start_lat, rec.start_lon);
            validate_lat_lon(rec.end_lat, rec.end_lon);
            bool const has_stations = rec.board_station && rec.alight_station;
            if (is_pt_vehicle_mode(rec.mode) != has_stations) {
                r.fail("board/alight stations must be present exactly for PT vehicle legs");
            }
            out.records.push_back(std::move(rec));
        } catch (const InputError& err) {
            if (std::string_view(err.what()).starts_with(r.path)) throw;
            r.fail(err.what());
        }
    }
    return out;
}

StationRegistry parse_station_file(const std::filesystem::path& path) {
    LineReader r(path);
    r.expect_header(kStationHeader);
    std::vector<Station> stations;
    std::string line;
    while (r.next(line)) {
        auto const f = split_fields(line);
        if (f.size() != 4) r.fail("expected 4 fields, got " + std::to_string(f.size()));
        try {
            Station s;
            s.station_id = std::string(f[0]);
            s.name = std::string(f[1]);
            s.lat = parse_double(f[2], "lat");
            s.lon = parse_double(f[3], "lon");
            stations.push_back(std::move(s));
        } catch (const InputError& err) {
            r.fail(err.what());
        }
    }
    return StationRegistry(std::move(stations));
}

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::string_view manifest) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path.string());
    out << manifest;
    return out;
}

}  // namespace

void write_apc_file(const std::filesystem::path& path, std::span<const APCEvent> events,
                    std::string_view manifest) {
    auto out = open_out(path, manifest);
    out << kApcHeader << '\n';
    for (const APCEvent& e : events) {
        out << e.route_id << ',' << e.trip_id << ',' << e.station_id << ','
            << format_iso_datetime(e.timestamp) << ',' << e.boardings << ',' << e.alightings
            << ',' << (e.imputed ? "true" : "false") << '\n';
    }
}

void write_trace_file(const std::filesystem::path& path, std::span<const RawLegRecord> records,
                      std::string_view manifest) {
    auto out = open_out(path, manifest);
    out << kTraceHeader << '\n';
    for (const RawLegRecord& rec : records) {
        out << rec.device_tag << ',' << format_iso_date(rec.date) << ',' << mode_label(rec.mode)
            << ',' << format_iso_datetime(rec.start_time) << ','
            << format_iso_datetime(rec.end_time) << ',' << dtos(rec.start_lat) << ','
            << dtos(rec.start_lon) << ',' << dtos(rec.end_lat) << ',' << dtos(rec.end_lon) << ','
            << opt_str(rec.board_station) << ',' << opt_str(rec.alight_station) << ','
            << opt_str(rec.route_id) << '\n';
    }
}

void write_station_file(const std::filesystem::path& path, const StationRegistry& registry,
                        std::string_view manifest) {
    auto out = open_out(path, manifest);
    out << kStationHeader << '\n';
    for (const Station& s : registry.stations()) {
        out << s.station_id << ',' << s.name << ',' << dtos(s.lat) << ',' << dtos(s.lon) << '\n';
    }
}

std::string device_day_hash(std::string_view device_tag, int64_t date, uint64_t seed) {
    uint64_t h = mix64(seed ^ fnv1a64(device_tag));
    h = mix64(h ^ (static_cast<uint64_t>(date) + 0x9e3779b97f4a7c15ULL));
    return to_hex(h) + to_hex(mix64(h + 0x9e3779b97f4a7c15ULL));
}

std::vector<Leg> anonymize(std::span<const RawLegRecord> records, const ProjectionFrame& frame,
                           uint64_t seed) {
    std::vector<Leg> out;
    out.reserve(records.size());
    for (const RawLegRecord& rec : records) {
        Leg leg;
        leg.device_day_id = device_day_hash(rec.device_tag, rec.date, seed);
        leg.mode = rec.mode;
        if (is_pt_vehicle_mode(rec.mode)) {
            leg.start_time = rec.start_time;
            leg.end_time = rec.end_time;
        } else {
            leg.start_time = round_to_quarter_hour(rec.start_time);
            leg.end_time = round_to_quarter_hour(rec.end_time);
        }
        leg.start_cell = snap_to_cell(rec.start_lat, rec.start_lon, frame);
        leg.end_cell = snap_to_cell(rec.end_lat, rec.end_lon, frame);
        leg.board_station = rec.board_station;
        leg.alight_station = rec.alight_station;
        leg.route_id = rec.route_id;
        out.push_back(std::move(leg));
    }
    return out;
}

std::vector<Leg> filter_weekdays(std::span<const Leg> legs, const Calendar& cal) {
    std::vector<Leg> out;
    for (const Leg& l : legs) {
        if (cal.is_weekday(l.start_time)) out.push_back(l);
    }
    return out;
}

std::vector<APCEvent> filter_weekdays(std::span<const APCEvent> events, const Calendar& cal) {
    std::vector<APCEvent> out;
    for (const APCEvent& e : events) {
        if (cal.is_weekday(e.timestamp)) out.push_back(e);
    }
    return out;
}

}  // namespace tfuse
