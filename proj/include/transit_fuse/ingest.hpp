#pragma once

#include <filesystem>
#include <span>
#include <string_view>

#include "transit_fuse/model.hpp"

namespace tfuse {

// One parsed trace row, before privacy coarsening.
struct RawLegRecord {
    std::string device_tag;
    int64_t date = 0;  // day number of the share date
    TravelMode mode = TravelMode::Unknown;
    Timestamp start_time = 0;
    Timestamp end_time = 0;
    double start_lat = 0.0, start_lon = 0.0;
    double end_lat = 0.0, end_lon = 0.0;
    std::optional<std::string> board_station;
    std::optional<std::string> alight_station;
    std::optional<std::string> route_id;
};

inline constexpr std::string_view kApcHeader =
    "route_id,trip_id,station_id,timestamp,boardings,alightings,imputed";
inline constexpr std::string_view kTraceHeader =
    "device_tag,date,mode,start_time,end_time,start_lat,start_lon,end_lat,end_lon,"
    "board_station,alight_station,route_id";
inline constexpr std::string_view kStationHeader = "station_id,name,lat,lon";

// When a registry is given, every station_id is checked against it.
std::vector<APCEvent> parse_apc_file(const std::filesystem::path& path,
                                     const StationRegistry* registry = nullptr);

struct TraceParse {
    std::vector<RawLegRecord> records;
    int64_t unknown_mode_count = 0;
};
TraceParse parse_trace_file(const std::filesystem::path& path);

StationRegistry parse_station_file(const std::filesystem::path& path);

// Writers used by the generator and by round-trip tests. `manifest` lines
// (if any) are emitted as leading '#' comments, which all parsers skip.
void write_apc_file(const std::filesystem::path& path, std::span<const APCEvent> events,
                    std::string_view manifest = {});
void write_trace_file(const std::filesystem::path& path, std::span<const RawLegRecord> records,
                      std::string_view manifest = {});
void write_station_file(const std::filesystem::path& path, const StationRegistry& registry,
                        std::string_view manifest = {});

// Keyed hash of (device tag, date): stable within a day, unlinkable across
// days. 32 hex chars.
std::string device_day_hash(std::string_view device_tag, int64_t date, uint64_t seed);

// Privacy coarsening: opaque daily ids, grid-cell endpoints, quarter-hour
// timestamps for legs outside the PT vehicle network. Output carries no raw
// coordinates or device tags.
std::vector<Leg> anonymize(std::span<const RawLegRecord> records, const ProjectionFrame& frame,
                           uint64_t seed);

std::vector<Leg> filter_weekdays(std::span<const Leg> legs, const Calendar& cal);
std::vector<APCEvent> filter_weekdays(std::span<const APCEvent> events, const Calendar& cal);

}  // namespace tfuse
