#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "transit_fuse/geo.hpp"
#include "transit_fuse/timeutil.hpp"

namespace tfuse {

// Closed set of eight travel modes. The order is frozen: it defines the
// layout of every access/egress mode vector downstream.
enum class TravelMode : uint8_t {
    Bus = 0,
    PrivateCar,
    Cycling,
    Subway,
    Train,
    Tram,
    Walking,
    Unknown,
};

constexpr size_t kNumModes = 8;

std::string_view mode_label(TravelMode m);

// Any label outside the closed set maps to Unknown and increments
// *unknown_counter when provided.
TravelMode parse_mode(std::string_view label, int64_t* unknown_counter = nullptr);

// Modes travelled inside a PT vehicle; their legs carry board/alight
// stations and keep full-resolution timestamps through anonymization.
constexpr bool is_pt_vehicle_mode(TravelMode m) {
    return m == TravelMode::Bus || m == TravelMode::Subway || m == TravelMode::Train ||
           m == TravelMode::Tram;
}

struct Station {
    std::string station_id;
    std::string name;
    double lat = 0.0;
    double lon = 0.0;

    LatLon coords() const { return {lat, lon}; }
};

class StationRegistry {
public:
    StationRegistry() = default;
    explicit StationRegistry(std::vector<Station> stations);

    const Station* find(const std::string& id) const;
    const Station& at(const std::string& id) const;  // throws InputError naming the id
    bool contains(const std::string& id) const { return find(id) != nullptr; }

    // Stations sorted by id.
    const std::vector<Station>& stations() const { return stations_; }
    std::vector<std::string> ids() const;
    size_t size() const { return stations_.size(); }

private:
    std::vector<Station> stations_;
    std::map<std::string, size_t> index_;
};

// One segment of a journey after privacy coarsening.
struct Leg {
    std::string device_day_id;
    TravelMode mode = TravelMode::Unknown;
    Timestamp start_time = 0;
    Timestamp end_time = 0;
    GridCell start_cell;
    GridCell end_cell;
    std::optional<std::string> board_station;   // present iff PT vehicle mode
    std::optional<std::string> alight_station;  // present iff PT vehicle mode
    std::optional<std::string> route_id;
};

struct TripChain {
    std::string device_day_id;
    std::vector<Leg> legs;  // time-ordered, non-overlapping
};

// One per-stop counter record of a train trip.
struct APCEvent {
    std::string route_id;
    std::string trip_id;
    std::string station_id;
    Timestamp timestamp = 0;
    int64_t boardings = 0;
    int64_t alightings = 0;
    bool imputed = false;
};

}  // namespace tfuse
