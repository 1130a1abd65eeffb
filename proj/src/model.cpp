#include "transit_fuse/model.hpp"

#include <algorithm>

#include "transit_fuse/error.hpp"

namespace tfuse {

namespace {
constexpr std::array<std::string_view, kNumModes> kModeLabels = {
    "Bus", "PrivateCar", "Cycling", "Subway", "Train", "Tram", "Walking", "Unknown"};
}

std::string_view mode_label(TravelMode m) {
    return kModeLabels[static_cast<size_t>(m)];
}

TravelMode parse_mode(std::string_view label, int64_t* unknown_counter) {
    for (size_t i = 0; i < kNumModes; ++i) {
        if (kModeLabels[i] == label) return static_cast<TravelMode>(i);
    }
    if (unknown_counter != nullptr) ++*unknown_counter;
    return TravelMode::Unknown;
}

StationRegistry::StationRegistry(std::vector<Station> stations)
    : stations_(std::move(stations)) {
    std::sort(stations_.begin(), stations_.end(),
              [](const Station& a, const Station& b) { return a.station_id < b.station_id; });
    for (size_t i = 0; i < stations_.size(); ++i) {
        const Station& s = stations_[i];
        validate_lat_lon(s.lat, s.lon);
        if (!index_.emplace(s.station_id, i).second) {
            throw InputError("duplicate station_id: " + s.station_id);
        }
    }
}

const Station* StationRegistry::find(const std::string& id) const {
    auto const it = index_.find(id);
    return it == index_.end() ? nullptr : &stations_[it->second];
}

const Station& StationRegistry::at(const std::string& id) const {
    const Station* s = find(id);
    if (s == nullptr) throw InputError("unknown station_id: " + id);
    return *s;
}

std::vector<std::string> StationRegistry::ids() const {
    std::vector<std::string> out;
    out.reserve(stations_.size());
    for (const Station& s : stations_) out.push_back(s.station_id);
    return out;
}

}  // namespace tfuse
