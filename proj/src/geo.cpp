#include "transit_fuse/geo.hpp"

#include <cmath>
#include <string>

#include "transit_fuse/error.hpp"

namespace tfuse {

namespace {
constexpr double kDegToRad = 0.017453292519943295;
}

void validate_lat_lon(double lat, double lon) {
    if (!(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0)) {
        throw InputError("coordinate out of range: lat=" + std::to_string(lat) +
                         " lon=" + std::to_string(lon));
    }
}

double haversine_km(const LatLon& a, const LatLon& b) {
    double const phi1 = a.lat * kDegToRad;
    double const phi2 = b.lat * kDegToRad;
    double const dphi = (b.lat - a.lat) * kDegToRad;
    double const dlam = (b.lon - a.lon) * kDegToRad;
    double const sp = std::sin(dphi / 2.0);
    double const sl = std::sin(dlam / 2.0);
    double const h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
    return 2.0 * kEarthRadiusKm * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

void ProjectionFrame::to_local(const LatLon& p, double& x, double& y) const {
    x = kEarthRadiusM * (p.lon - lon0) * kDegToRad * std::cos(lat0 * kDegToRad);
    y = kEarthRadiusM * (p.lat - lat0) * kDegToRad;
}

LatLon ProjectionFrame::from_local(double x, double y) const {
    LatLon p;
    p.lon = lon0 + x / (kEarthRadiusM * kDegToRad * std::cos(lat0 * kDegToRad));
    p.lat = lat0 + y / (kEarthRadiusM * kDegToRad);
    return p;
}

GridCell ProjectionFrame::snap(const LatLon& p) const {
    double x = 0.0, y = 0.0;
    to_local(p, x, y);
    return {static_cast<int32_t>(std::floor(x / kCellSizeM)),
            static_cast<int32_t>(std::floor(y / kCellSizeM))};
}

LatLon ProjectionFrame::cell_centroid(const GridCell& c) const {
    return from_local((c.ix + 0.5) * kCellSizeM, (c.iy + 0.5) * kCellSizeM);
}

GridCell snap_to_cell(double lat, double lon, const ProjectionFrame& frame) {
    validate_lat_lon(lat, lon);
    return frame.snap({lat, lon});
}

}  // namespace tfuse
