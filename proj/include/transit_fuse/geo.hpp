#pragma once

#include <compare>
#include <cstdint>

namespace tfuse {

constexpr double kEarthRadiusKm = 6371.0;
constexpr double kEarthRadiusM = 6371000.0;
constexpr double kCellSizeM = 250.0;

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

void validate_lat_lon(double lat, double lon);

// Great-circle distance on a sphere of radius 6371 km.
double haversine_km(const LatLon& a, const LatLon& b);

// One 250 m x 250 m square of the analysis grid.
struct GridCell {
    int32_t ix = 0;
    int32_t iy = 0;
    friend auto operator<=>(const GridCell&, const GridCell&) = default;
};

// Equirectangular local frame anchored at (lat0, lon0): x east, y north,
// in metres. Adequate at metro scale; the anchor is configured per run and
// echoed into every output header since all cell ids depend on it.
struct ProjectionFrame {
    double lat0 = 0.0;
    double lon0 = 0.0;

    void to_local(const LatLon& p, double& x, double& y) const;
    LatLon from_local(double x, double y) const;
    GridCell snap(const LatLon& p) const;
    LatLon cell_centroid(const GridCell& c) const;

    friend bool operator==(const ProjectionFrame&, const ProjectionFrame&) = default;
};

GridCell snap_to_cell(double lat, double lon, const ProjectionFrame& frame);

}  // namespace tfuse
