#pragma once

#include <optional>
#include <span>

#include "transit_fuse/chains.hpp"
#include "transit_fuse/model.hpp"

namespace tfuse {

// Square trip-count matrix over an ordered station list; T[i][j] counts
// train legs boarding at i and alighting at j. Diagonal stays zero.
struct ODMatrix {
    std::vector<std::string> stations;
    std::vector<double> counts;  // row-major, stations.size()^2

    size_t size() const { return stations.size(); }
    double& at(size_t i, size_t j) { return counts[i * stations.size() + j]; }
    double at(size_t i, size_t j) const { return counts[i * stations.size() + j]; }
    std::optional<size_t> index_of(const std::string& station_id) const;
    double total() const;
    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;
};

// Builds T from contexts. With an explicit station list the matrix covers
// exactly those stations (unknown stations in contexts are an error);
// otherwise the observed stations, sorted by id.
ODMatrix build_od(std::span<const TrainLegContext> contexts,
                  std::vector<std::string> station_ids = {});

struct ScaledOD {
    ODMatrix od;
    std::vector<std::string> zero_row_stations;  // trace row empty, left as zeros
};

// Row i of the result redistributes the APC boardings of station i over the
// trace row proportions.
ScaledOD scale_od(const ODMatrix& od, const std::map<std::string, double>& apc_boardings);

struct Histogram {
    std::vector<double> edges;    // bin i covers [edges[i], edges[i+1])
    std::vector<int64_t> counts;  // edges.size() - 1 entries
};

Histogram fixed_width_histogram(std::span<const double> values, double width);
Histogram log2_histogram(std::span<const double> values);

struct DistributionSummary {
    std::vector<double> values;
    std::optional<double> mean;  // empty when there are no samples
    double max = 0.0;
    Histogram histogram;

    size_t n() const { return values.size(); }
};

// Train-leg durations in minutes; non-positive durations are excluded and
// counted in *excluded when provided.
DistributionSummary travel_time_distribution(std::span<const TrainLegContext> contexts,
                                             int64_t* excluded = nullptr);

// Great-circle km between board and alight station coordinates.
DistributionSummary travel_distance_distribution(std::span<const TrainLegContext> contexts,
                                                 const StationRegistry& registry);

// Distribution of the nonzero entries of T.
DistributionSummary flow_distribution(const ODMatrix& od);

}  // namespace tfuse
