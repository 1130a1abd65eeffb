#include "transit_fuse/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "transit_fuse/error.hpp"

namespace tfuse {

std::optional<size_t> ODMatrix::index_of(const std::string& station_id) const {
    auto const it = std::lower_bound(stations.begin(), stations.end(), station_id);
    if (it == stations.end() || *it != station_id) return std::nullopt;
    return static_cast<size_t>(it - stations.begin());
}

double ODMatrix::total() const {
    double t = 0.0;
    for (double c : counts) t += c;
    return t;
}

std::vector<double> ODMatrix::row_sums() const {
    std::vector<double> sums(size(), 0.0);
    for (size_t i = 0; i < size(); ++i) {
        for (size_t j = 0; j < size(); ++j) sums[i] += at(i, j);
    }
    return sums;
}

std::vector<double> ODMatrix::col_sums() const {
    std::vector<double> sums(size(), 0.0);
    for (size_t i = 0; i < size(); ++i) {
        for (size_t j = 0; j < size(); ++j) sums[j] += at(i, j);
    }
    return sums;
}

ODMatrix build_od(std::span<const TrainLegContext> contexts,
                  std::vector<std::string> station_ids) {
    ODMatrix od;
    bool const explicit_stations = !station_ids.empty();
    if (explicit_stations) {
        std::sort(station_ids.begin(), station_ids.end());
        station_ids.erase(std::unique(station_ids.begin(), station_ids.end()),
                          station_ids.end());
        od.stations = std::move(station_ids);
    } else {
        std::set<std::string> seen;
        for (const TrainLegContext& c : contexts) {
            seen.insert(c.board_station);
            seen.insert(c.alight_station);
        }
        od.stations.assign(seen.begin(), seen.end());
    }
    od.counts.assign(od.size() * od.size(), 0.0);
    for (const TrainLegContext& c : contexts) {
        auto const i = od.index_of(c.board_station);
        auto const j = od.index_of(c.alight_station);
        if (!i || !j) {
            throw InputError("context references station outside the OD station list: " +
                             (i ? c.alight_station : c.board_station));
        }
        od.at(*i, *j) += 1.0;
    }
    return od;
}

ScaledOD scale_od(const ODMatrix& od, const std::map<std::string, double>& apc_boardings) {
    ScaledOD out;
    out.od.stations = od.stations;
    out.od.counts.assign(od.counts.size(), 0.0);
    for (size_t i = 0; i < od.size(); ++i) {
        double row_total = 0.0;
        for (size_t j = 0; j < od.size(); ++j) row_total += od.at(i, j);
        if (row_total == 0.0) {
            out.zero_row_stations.push_back(od.stations[i]);
            continue;
        }
        auto const it = apc_boardings.find(od.stations[i]);
        if (it == apc_boardings.end()) {
            throw InputError("APC boardings missing for station with trace flow: " +
                             od.stations[i]);
        }
        for (size_t j = 0; j < od.size(); ++j) {
            out.od.at(i, j) = it->second * od.at(i, j) / row_total;
        }
    }
    return out;
}

Histogram fixed_width_histogram(std::span<const double> values, double width) {
    Histogram h;
    if (values.empty()) return h;
    double const max_v = *std::max_element(values.begin(), values.end());
    size_t const n_bins = static_cast<size_t>(std::floor(max_v / width)) + 1;
    h.edges.resize(n_bins + 1);
    for (size_t i = 0; i <= n_bins; ++i) h.edges[i] = static_cast<double>(i) * width;
    h.counts.assign(n_bins, 0);
    for (double v : values) {
        size_t bin = static_cast<size_t>(std::floor(v / width));
        if (bin >= n_bins) bin = n_bins - 1;
        ++h.counts[bin];
    }
    return h;
}

Histogram log2_histogram(std::span<const double> values) {
    Histogram h;
    if (values.empty()) return h;
    double const max_v = *std::max_element(values.begin(), values.end());
    // edges 0, 1, 2, 4, 8, ... ending strictly above max_v
    h.edges.push_back(0.0);
    double top = 1.0;
    h.edges.push_back(top);
    while (top <= max_v) {
        top *= 2.0;
        h.edges.push_back(top);
    }
    h.counts.assign(h.edges.size() - 1, 0);
    for (double v : values) {
        size_t bin = 0;
        while (bin + 2 < h.edges.size() && v >= h.edges[bin + 1]) ++bin;
        ++h.counts[bin];
    }
    return h;
}

namespace {

DistributionSummary summarize(std::vector<double> values, bool log_bins, double width) {
    DistributionSummary s;
    s.values = std::move(values);
    if (s.values.empty()) return s;
    double sum = 0.0;
    s.max = s.values.front();
    for (double v : s.values) {
        sum += v;
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(s.values.size());
    s.histogram = log_bins ? log2_histogram(s.values) : fixed_width_histogram(s.values, width);
    return s;
}

}  // namespace

DistributionSummary travel_time_distribution(std::span<const TrainLegContext> contexts,
                                             int64_t* excluded) {
    std::vector<double> minutes;
    minutes.reserve(contexts.size());
    for (const TrainLegContext& c : contexts) {
        int64_t const dur = c.alight_time - c.board_time;
        if (dur <= 0) {
            if (excluded != nullptr) ++*excluded;
            continue;
        }
        minutes.push_back(static_cast<double>(dur) / 60.0);
    }
    return summarize(std::move(minutes), false, 1.0);
}

DistributionSummary travel_distance_distribution(std::span<const TrainLegContext> contexts,
                                                 const StationRegistry& registry) {
    std::vector<double> km;
    km.reserve(contexts.size());
    for (const TrainLegContext& c : contexts) {
        const Station& b = registry.at(c.board_station);
        const Station& a = registry.at(c.alight_station);
        km.push_back(haversine_km(b.coords(), a.coords()));
    }
    return summarize(std::move(km), false, 1.0);
}

DistributionSummary flow_distribution(const ODMatrix& od) {
    std::vector<double> flows;
    for (double c : od.counts) {
        if (c > 0.0) flows.push_back(c);
    }
    return summarize(std::move(flows), true, 1.0);
}

}  // namespace tfuse
