#include "transit_fuse/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "transit_fuse/error.hpp"

namespace tfuse {

std::vector<double> average_ranks(std::span<const double> v) {
    size_t const n = v.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });

    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        double const avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

namespace {

// Regularized incomplete beta via Lentz's continued fraction.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;
    double const qab = a + b;
    double const qap = a + 1.0;
    double const qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int const m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double const del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double const ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    double const front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double correlation_p(double r, size_t n) {
    if (n < 3) return std::fabs(r) >= 1.0 ? 0.0 : 1.0;
    double const df = static_cast<double>(n - 2);
    if (std::fabs(r) >= 1.0) return 0.0;
    double const t = r * std::sqrt(df / (1.0 - r * r));
    return students_t_two_sided_p(t, df);
}

double product_moment(std::span<const double> x, std::span<const double> y) {
    size_t const n = x.size();
    double const mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double const my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double const dx = x[i] - mx;
        double const dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw InputError("correlation undefined: zero variance");
    }
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

void check_series(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InputError("series length mismatch");
    if (x.size() < 2) throw InsufficientDataError("need at least 2 observations");
    for (size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw InputError("non-finite value in series");
        }
    }
}

}  // namespace

double students_t_two_sided_p(double t, double df) {
    if (df <= 0.0) return 1.0;
    double const x = df / (df + t * t);
    return incomplete_beta(df / 2.0, 0.5, x);
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
    check_series(x, y);
    double const r = product_moment(x, y);
    return {r, correlation_p(r, x.size())};
}

Correlation spearman(std::span<const double> x, std::span<const double> y) {
    check_series(x, y);
    auto const rx = average_ranks(x);
    auto const ry = average_ranks(y);
    double r = 0.0;
    try {
        r = product_moment(rx, ry);
    } catch (const InputError&) {
        throw InputError("spearman undefined: zero rank variance");
    }
    return {r, correlation_p(r, x.size())};
}

OlsFit ols_fit(std::span<const double> x, std::span<const double> y) {
    check_series(x, y);
    size_t const n = x.size();
    double const mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double const my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw InputError("singular fit: zero variance in x");

    OlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double const e = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += e * e;
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    fit.r_squared = ss_tot == 0.0 ? 0.0 : 1.0 - ss_res / ss_tot;
    return fit;
}

std::string_view spatial_name(SpatialLevel s) {
    return s == SpatialLevel::Route ? "route" : "station";
}
std::string_view temporal_name(TemporalLevel t) {
    return t == TemporalLevel::Weekday ? "weekday" : "hour";
}
std::string_view event_name(EventType e) {
    switch (e) {
        case EventType::Boardings: return "boardings";
        case EventType::Alightings: return "alightings";
        default: return "both";
    }
}

namespace {

std::string make_key(const std::string& group, TemporalLevel tp, int hour, EventType ev,
                     bool alighting) {
    std::string key = group;
    if (tp == TemporalLevel::Hour) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "|h%02d", hour);
        key += buf;
    }
    if (ev == EventType::Both) key += alighting ? "|A" : "|B";
    return key;
}

}  // namespace

CountTable aggregate_trace_counts(std::span<const TrainLegContext> contexts, SpatialLevel sp,
                                  TemporalLevel tp, EventType ev, const Calendar& cal) {
    CountTable table;
    for (const TrainLegContext& c : contexts) {
        if (sp == SpatialLevel::Route && !c.route_id) continue;
        if (ev == EventType::Boardings || ev == EventType::Both) {
            std::string const group = sp == SpatialLevel::Route ? *c.route_id : c.board_station;
            table[make_key(group, tp, cal.hour_of_day(c.board_time), ev, false)] += 1.0;
        }
        if (ev == EventType::Alightings || ev == EventType::Both) {
            std::string const group = sp == SpatialLevel::Route ? *c.route_id : c.alight_station;
            table[make_key(group, tp, cal.hour_of_day(c.alight_time), ev, true)] += 1.0;
        }
    }
    return table;
}

CountTable aggregate_apc_counts(std::span<const APCEvent> events, SpatialLevel sp,
                                TemporalLevel tp, EventType ev, const Calendar& cal) {
    CountTable table;
    for (const APCEvent& e : events) {
        std::string const group = sp == SpatialLevel::Route ? e.route_id : e.station_id;
        int const hour = cal.hour_of_day(e.timestamp);
        if (ev == EventType::Boardings || ev == EventType::Both) {
            table[make_key(group, tp, hour, ev, false)] += static_cast<double>(e.boardings);
        }
        if (ev == EventType::Alightings || ev == EventType::Both) {
            table[make_key(group, tp, hour, ev, true)] += static_cast<double>(e.alightings);
        }
    }
    return table;
}

ValidationReport validate(const CountTable& trace, const CountTable& apc) {
    std::vector<double> x, y;
    int64_t dropped_trace = 0;
    for (const auto& [key, count] : trace) {
        auto const it = apc.find(key);
        if (it == apc.end()) {
            ++dropped_trace;
            continue;
        }
        x.push_back(count);
        y.push_back(it->second);
    }
    int64_t const dropped_apc =
        static_cast<int64_t>(apc.size()) + dropped_trace - static_cast<int64_t>(trace.size());

    if (x.size() < 2) {
        throw InsufficientDataError("validation needs at least 2 shared aggregation keys, got " +
                                    std::to_string(x.size()));
    }

    ValidationReport rep;
    auto const s = spearman(x, y);
    auto const p = pearson(x, y);
    auto const fit = ols_fit(x, y);
    rep.spearman = s.value;
    rep.spearman_p = s.p_value;
    rep.pearson = p.value;
    rep.pearson_p = p.p_value;
    rep.r_squared = fit.r_squared;
    rep.slope = fit.slope;
    rep.intercept = fit.intercept;
    rep.n = static_cast<int64_t>(x.size());
    rep.dropped_trace = dropped_trace;
    rep.dropped_apc = dropped_apc;
    return rep;
}

std::vector<ValidationRow> validation_table(std::span<const TrainLegContext> contexts,
                                            std::span<const APCEvent> events,
                                            const Calendar& cal) {
    struct Combo {
        SpatialLevel sp;
        TemporalLevel tp;
        EventType ev;
    };
    constexpr Combo kCombos[] = {
        {SpatialLevel::Route, TemporalLevel::Weekday, EventType::Both},
        {SpatialLevel::Route, TemporalLevel::Hour, EventType::Both},
        {SpatialLevel::Station, TemporalLevel::Weekday, EventType::Boardings},
        {SpatialLevel::Station, TemporalLevel::Weekday, EventType::Alightings},
        {SpatialLevel::Station, TemporalLevel::Hour, EventType::Boardings},
        {SpatialLevel::Station, TemporalLevel::Hour, EventType::Alightings},
    };
    std::vector<ValidationRow> rows;
    for (const Combo& c : kCombos) {
        auto const trace = aggregate_trace_counts(contexts, c.sp, c.tp, c.ev, cal);
        auto const apc = aggregate_apc_counts(events, c.sp, c.tp, c.ev, cal);
        rows.push_back({c.sp, c.tp, c.ev, validate(trace, apc)});
    }
    return rows;
}

}  // namespace tfuse
