#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "transit_fuse/chains.hpp"
#include "transit_fuse/model.hpp"

namespace tfuse {

struct Correlation {
    double value = 0.0;
    double p_value = 1.0;  // two-sided, t-approximation
};

// Average ranks (1-based); ties receive the mean of their rank range.
std::vector<double> average_ranks(std::span<const double> v);

Correlation pearson(std::span<const double> x, std::span<const double> y);
Correlation spearman(std::span<const double> x, std::span<const double> y);

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;  // 0 by convention when var(y) == 0
};

OlsFit ols_fit(std::span<const double> x, std::span<const double> y);

// Two-sided tail probability of Student's t with df degrees of freedom.
double students_t_two_sided_p(double t, double df);

// ---- representativeness validation (trace vs APC count tables) ----

enum class SpatialLevel { Route, Station };
enum class TemporalLevel { Weekday, Hour };
enum class EventType { Boardings, Alightings, Both };

std::string_view spatial_name(SpatialLevel s);
std::string_view temporal_name(TemporalLevel t);
std::string_view event_name(EventType e);

// Aggregation key -> count. Keys are "<group>" or "<group>|h<hh>" plus a
// "|B"/"|A" suffix when boardings and alightings are stacked.
using CountTable = std::map<std::string, double>;

CountTable aggregate_trace_counts(std::span<const TrainLegContext> contexts, SpatialLevel sp,
                                  TemporalLevel tp, EventType ev, const Calendar& cal);
CountTable aggregate_apc_counts(std::span<const APCEvent> events, SpatialLevel sp,
                                TemporalLevel tp, EventType ev, const Calendar& cal);

struct ValidationReport {
    double spearman = 0.0;
    double spearman_p = 1.0;
    double pearson = 0.0;
    double pearson_p = 1.0;
    double r_squared = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    int64_t n = 0;              // shared keys
    int64_t dropped_trace = 0;  // keys present only in the trace table
    int64_t dropped_apc = 0;    // keys present only in the APC table
};

// Joins the two tables on shared keys and regresses APC on trace.
// Fewer than two shared keys is an insufficient-data error.
ValidationReport validate(const CountTable& trace, const CountTable& apc);

struct ValidationRow {
    SpatialLevel spatial;
    TemporalLevel temporal;
    EventType event;
    ValidationReport report;
};

// The six route/station x weekday/hour combinations of the standard report.
// Route-level rows stack boardings and alightings as separate observations.
std::vector<ValidationRow> validation_table(std::span<const TrainLegContext> contexts,
                                            std::span<const APCEvent> events,
                                            const Calendar& cal);

}  // namespace tfuse
