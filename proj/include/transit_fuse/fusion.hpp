#pragma once

#include <span>
#include <string>
#include <vector>

#include "transit_fuse/coverage.hpp"

namespace tfuse {

// Frozen feature layout: 8 access-mode shares, 8 egress-mode shares, then
// the six catchment metrics. Downstream exports depend on this order.
std::vector<std::string> fusion_feature_names();
constexpr size_t kNumFusionFeatures = 22;

struct FeatureMatrix {
    std::vector<std::string> station_ids;
    std::vector<std::string> feature_names;
    std::vector<double> x;  // row-major, station_ids.size() x feature_names.size()
    std::vector<double> boardings;
    std::vector<double> alightings;

    size_t rows() const { return station_ids.size(); }
    size_t cols() const { return feature_names.size(); }
    double at(size_t i, size_t j) const { return x[i * cols() + j]; }
};

struct FeatureBuild {
    FeatureMatrix matrix;
    std::vector<std::string> excluded_no_trace;  // stations without trace observations
    std::vector<std::string> excluded_no_apc;    // stations missing from APC totals
};

// Assembles the station feature matrix with APC weekday totals as targets.
// Fewer than 10 shared stations is an insufficient-data error.
FeatureBuild build_features(std::span<const StationProfile> profiles,
                            const std::map<std::string, double>& apc_boardings,
                            const std::map<std::string, double>& apc_alightings);

struct ForestParams {
    int n_trees = 500;
    int max_depth = -1;  // unlimited
    int min_leaf = 2;
    int mtry = 0;  // 0 = ceil(n_features / 3)
    bool bootstrap = true;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf mean

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;     // nodes[0] is the root
    std::vector<uint8_t> oob_rows;   // per training row: 1 = out of bag
};

struct Forest {
    ForestParams params;
    uint64_t seed = 0;
    size_t n_features = 0;
    size_t n_train = 0;
    std::vector<std::string> feature_names;
    std::vector<Tree> trees;
};

// Borrowed row-major matrix view.
struct MatrixView {
    const double* data = nullptr;
    size_t n_rows = 0;
    size_t n_cols = 0;

    double at(size_t i, size_t j) const { return data[i * n_cols + j]; }
};

MatrixView features_view(const FeatureMatrix& m);

// Variance-reduction CART trees on bootstrap samples, mtry features per
// split. Deterministic: tree t uses the derived seed (seed, t).
Forest fit_forest(MatrixView x, std::span<const double> y, const ForestParams& params,
                  uint64_t seed, std::vector<std::string> feature_names = {});

double predict_row(const Forest& forest, std::span<const double> row);
std::vector<double> predict(const Forest& forest, MatrixView x);

double r_squared(const Forest& forest, MatrixView x, std::span<const double> y);

// R^2 over out-of-bag predictions; x/y must be the training data.
double oob_r_squared(const Forest& forest, MatrixView x, std::span<const double> y);

// Mean MSE increase per feature after shuffling that column, over n_repeats
// seeded shuffles. A feature no tree consults scores exactly 0.
std::vector<double> permutation_importance(const Forest& forest, MatrixView x,
                                           std::span<const double> y, int n_repeats,
                                           uint64_t seed);

// Share of non-leaf nodes splitting on each feature; sums to 1 when the
// forest has at least one split, all zeros otherwise.
std::vector<double> split_frequency_importance(const Forest& forest);

struct PdpPoint {
    double grid_value = 0.0;
    double mean_prediction = 0.0;
};

// Mean prediction as feature `feature` sweeps grid_size equally spaced
// values over its observed range; a constant column yields a single point.
std::vector<PdpPoint> partial_dependence(const Forest& forest, MatrixView x, size_t feature,
                                         int grid_size);

std::string forest_to_json(const Forest& forest, std::string_view target_name);

}  // namespace tfuse
