#include "transit_fuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "transit_fuse/error.hpp"
#include "transit_fuse/rng.hpp"

namespace tfuse {

std::vector<std::string> fusion_feature_names() {
    std::vector<std::string> names;
    names.reserve(kNumFusionFeatures);
    for (size_t i = 0; i < kNumModes; ++i) {
        std::string label(mode_label(static_cast<TravelMode>(i)));
        std::transform(label.begin(), label.end(), label.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        names.push_back("access_" + label);
    }
    for (size_t i = 0; i < kNumModes; ++i) {
        std::string label(mode_label(static_cast<TravelMode>(i)));
        std::transform(label.begin(), label.end(), label.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        names.push_back("egress_" + label);
    }
    names.insert(names.end(), {"n_origin", "n_destination", "gini_origin", "gini_destination",
                               "rg_origin", "rg_destination"});
    return names;
}

FeatureBuild build_features(std::span<const StationProfile> profiles,
                            const std::map<std::string, double>& apc_boardings,
                            const std::map<std::string, double>& apc_alightings) {
    FeatureBuild out;
    out.matrix.feature_names = fusion_feature_names();
    for (const StationProfile& p : profiles) {
        if (p.n_origin == 0 && p.n_destination == 0) {
            out.excluded_no_trace.push_back(p.station_id);
            continue;
        }
        auto const bit = apc_boardings.find(p.station_id);
        auto const ait = apc_alightings.find(p.station_id);
        if (bit == apc_boardings.end() || ait == apc_alightings.end()) {
            out.excluded_no_apc.push_back(p.station_id);
            continue;
        }
        out.matrix.station_ids.push_back(p.station_id);
        for (double v : p.access_modes) out.matrix.x.push_back(v);
        for (double v : p.egress_modes) out.matrix.x.push_back(v);
        out.matrix.x.push_back(static_cast<double>(p.n_origin));
        out.matrix.x.push_back(static_cast<double>(p.n_destination));
        out.matrix.x.push_back(p.gini_origin);
        out.matrix.x.push_back(p.gini_destination);
        out.matrix.x.push_back(p.rg_origin_km);
        out.matrix.x.push_back(p.rg_destination_km);
        out.matrix.boardings.push_back(bit->second);
        out.matrix.alightings.push_back(ait->second);
    }
    if (out.matrix.rows() < 10) {
        throw InsufficientDataError("feature matrix needs >= 10 stations, got " +
                                    std::to_string(out.matrix.rows()));
    }
    return out;
}

MatrixView features_view(const FeatureMatrix& m) {
    return {m.x.data(), m.rows(), m.cols()};
}

namespace {

struct TreeBuilder {
    MatrixView x;
    std::span<const double> y;
    const ForestParams& params;
    size_t mtry;
    Rng& rng;
    Tree& tree;
    std::vector<size_t> feature_pool;  // scratch for mtry sampling

    struct Split {
        bool found = false;
        size_t feature = 0;
        double threshold = 0.0;
        double sse = 0.0;
    };

    // rows may contain duplicates (bootstrap multiset)
    int build(std::vector<size_t>& rows, int depth) {
        double const mean = row_mean(rows);
        double node_sse = 0.0;
        for (size_t r : rows) node_sse += (y[r] - mean) * (y[r] - mean);
        bool const at_depth_limit = params.max_depth >= 0 && depth >= params.max_depth;
        int const node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({-1, 0.0, -1, -1, mean});
        if (at_depth_limit || node_sse == 0.0 ||
            rows.size() < 2 * static_cast<size_t>(params.min_leaf)) {
            return node_id;
        }
        Split const split = best_split(rows);
        if (!split.found) return node_id;

        std::vector<size_t> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (size_t r : rows) {
            (x.at(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        tree.nodes[node_id].feature = static_cast<int>(split.feature);
        tree.nodes[node_id].threshold = split.threshold;
        int const left = build(left_rows, depth + 1);
        tree.nodes[node_id].left = left;
        int const right = build(right_rows, depth + 1);
        tree.nodes[node_id].right = right;
        return node_id;
    }

    double row_mean(const std::vector<size_t>& rows) const {
        double sum = 0.0;
        for (size_t r : rows) sum += y[r];
        return sum / static_cast<double>(rows.size());
    }

    Split best_split(const std::vector<size_t>& rows) {
        // partial Fisher-Yates draw of mtry distinct features, then sorted
        // so that candidate evaluation order is independent of the draw order
        feature_pool.resize(x.n_cols);
        std::iota(feature_pool.begin(), feature_pool.end(), size_t{0});
        size_t const k = std::min(mtry, feature_pool.size());
        for (size_t i = 0; i < k; ++i) {
            size_t const j = i + rng.below(feature_pool.size() - i);
            std::swap(feature_pool[i], feature_pool[j]);
        }
        std::vector<size_t> candidates(feature_pool.begin(), feature_pool.begin() + k);
        std::sort(candidates.begin(), candidates.end());

        Split best;
        std::vector<std::pair<double, double>> vals;  // (feature value, y)
        for (size_t f : candidates) {
            vals.clear();
            vals.reserve(rows.size());
            for (size_t r : rows) vals.emplace_back(x.at(r, f), y[r]);
            std::sort(vals.begin(), vals.end());

            // prefix sums over the sorted order
            double left_sum = 0.0, left_sq = 0.0;
            double total_sum = 0.0, total_sq = 0.0;
            for (auto const& [xv, yv] : vals) {
                total_sum += yv;
                total_sq += yv * yv;
            }
            size_t const n = vals.size();
            for (size_t i = 0; i + 1 < n; ++i) {
                left_sum += vals[i].second;
                left_sq += vals[i].second * vals[i].second;
                if (vals[i].first == vals[i + 1].first) continue;  // no boundary here
                size_t const nl = i + 1;
                size_t const nr = n - nl;
                if (nl < static_cast<size_t>(params.min_leaf) ||
                    nr < static_cast<size_t>(params.min_leaf)) {
                    continue;
                }
                double const right_sum = total_sum - left_sum;
                double const right_sq = total_sq - left_sq;
                double const sse = (left_sq - left_sum * left_sum / static_cast<double>(nl)) +
                                   (right_sq - right_sum * right_sum / static_cast<double>(nr));
                if (!best.found || sse < best.sse) {
                    best.found = true;
                    best.feature = f;
                    best.threshold = (vals[i].first + vals[i + 1].first) / 2.0;
                    best.sse = sse;
                }
            }
        }
        return best;
    }
};

double mse(std::span<const double> pred, std::span<const double> y) {
    double sum = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        double const e = pred[i] - y[i];
        sum += e * e;
    }
    return sum / static_cast<double>(y.size());
}

double r_squared_of(std::span<const double> pred, std::span<const double> y) {
    double const my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - pred[i]) * (y[i] - pred[i]);
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    return ss_tot == 0.0 ? 0.0 : 1.0 - ss_res / ss_tot;
}

}  // namespace

Forest fit_forest(MatrixView x, std::span<const double> y, const ForestParams& params,
                  uint64_t seed, std::vector<std::string> feature_names) {
    if (x.n_rows != y.size()) throw InputError("fit: row count mismatch");
    if (x.n_rows == 0 || x.n_cols == 0) throw InputError("fit: empty training data");
    if (params.n_trees < 1 || params.min_leaf < 1) throw InputError("fit: bad hyperparameters");
    if (!feature_names.empty() && feature_names.size() != x.n_cols) {
        throw InputError("fit: feature name count mismatch");
    }

    Forest forest;
    forest.params = params;
    forest.seed = seed;
    forest.n_features = x.n_cols;
    forest.n_train = x.n_rows;
    forest.feature_names = std::move(feature_names);
    size_t const mtry = params.mtry > 0
                            ? std::min<size_t>(static_cast<size_t>(params.mtry), x.n_cols)
                            : (x.n_cols + 2) / 3;

    forest.trees.reserve(static_cast<size_t>(params.n_trees));
    for (int t = 0; t < params.n_trees; ++t) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(t)));
        Tree tree;
        tree.oob_rows.assign(x.n_rows, 1);
        std::vector<size_t> rows;
        rows.reserve(x.n_rows);
        if (params.bootstrap) {
            for (size_t i = 0; i < x.n_rows; ++i) {
                size_t const r = rng.below(x.n_rows);
                rows.push_back(r);
                tree.oob_rows[r] = 0;
            }
        } else {
            rows.resize(x.n_rows);
            std::iota(rows.begin(), rows.end(), size_t{0});
            std::fill(tree.oob_rows.begin(), tree.oob_rows.end(), uint8_t{0});
        }
        TreeBuilder builder{x, y, params, mtry, rng, tree, {}};
        builder.build(rows, 0);
        forest.trees.push_back(std::move(tree));
    }
    return forest;
}

double predict_row(const Forest& forest, std::span<const double> row) {
    if (row.size() != forest.n_features) {
        throw InputError("predict: expected " + std::to_string(forest.n_features) +
                         " features, got " + std::to_string(row.size()));
    }
    double sum = 0.0;
    for (const Tree& tree : forest.trees) {
        int node = 0;
        while (!tree.nodes[node].is_leaf()) {
            const TreeNode& n = tree.nodes[node];
            node = row[static_cast<size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        }
        sum += tree.nodes[node].value;
    }
    return sum / static_cast<double>(forest.trees.size());
}

std::vector<double> predict(const Forest& forest, MatrixView x) {
    if (x.n_cols != forest.n_features) throw InputError("predict: feature count mismatch");
    std::vector<double> out;
    out.reserve(x.n_rows);
    for (size_t i = 0; i < x.n_rows; ++i) {
        out.push_back(predict_row(forest, {x.data + i * x.n_cols, x.n_cols}));
    }
    return out;
}

double r_squared(const Forest& forest, MatrixView x, std::span<const double> y) {
    if (x.n_rows != y.size()) throw InputError("r_squared: row count mismatch");
    return r_squared_of(predict(forest, x), y);
}

double oob_r_squared(const Forest& forest, MatrixView x, std::span<const double> y) {
    if (x.n_rows != forest.n_train || y.size() != forest.n_train) {
        throw InputError("oob_r_squared requires the training data");
    }
    std::vector<double> pred;
    std::vector<double> truth;
    for (size_t i = 0; i < x.n_rows; ++i) {
        double sum = 0.0;
        int64_t n_trees = 0;
        for (const Tree& tree : forest.trees) {
            if (!tree.oob_rows[i]) continue;
            int node = 0;
            while (!tree.nodes[node].is_leaf()) {
                const TreeNode& n = tree.nodes[node];
                node = x.at(i, static_cast<size_t>(n.feature)) <= n.threshold ? n.left : n.right;
            }
            sum += tree.nodes[node].value;
            ++n_trees;
        }
        if (n_trees == 0) continue;  // row in every bag; skip
        pred.push_back(sum / static_cast<double>(n_trees));
        truth.push_back(y[i]);
    }
    if (truth.size() < 2) throw InsufficientDataError("too few out-of-bag rows");
    return r_squared_of(pred, truth);
}

std::vector<double> permutation_importance(const Forest& forest, MatrixView x,
                                           std::span<const double> y, int n_repeats,
                                           uint64_t seed) {
    if (n_repeats < 1) throw InputError("permutation_importance: n_repeats must be >= 1");
    if (x.n_rows != y.size()) throw InputError("permutation_importance: row count mismatch");
    double const baseline = mse(predict(forest, x), y);

    std::vector<double> importance(x.n_cols, 0.0);
    std::vector<double> shuffled(x.data, x.data + x.n_rows * x.n_cols);
    std::vector<size_t> perm(x.n_rows);
    for (size_t f = 0; f < x.n_cols; ++f) {
        double total = 0.0;
        for (int rep = 0; rep < n_repeats; ++rep) {
            Rng rng(derive_seed(seed, f * static_cast<size_t>(n_repeats) + rep));
            std::iota(perm.begin(), perm.end(), size_t{0});
            rng.shuffle(perm);
            for (size_t i = 0; i < x.n_rows; ++i) {
                shuffled[i * x.n_cols + f] = x.at(perm[i], f);
            }
            total += mse(predict(forest, {shuffled.data(), x.n_rows, x.n_cols}), y);
        }
        for (size_t i = 0; i < x.n_rows; ++i) shuffled[i * x.n_cols + f] = x.at(i, f);
        importance[f] = total / n_repeats - baseline;
    }
    return importance;
}

std::vector<double> split_frequency_importance(const Forest& forest) {
    std::vector<double> counts(forest.n_features, 0.0);
    double total = 0.0;
    for (const Tree& tree : forest.trees) {
        for (const TreeNode& node : tree.nodes) {
            if (node.is_leaf()) continue;
            counts[static_cast<size_t>(node.feature)] += 1.0;
            total += 1.0;
        }
    }
    if (total == 0.0) return counts;  // all-leaf forest
    for (double& c : counts) c /= total;
    return counts;
}

std::vector<PdpPoint> partial_dependence(const Forest& forest, MatrixView x, size_t feature,
                                         int grid_size) {
    if (feature >= x.n_cols) throw InputError("partial_dependence: feature index out of range");
    if (grid_size < 2) throw InputError("partial_dependence: grid_size must be >= 2");
    if (x.n_rows == 0) throw InputError("partial_dependence: empty data");

    double lo = x.at(0, feature), hi = x.at(0, feature);
    for (size_t i = 1; i < x.n_rows; ++i) {
        lo = std::min(lo, x.at(i, feature));
        hi = std::max(hi, x.at(i, feature));
    }

    std::vector<double> work(x.data, x.data + x.n_rows * x.n_cols);
    auto const mean_at = [&](double v) {
        for (size_t i = 0; i < x.n_rows; ++i) work[i * x.n_cols + feature] = v;
        auto const pred = predict(forest, {work.data(), x.n_rows, x.n_cols});
        return std::accumulate(pred.begin(), pred.end(), 0.0) / static_cast<double>(x.n_rows);
    };

    std::vector<PdpPoint> curve;
    if (lo == hi) {
        curve.push_back({lo, mean_at(lo)});  // constant column: single-point curve
        return curve;
    }
    for (int g = 0; g < grid_size; ++g) {
        double const v = lo + (hi - lo) * static_cast<double>(g) / (grid_size - 1);
        curve.push_back({v, mean_at(v)});
    }
    return curve;
}

std::string forest_to_json(const Forest& forest, std::string_view target_name) {
    nlohmann::json j;
    j["target"] = std::string(target_name);
    j["seed"] = forest.seed;
    j["n_features"] = forest.n_features;
    j["n_train"] = forest.n_train;
    j["feature_names"] = forest.feature_names;
    j["hyperparameters"] = {{"n_trees", forest.params.n_trees},
                            {"max_depth", forest.params.max_depth},
                            {"min_leaf", forest.params.min_leaf},
                            {"mtry", forest.params.mtry},
                            {"bootstrap", forest.params.bootstrap}};
    nlohmann::json trees = nlohmann::json::array();
    for (const Tree& tree : forest.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const TreeNode& n : tree.nodes) {
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"value", n.value}});
        }
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    j["trees"] = std::move(trees);
    return j.dump(1);
}

}  // namespace tfuse
