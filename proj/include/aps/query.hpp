#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "aps/comparison.hpp"
#include "aps/difficulty.hpp"
#include "aps/distance.hpp"
#include "aps/pca.hpp"
#include "aps/results.hpp"
#include "aps/store.hpp"

// Rendering of every read query to JSON or CSV. The CLI and the HTTP service
// both answer through these functions, so their outputs match byte for byte.

namespace aps {

enum class OutputFormat { JSON, CSV };

struct Rendered {
    std::string body;
    OutputFormat format = OutputFormat::JSON;

    std::string content_type() const {
        return format == OutputFormat::CSV ? "text/csv; charset=utf-8" : "application/json";
    }
};

/// Query parameters keyed by the HTTP query names (`metric`, `k`, `a`, ...).
class QueryParams {
public:
    QueryParams() = default;
    QueryParams(std::initializer_list<std::pair<const std::string, std::string>> init) : values_(init) {}

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::optional<std::string> get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    std::string require(const std::string& key) const {
        auto v = get(key);
        if (!v || v->empty()) fail(errc::invalid_argument, fmt::format("missing parameter '{}'", key));
        return *v;
    }

    long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt) const {
        auto v = get(key);
        if (!v || v->empty()) {
            if (fallback) return *fallback;
            fail(errc::invalid_argument, fmt::format("missing parameter '{}'", key));
        }
        auto parsed = detail::parse_int(*v);
        if (!parsed) fail(errc::invalid_argument, fmt::format("parameter '{}' must be an integer", key));
        return *parsed;
    }

    double real(const std::string& key, double fallback) const {
        auto v = get(key);
        if (!v || v->empty()) return fallback;
        auto parsed = detail::parse_double(*v);
        if (!parsed) fail(errc::invalid_argument, fmt::format("parameter '{}' must be a number", key));
        return *parsed;
    }

    std::vector<std::string> list(const std::string& key) const {
        auto v = get(key);
        return v ? detail::split_list(*v) : std::vector<std::string>{};
    }

    MetricSpec spec() const {
        const auto name = require("metric");
        auto metric = parse_metric(name);
        if (!metric) fail(errc::unknown_metric, fmt::format("unknown metric '{}'", name));
        const auto k = integer("k");
        if (k < 1 || k > 1'000'000'000) fail(errc::invalid_argument, "k must be >= 1");
        return MetricSpec(*metric, static_cast<int>(k));
    }

    OutputFormat format() const {
        auto f = get("format").value_or("json");
        if (f == "json") return OutputFormat::JSON;
        if (f == "csv") return OutputFormat::CSV;
        fail(errc::invalid_argument, fmt::format("unknown format '{}'", f));
    }

    MissingPolicy missing() const {
        auto v = get("missing").value_or("drop-dataset");
        auto p = parse_missing_policy(v);
        if (!p) fail(errc::invalid_argument, fmt::format("unknown missing-value policy '{}'", v));
        return *p;
    }

    DistanceSpace space(DistanceSpace fallback) const {
        auto v = get("space");
        if (!v || v->empty()) return fallback;
        auto s = parse_distance_space(*v);
        if (!s) fail(errc::invalid_argument, fmt::format("unknown space '{}' (expected full|pca)", *v));
        return *s;
    }

private:
    std::map<std::string, std::string> values_;
};

/// Immutable view of a registry plus memoized analytics. Safe to share across
/// threads.
class Snapshot {
public:
    explicit Snapshot(Registry reg) : registry_(std::move(reg)), merged_(registry_.merged_results()) {}

    const Registry& registry() const { return registry_; }
    const ResultSet& results() const { return merged_; }

    PerformanceMatrix matrix(const MetricSpec& spec) const { return build_matrix(merged_, spec); }

    /// Projection over the given algorithm axes (all when empty), cached per
    /// (spec, algorithm set, missing policy).
    std::shared_ptr<const Projection> projection(const MetricSpec& spec, const std::vector<std::string>& algorithms,
                                                 MissingPolicy policy) const {
        std::set<std::string> algo_set(algorithms.begin(), algorithms.end());
        std::string key = fmt::format("{}|{}|", to_string(spec), static_cast<int>(policy));
        for (const auto& a : algo_set) key += a + ",";
        {
            std::lock_guard lock(cache_mutex_);
            if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        }
        PerformanceMatrix m;
        try {
            m = matrix(spec);
        } catch (const Error& e) {
            if (e.code() != errc::no_records_for_spec) throw;
            fail(errc::too_few_datasets, fmt::format("need at least 3 complete datasets, have 0 for {}", to_string(spec)));
        }
        if (!algo_set.empty()) m = select_algorithms(m, algorithms);
        auto p = std::make_shared<const Projection>(pca_project(m, policy));
        std::lock_guard lock(cache_mutex_);
        return cache_.emplace(key, std::move(p)).first->second;
    }

private:
    Registry registry_;
    ResultSet merged_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::string, std::shared_ptr<const Projection>> cache_;
};

namespace render {

using nlohmann::json;

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline json spec_json(const MetricSpec& s) { return json{{"metric", to_string(s.metric)}, {"k", s.k}}; }

inline Rendered datasets(const Snapshot& snap, const QueryParams& q) {
    const auto fmt_ = q.format();
    if (fmt_ == OutputFormat::CSV) return {export_metadata_csv(snap.registry(), q.list("datasets")), fmt_};
    const auto filter = q.list("datasets");
    const std::set<std::string> wanted(filter.begin(), filter.end());
    json arr = json::array();
    for (const auto& [id, m] : snap.registry().metas)
        if (wanted.empty() || wanted.count(id)) arr.push_back(m);
    return {dump(arr), fmt_};
}

inline Rendered algorithms(const Snapshot& snap, const QueryParams& q) {
    struct Coverage {
        std::set<std::string> datasets;
        std::set<MetricSpec> specs;
        std::size_t records = 0;
    };
    std::map<std::string, Coverage> cov;
    for (const auto& r : snap.results().records()) {
        auto& c = cov[r.algorithm_id];
        c.datasets.insert(r.dataset_id);
        c.specs.insert(r.spec);
        ++c.records;
    }
    const auto fmt_ = q.format();
    if (fmt_ == OutputFormat::CSV) {
        std::string out = "algorithm,datasets,records\n";
        for (const auto& [id, c] : cov) out += fmt::format("{},{},{}\n", id, c.datasets.size(), c.records);
        return {out, fmt_};
    }
    json arr = json::array();
    for (const auto& [id, c] : cov) {
        json specs = json::array();
        for (const auto& s : c.specs) specs.push_back(spec_json(s));
        arr.push_back({{"algorithm", id}, {"datasets", c.datasets.size()}, {"records", c.records}, {"specs", specs}});
    }
    return {dump(arr), fmt_};
}

namespace detail {

struct ProjectionView {
    std::shared_ptr<const Projection> projection;
    std::optional<std::vector<DifficultyAssignment>> difficulty;
    std::vector<std::size_t> visible; // indices into projection rows
};

inline ProjectionView projection_view(const Snapshot& snap, const QueryParams& q, bool require_difficulty) {
    ProjectionView v;
    v.projection = snap.projection(q.spec(), q.list("algorithms"), q.missing());
    const auto& p = *v.projection;
    if (require_difficulty || p.dataset_ids.size() >= static_cast<std::size_t>(difficulty_levels))
        v.difficulty = difficulty(p);
    // The dataset filter only hides points; the projection is unchanged.
    const auto shown = q.list("datasets");
    const std::set<std::string> shown_set(shown.begin(), shown.end());
    for (std::size_t d = 0; d < p.dataset_ids.size(); ++d)
        if (shown_set.empty() || shown_set.count(p.dataset_ids[d])) v.visible.push_back(d);
    return v;
}

inline std::string projection_csv(const ProjectionView& v) {
    std::string out = "dataset,c1,c2,score,level\n";
    for (auto d : v.visible) {
        const auto& p = *v.projection;
        if (v.difficulty)
            out += fmt::format("{},{},{},{},{}\n", p.dataset_ids[d], p.coords[d][0], p.coords[d][1],
                               (*v.difficulty)[d].score, (*v.difficulty)[d].level);
        else
            out += fmt::format("{},{},{},,\n", p.dataset_ids[d], p.coords[d][0], p.coords[d][1]);
    }
    return out;
}

inline json difficulty_json(const ProjectionView& v) {
    json arr = json::array();
    for (auto d : v.visible) {
        const auto& a = (*v.difficulty)[d];
        arr.push_back({{"dataset", a.dataset_id}, {"score", a.score}, {"level", a.level}});
    }
    return arr;
}

} // namespace detail

/// Projection, loadings, explained variance and difficulty in one payload.
/// Difficulty is null when fewer than five datasets are projected.
inline Rendered projection(const Snapshot& snap, const QueryParams& q) {
    const auto fmt_ = q.format();
    const auto v = detail::projection_view(snap, q, false);
    if (fmt_ == OutputFormat::CSV) return {detail::projection_csv(v), fmt_};

    const auto& p = *v.projection;
    json j = spec_json(p.spec);
    json ids = json::array(), coords = json::array();
    for (auto d : v.visible) {
        ids.push_back(p.dataset_ids[d]);
        coords.push_back({p.coords[d][0], p.coords[d][1]});
    }
    j["dataset_ids"] = ids;
    j["algorithm_ids"] = p.algorithm_ids;
    j["coords"] = coords;
    j["loadings"] = {p.loadings[0], p.loadings[1]};
    j["explained_variance_ratio"] = {p.explained_variance_ratio[0], p.explained_variance_ratio[1]};
    j["column_means"] = p.column_means;
    j["projected_datasets"] = p.dataset_ids.size();
    j["difficulty"] = v.difficulty ? detail::difficulty_json(v) : json(nullptr);
    return {dump(j), fmt_};
}

inline Rendered difficulty(const Snapshot& snap, const QueryParams& q) {
    const auto fmt_ = q.format();
    const auto v = detail::projection_view(snap, q, true);
    if (fmt_ == OutputFormat::CSV) return {detail::projection_csv(v), fmt_};
    return {dump(detail::difficulty_json(v)), fmt_};
}

inline DistanceMatrix distance_matrix(const Snapshot& snap, const QueryParams& q, DistanceSpace space) {
    if (space == DistanceSpace::PCA2D) return distances(*snap.projection(q.spec(), q.list("algorithms"), q.missing()));
    PerformanceMatrix m = snap.matrix(q.spec());
    if (auto algos = q.list("algorithms"); !algos.empty()) m = select_algorithms(m, algos);
    return aps::distances(m, DistanceSpace::FullAPS, q.missing());
}

inline Rendered distances(const Snapshot& snap, const QueryParams& q) {
    const auto fmt_ = q.format();
    const auto space = q.space(DistanceSpace::FullAPS);
    const auto dm = distance_matrix(snap, q, space);
    if (fmt_ == OutputFormat::CSV) {
        std::string out = "dataset";
        for (const auto& id : dm.dataset_ids) out += "," + id;
        out += '\n';
        for (std::size_t i = 0; i < dm.size(); ++i) {
            out += dm.dataset_ids[i];
            for (std::size_t j = 0; j < dm.size(); ++j) out += fmt::format(",{}", dm(i, j));
            out += '\n';
        }
        return {out, fmt_};
    }
    json rows = json::array();
    for (std::size_t i = 0; i < dm.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < dm.size(); ++j) row.push_back(dm(i, j));
        rows.push_back(row);
    }
    json j = spec_json(q.spec());
    j["space"] = to_string(space);
    j["dataset_ids"] = dm.dataset_ids;
    j["dist"] = rows;
    return {dump(j), fmt_};
}

inline Rendered select(const Snapshot& snap, const QueryParams& q) {
    const auto fmt_ = q.format();
    const auto space = q.space(DistanceSpace::FullAPS);
    const auto m = q.integer("m");
    if (m < 1) fail(errc::invalid_m, fmt::format("m must be >= 1, got {}", m));
    const auto picked = select_diverse(distance_matrix(snap, q, space), static_cast<std::size_t>(m));
    if (fmt_ == OutputFormat::CSV) {
        std::string out = "rank,dataset\n";
        for (std::size_t i = 0; i < picked.size(); ++i) out += fmt::format("{},{}\n", i + 1, picked[i]);
        return {out, fmt_};
    }
    json j = spec_json(q.spec());
    j["space"] = to_string(space);
    j["m"] = m;
    j["selected"] = picked;
    return {dump(j), fmt_};
}

inline json comparison_json(const ComparisonResult& r, const QuadrantConfig& cfg) {
    json j = spec_json(r.spec);
    j["algo_a"] = r.algo_a;
    j["algo_b"] = r.algo_b;
    j["low_q"] = cfg.low_q;
    j["high_q"] = cfg.high_q;
    j["thresholds"] = {{"q25_a", r.thresholds.low_a},
                       {"q75_a", r.thresholds.high_a},
                       {"q25_b", r.thresholds.low_b},
                       {"q75_b", r.thresholds.high_b}};
    json pts = json::array();
    for (const auto& p : r.points)
        pts.push_back({{"dataset", p.dataset_id}, {"x", p.x}, {"y", p.y}, {"class", to_string(p.cls)}});
    j["points"] = pts;
    j["excluded"] = r.excluded;
    return j;
}

inline std::string comparison_csv(const ComparisonResult& r) {
    std::string out = "dataset,x,y,class\n";
    for (const auto& p : r.points) out += fmt::format("{},{},{},{}\n", p.dataset_id, p.x, p.y, to_string(p.cls));
    return out;
}

inline Rendered compare(const Snapshot& snap, const QueryParams& q) {
    const auto fmt_ = q.format();
    const QuadrantConfig cfg{q.real("low_q", 0.25), q.real("high_q", 0.75)};
    const auto res = classify(snap.matrix(q.spec()), q.require("a"), q.require("b"), cfg);
    if (fmt_ == OutputFormat::CSV) return {comparison_csv(res), fmt_};
    return {dump(comparison_json(res, cfg)), fmt_};
}

inline Rendered export_metadata(const Snapshot& snap, const QueryParams& q) {
    return {export_metadata_csv(snap.registry(), q.list("datasets")), OutputFormat::CSV};
}

inline Rendered selections(const Snapshot& snap) {
    json arr = json::array();
    for (const auto& [_, s] : snap.registry().selections) arr.push_back(s);
    return {dump(arr), OutputFormat::JSON};
}

inline Rendered selection(const Snapshot& snap, const std::string& name) {
    auto it = snap.registry().selections.find(name);
    if (it == snap.registry().selections.end()) fail(errc::not_found, fmt::format("no selection named '{}'", name));
    return {dump(json(it->second)), OutputFormat::JSON};
}

inline std::string error_json(const Error& e) { return dump(json{{"code", e.code()}, {"message", e.what()}}); }

} // namespace render
} // namespace aps
