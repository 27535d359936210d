#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <fmt/format.h>

#include "aps/detail/text.hpp"
#include "aps/error.hpp"

namespace aps {

enum class Feedback { Explicit, Implicit };

inline std::string_view to_string(Feedback f) { return f == Feedback::Explicit ? "explicit" : "implicit"; }

inline std::optional<Feedback> parse_feedback(std::string_view s) {
    if (s == "explicit") return Feedback::Explicit;
    if (s == "implicit") return Feedback::Implicit;
    return std::nullopt;
}

struct Interaction {
    std::string user;
    std::string item;
    std::optional<double> rating;

    friend bool operator==(const Interaction&, const Interaction&) = default;
};

struct InteractionDataset {
    std::string name;
    Feedback feedback = Feedback::Implicit;
    std::vector<Interaction> interactions;
};

struct PruneConfig {
    int k = 5;
};

/// Per-dataset statistics. Counts are taken after pruning.
struct DatasetMeta {
    std::string name;
    std::size_t n_users = 0;
    std::size_t n_items = 0;
    std::size_t n_interactions = 0;
    double sparsity = 0.0;
    double gini_user = 0.0;
    double gini_item = 0.0;
    double user_coldstart_risk = 0.0;
    double item_coldstart_risk = 0.0;
    Feedback feedback = Feedback::Implicit;

    friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

/// Reads a `user,item[,rating]` file. The delimiter (comma or tab) is taken
/// from the header line; a rating column makes the dataset explicit.
inline InteractionDataset parse_interactions(std::string_view text, std::string name) {
    auto lines = detail::split_lines(text);
    if (!lines.empty() && lines.front().substr(0, 3) == "\xEF\xBB\xBF") lines.front().remove_prefix(3);
    if (lines.empty()) fail(errc::malformed_row, "line 1: missing header");

    const char delim = lines.front().find('\t') != std::string_view::npos ? '\t' : ',';
    auto header = detail::split(lines.front(), delim);
    for (auto& h : header) h = detail::trim(h);
    const bool has_rating = header.size() == 3 && header[2] == "rating";
    if (header.size() < 2 || header[0] != "user" || header[1] != "item" || (header.size() == 3 && !has_rating) ||
        header.size() > 3)
        fail(errc::malformed_row, "line 1: expected header 'user,item[,rating]'");

    InteractionDataset ds{std::move(name), has_rating ? Feedback::Explicit : Feedback::Implicit, {}};
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = detail::split(lines[i], delim);
        if (fields.size() != header.size())
            fail(errc::malformed_row, fmt::format("line {}: expected {} columns, got {}", i + 1, header.size(),
                                                  fields.size()));
        auto user = detail::trim(fields[0]);
        auto item = detail::trim(fields[1]);
        if (user.empty() || item.empty()) fail(errc::malformed_row, fmt::format("line {}: empty id", i + 1));
        Interaction it{std::string(user), std::string(item), std::nullopt};
        if (has_rating) {
            auto r = detail::parse_double(detail::trim(fields[2]));
            if (!r) fail(errc::malformed_row, fmt::format("line {}: unparsable rating", i + 1));
            it.rating = *r;
        }
        ds.interactions.push_back(std::move(it));
    }
    return ds;
}

namespace detail {
struct PairHash {
    std::size_t operator()(const std::pair<std::string_view, std::string_view>& p) const noexcept {
        const std::size_t h1 = std::hash<std::string_view>{}(p.first);
        const std::size_t h2 = std::hash<std::string_view>{}(p.second);
        return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
    }
};
} // namespace detail

/// Every rated pair becomes a positive interaction, whatever the rating.
/// Keeps the first occurrence of each (user, item) pair.
inline InteractionDataset to_implicit(const InteractionDataset& ds) {
    InteractionDataset out{ds.name, Feedback::Implicit, {}};
    out.interactions.reserve(ds.interactions.size());
    std::unordered_set<std::pair<std::string_view, std::string_view>, detail::PairHash> seen;
    seen.reserve(ds.interactions.size());
    for (const auto& it : ds.interactions)
        if (seen.emplace(it.user, it.item).second) out.interactions.push_back({it.user, it.item, std::nullopt});
    return out;
}

/// Largest sub-dataset where every user and every item has at least `cfg.k`
/// interactions. Peels low-degree endpoints with a work queue; surviving
/// interactions keep their input order.
inline InteractionDataset k_core_prune(const InteractionDataset& ds, PruneConfig cfg = {}) {
    if (cfg.k < 1) fail(errc::invalid_argument, "prune k must be >= 1");
    if (ds.feedback != Feedback::Implicit) fail(errc::invalid_argument, "k-core pruning expects an implicit dataset");

    std::unordered_map<std::string_view, std::size_t> user_index, item_index;
    std::vector<std::size_t> edge_user(ds.interactions.size()), edge_item(ds.interactions.size());
    for (std::size_t e = 0; e < ds.interactions.size(); ++e) {
        const auto& it = ds.interactions[e];
        edge_user[e] = user_index.try_emplace(it.user, user_index.size()).first->second;
        edge_item[e] = item_index.try_emplace(it.item, item_index.size()).first->second;
    }
    const std::size_t n_users = user_index.size();
    const std::size_t n_nodes = n_users + item_index.size();

    // Node ids: users in [0, n_users), items after.
    std::vector<std::vector<std::size_t>> incident(n_nodes);
    for (std::size_t e = 0; e < edge_user.size(); ++e) {
        incident[edge_user[e]].push_back(e);
        incident[n_users + edge_item[e]].push_back(e);
    }
    std::vector<std::size_t> degree(n_nodes);
    std::vector<bool> node_removed(n_nodes, false), edge_removed(edge_user.size(), false);
    std::deque<std::size_t> queue;
    const auto k = static_cast<std::size_t>(cfg.k);
    for (std::size_t v = 0; v < n_nodes; ++v) {
        degree[v] = incident[v].size();
        if (degree[v] < k) {
            node_removed[v] = true;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t e : incident[v]) {
            if (edge_removed[e]) continue;
            edge_removed[e] = true;
            const std::size_t other = v < n_users ? n_users + edge_item[e] : edge_user[e];
            if (!node_removed[other] && --degree[other] < k) {
                node_removed[other] = true;
                queue.push_back(other);
            }
        }
    }

    InteractionDataset out{ds.name, Feedback::Implicit, {}};
    for (std::size_t e = 0; e < edge_user.size(); ++e)
        if (!edge_removed[e]) out.interactions.push_back(ds.interactions[e]);
    return out;
}

/// Gini coefficient of a count vector; 0 for n <= 1 or all-equal counts.
inline double gini(std::vector<std::size_t> counts) {
    const std::size_t n = counts.size();
    if (n <= 1) return 0.0;
    std::sort(counts.begin(), counts.end());
    if (counts.front() == counts.back()) return 0.0;
    double weighted = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        weighted += static_cast<double>(i + 1) * static_cast<double>(counts[i]);
        total += static_cast<double>(counts[i]);
    }
    if (total == 0.0) return 0.0;
    const double dn = static_cast<double>(n);
    const double g = 2.0 * weighted / (dn * total) - (dn + 1.0) / dn;
    return std::clamp(g, 0.0, 1.0);
}

/// Statistics of an implicit, deduplicated dataset. `source_feedback` records
/// what the raw file was before conversion.
inline DatasetMeta compute_meta(const InteractionDataset& ds, int coldstart_threshold = 10,
                                std::optional<Feedback> source_feedback = std::nullopt) {
    if (coldstart_threshold < 1) fail(errc::invalid_argument, "cold-start threshold must be >= 1");
    if (ds.interactions.empty()) fail(errc::empty_dataset, fmt::format("dataset '{}' has no interactions", ds.name));

    std::unordered_map<std::string_view, std::size_t> user_counts, item_counts;
    for (const auto& it : ds.interactions) {
        ++user_counts[it.user];
        ++item_counts[it.item];
    }
    auto values = [](const auto& map) {
        std::vector<std::size_t> v;
        v.reserve(map.size());
        for (const auto& [_, c] : map) v.push_back(c);
        return v;
    };
    auto risk = [coldstart_threshold](const std::vector<std::size_t>& counts) {
        const auto cold = std::count_if(counts.begin(), counts.end(), [&](std::size_t c) {
            return c < static_cast<std::size_t>(coldstart_threshold);
        });
        return static_cast<double>(cold) / static_cast<double>(counts.size());
    };

    DatasetMeta meta;
    meta.name = ds.name;
    meta.n_users = user_counts.size();
    meta.n_items = item_counts.size();
    meta.n_interactions = ds.interactions.size();
    const double cells = static_cast<double>(meta.n_users) * static_cast<double>(meta.n_items);
    meta.sparsity = cells > 0 ? 1.0 - static_cast<double>(meta.n_interactions) / cells : 0.0;
    const auto uc = values(user_counts);
    const auto ic = values(item_counts);
    meta.gini_user = gini(uc);
    meta.gini_item = gini(ic);
    meta.user_coldstart_risk = risk(uc);
    meta.item_coldstart_risk = risk(ic);
    meta.feedback = source_feedback.value_or(ds.feedback);
    return meta;
}

/// Raw file to metadata: implicit conversion, k-core pruning, then statistics.
inline DatasetMeta dataset_meta_pipeline(const InteractionDataset& raw, PruneConfig prune = {},
                                         int coldstart_threshold = 10) {
    return compute_meta(k_core_prune(to_implicit(raw), prune), coldstart_threshold, raw.feedback);
}

} // namespace aps
