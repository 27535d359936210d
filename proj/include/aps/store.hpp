#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "aps/dataset_stats.hpp"
#include "aps/detail/text.hpp"
#include "aps/error.hpp"
#include "aps/results.hpp"

namespace aps {

struct Selection {
    std::string name;
    std::vector<std::string> dataset_ids; // insertion order, no duplicates
    std::string created_at;               // UTC RFC 3339
    std::optional<std::string> note;

    friend bool operator==(const Selection&, const Selection&) = default;
};

/// A result file as ingested: the verbatim text plus its parse.
struct StoredResults {
    std::string text;
    ResultSet results;
};

struct Registry {
    std::map<std::string, StoredResults> result_sets;
    std::map<std::string, DatasetMeta> metas;
    std::map<std::string, Selection> selections;

    /// All result sets as one (keys are unique across sets by construction).
    ResultSet merged_results() const {
        std::vector<const ResultSet*> sets;
        for (const auto& [_, s] : result_sets) sets.push_back(&s.results);
        return merge_results(sets);
    }
};

inline std::string utc_now_rfc3339() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void check_name(const std::string& name, const char* what) {
    if (!detail::valid_id(name))
        fail(errc::invalid_argument, fmt::format("{} name '{}' must match [A-Za-z0-9_.-]+", what, name));
}

/// Adds or replaces a named result file. Records may not collide with those of
/// any other stored set.
inline Registry add_results(Registry reg, const std::string& name, std::string text) {
    check_name(name, "result set");
    ResultSet parsed = parse_results(text);
    reg.result_sets.erase(name);
    std::vector<const ResultSet*> sets{&parsed};
    for (const auto& [_, s] : reg.result_sets) sets.push_back(&s.results);
    merge_results(sets);
    reg.result_sets.emplace(name, StoredResults{std::move(text), std::move(parsed)});
    return reg;
}

inline Registry add_meta(Registry reg, DatasetMeta meta) {
    check_name(meta.name, "dataset");
    reg.metas.insert_or_assign(meta.name, std::move(meta));
    return reg;
}

inline Registry save_selection(Registry reg, Selection sel, bool overwrite = false) {
    check_name(sel.name, "selection");
    if (sel.dataset_ids.empty()) fail(errc::invalid_argument, "selection must contain at least one dataset");
    std::vector<std::string> unique;
    std::set<std::string> seen;
    for (auto& id : sel.dataset_ids) {
        if (!reg.metas.count(id)) fail(errc::unknown_dataset, fmt::format("unknown dataset '{}'", id));
        if (seen.insert(id).second) unique.push_back(id);
    }
    sel.dataset_ids = std::move(unique);
    if (reg.selections.count(sel.name) && !overwrite)
        fail(errc::name_exists, fmt::format("selection '{}' already exists", sel.name));
    if (sel.created_at.empty()) sel.created_at = utc_now_rfc3339();
    reg.selections.insert_or_assign(sel.name, std::move(sel));
    return reg;
}

inline Registry delete_selection(Registry reg, const std::string& name) {
    if (!reg.selections.erase(name)) fail(errc::not_found, fmt::format("no selection named '{}'", name));
    return reg;
}

inline constexpr std::string_view metadata_csv_header =
    "dataset,n_users,n_items,n_interactions,sparsity,gini_user,gini_item,user_coldstart_risk,item_coldstart_risk,"
    "feedback";

/// Metadata table, one row per dataset in id order. An empty filter exports
/// everything; ids not in the registry are skipped.
inline std::string export_metadata_csv(const Registry& reg, const std::vector<std::string>& filter = {}) {
    std::set<std::string> wanted(filter.begin(), filter.end());
    std::string out(metadata_csv_header);
    out += '\n';
    for (const auto& [id, m] : reg.metas) {
        if (!wanted.empty() && !wanted.count(id)) continue;
        out += fmt::format("{},{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", id, m.n_users, m.n_items,
                           m.n_interactions, m.sparsity, m.gini_user, m.gini_item, m.user_coldstart_risk,
                           m.item_coldstart_risk, to_string(m.feedback));
    }
    return out;
}

// JSON mapping for the persisted sections.

inline void to_json(nlohmann::json& j, const DatasetMeta& m) {
    j = nlohmann::json{{"name", m.name},
                       {"n_users", m.n_users},
                       {"n_items", m.n_items},
                       {"n_interactions", m.n_interactions},
                       {"sparsity", m.sparsity},
                       {"gini_user", m.gini_user},
                       {"gini_item", m.gini_item},
                       {"user_coldstart_risk", m.user_coldstart_risk},
                       {"item_coldstart_risk", m.item_coldstart_risk},
                       {"feedback", to_string(m.feedback)}};
}

inline void from_json(const nlohmann::json& j, DatasetMeta& m) {
    j.at("name").get_to(m.name);
    j.at("n_users").get_to(m.n_users);
    j.at("n_items").get_to(m.n_items);
    j.at("n_interactions").get_to(m.n_interactions);
    j.at("sparsity").get_to(m.sparsity);
    j.at("gini_user").get_to(m.gini_user);
    j.at("gini_item").get_to(m.gini_item);
    j.at("user_coldstart_risk").get_to(m.user_coldstart_risk);
    j.at("item_coldstart_risk").get_to(m.item_coldstart_risk);
    auto fb = parse_feedback(j.at("feedback").get<std::string>());
    if (!fb) throw nlohmann::json::other_error::create(501, "bad feedback value", &j);
    m.feedback = *fb;
}

inline void to_json(nlohmann::json& j, const Selection& s) {
    j = nlohmann::json{{"name", s.name}, {"dataset_ids", s.dataset_ids}, {"created_at", s.created_at}};
    j["note"] = s.note ? nlohmann::json(*s.note) : nlohmann::json(nullptr);
}

inline void from_json(const nlohmann::json& j, Selection& s) {
    j.at("name").get_to(s.name);
    j.at("dataset_ids").get_to(s.dataset_ids);
    s.created_at = j.value("created_at", std::string());
    if (j.contains("note") && !j.at("note").is_null()) s.note = j.at("note").get<std::string>();
    else s.note.reset();
}

namespace detail {

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(errc::io_error, fmt::format("cannot write '{}'", tmp.string()));
        out << content;
        if (!out.flush()) fail(errc::io_error, fmt::format("cannot write '{}'", tmp.string()));
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(errc::io_error, fmt::format("cannot replace '{}': {}", path.string(), ec.message()));
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, fmt::format("cannot read '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace detail

/// Writes `reg` under `dir` (metas.json, selections.json, results/<name>.csv).
/// Each file is replaced via write-temp-then-rename.
inline void save_registry(const Registry& reg, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir / "results", ec);
    if (ec) fail(errc::io_error, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

    for (const auto& [name, stored] : reg.result_sets) detail::write_atomic(dir / "results" / (name + ".csv"), stored.text);
    for (const auto& entry : fs::directory_iterator(dir / "results")) {
        const auto& p = entry.path();
        if (p.extension() == ".csv" && !reg.result_sets.count(p.stem().string())) fs::remove(p, ec);
    }

    nlohmann::json metas = nlohmann::json::array();
    for (const auto& [_, m] : reg.metas) metas.push_back(m);
    nlohmann::json sels = nlohmann::json::array();
    for (const auto& [_, s] : reg.selections) sels.push_back(s);
    detail::write_atomic(dir / "metas.json", metas.dump(2) + "\n");
    detail::write_atomic(dir / "selections.json", sels.dump(2) + "\n");
}

/// Loads a registry directory. A missing directory is an empty registry.
inline Registry load_registry(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    Registry reg;
    if (!fs::exists(dir)) return reg;
    if (!fs::is_directory(dir)) fail(errc::registry_corrupt, fmt::format("'{}' is not a directory", dir.string()));

    try {
        if (fs::exists(dir / "metas.json"))
            for (const auto& j : nlohmann::json::parse(detail::read_file(dir / "metas.json"))) {
                auto m = j.get<DatasetMeta>();
                reg.metas.emplace(m.name, std::move(m));
            }
        if (fs::exists(dir / "results")) {
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(dir / "results"))
                if (entry.path().extension() == ".csv") files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            for (const auto& p : files) reg = add_results(std::move(reg), p.stem().string(), detail::read_file(p));
        }
        if (fs::exists(dir / "selections.json"))
            for (const auto& j : nlohmann::json::parse(detail::read_file(dir / "selections.json"))) {
                auto s = j.get<Selection>();
                for (const auto& id : s.dataset_ids)
                    if (!reg.metas.count(id))
                        fail(errc::registry_corrupt, fmt::format("selection '{}' references unknown dataset '{}'", s.name, id));
                reg.selections.emplace(s.name, std::move(s));
            }
    } catch (const nlohmann::json::exception& e) {
        fail(errc::registry_corrupt, fmt::format("registry '{}': {}", dir.string(), e.what()));
    } catch (const Error& e) {
        if (e.code() == errc::registry_corrupt) throw;
        fail(errc::registry_corrupt, fmt::format("registry '{}': {} ({})", dir.string(), e.what(), e.code()));
    }
    return reg;
}

} // namespace aps
