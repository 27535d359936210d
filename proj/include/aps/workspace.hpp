#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "aps/dataset_stats.hpp"
#include "aps/query.hpp"
#include "aps/store.hpp"

namespace aps {

/// A registry directory plus the current immutable snapshot of it.
/// Readers grab the snapshot pointer; writers are serialized, persist the new
/// registry to disk, then publish a fresh snapshot in one pointer swap.
class Workspace {
public:
    explicit Workspace(std::filesystem::path dir)
        : dir_(std::move(dir)), current_(std::make_shared<const Snapshot>(load_registry(dir_))) {}

    const std::filesystem::path& directory() const { return dir_; }

    std::shared_ptr<const Snapshot> snapshot() const {
        std::lock_guard lock(publish_mutex_);
        return current_;
    }

    void ingest_results(const std::string& name, std::string text) {
        update([&](Registry reg) { return add_results(std::move(reg), name, std::move(text)); });
    }

    /// Parses, converts to implicit, prunes, and stores the dataset's metadata.
    DatasetMeta ingest_dataset(const std::string& name, std::string_view text, PruneConfig prune = {},
                               int coldstart_threshold = 10) {
        check_name(name, "dataset");
        auto meta = dataset_meta_pipeline(parse_interactions(text, name), prune, coldstart_threshold);
        update([&](Registry reg) { return add_meta(std::move(reg), meta); });
        return meta;
    }

    Selection save_selection(Selection sel, bool overwrite) {
        const std::string name = sel.name;
        update([&](Registry reg) { return aps::save_selection(std::move(reg), std::move(sel), overwrite); });
        return snapshot()->registry().selections.at(name);
    }

    void delete_selection(const std::string& name) {
        update([&](Registry reg) { return aps::delete_selection(std::move(reg), name); });
    }

private:
    template <typename Fn>
    void update(Fn&& fn) {
        std::lock_guard writer(writer_mutex_);
        Registry next = fn(snapshot()->registry());
        save_registry(next, dir_);
        auto snap = std::make_shared<const Snapshot>(std::move(next));
        std::lock_guard lock(publish_mutex_);
        current_ = std::move(snap);
    }

    std::filesystem::path dir_;
    mutable std::mutex publish_mutex_;
    std::mutex writer_mutex_;
    std::shared_ptr<const Snapshot> current_;
};

} // namespace aps
