#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "aps/store.hpp"
#include "test_util.hpp"

using namespace aps;

namespace {

DatasetMeta meta(const std::string& name, double sparsity) {
    DatasetMeta m;
    m.name = name;
    m.n_users = 10;
    m.n_items = 20;
    m.n_interactions = 100;
    m.sparsity = sparsity;
    m.gini_user = 0.125;
    m.gini_item = 0.3333333333;
    m.user_coldstart_risk = 0.1;
    m.item_coldstart_risk = 0.0;
    m.feedback = Feedback::Explicit;
    return m;
}

Registry sample() {
    Registry reg;
    reg = add_meta(std::move(reg), meta("d2", 0.75));
    reg = add_meta(std::move(reg), meta("d1", 0.5));
    return reg;
}

/// Plain CSV reader written independently of the exporter.
std::vector<std::map<std::string, std::string>> read_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) header.push_back(cell);
    std::vector<std::map<std::string, std::string>> rows;
    while (std::getline(in, line)) {
        std::stringstream ls(line);
        std::map<std::string, std::string> row;
        std::size_t i = 0;
        for (std::string cell; std::getline(ls, cell, ',');) row[header.at(i++)] = cell;
        rows.push_back(row);
    }
    return rows;
}

} // namespace

TEST(Selections, SaveAndRetrieve) {
    auto reg = save_selection(sample(), {"sparse-picks", {"d1", "d2"}, "", std::nullopt});
    const auto& s = reg.selections.at("sparse-picks");
    EXPECT_EQ(s.dataset_ids, (std::vector<std::string>{"d1", "d2"}));
    EXPECT_EQ(s.created_at.size(), 20u);
    EXPECT_EQ(s.created_at.back(), 'Z');
}

TEST(Selections, UnknownDatasetAndNameExists) {
    try {
        save_selection(sample(), {"x", {"d1", "nope"}, "", std::nullopt});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "unknown_dataset");
    }
    auto reg = save_selection(sample(), {"x", {"d1"}, "", std::nullopt});
    try {
        save_selection(reg, {"x", {"d2"}, "", std::nullopt});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "name_exists");
    }
    reg = save_selection(reg, {"x", {"d2"}, "", "updated"}, true);
    EXPECT_EQ(reg.selections.at("x").dataset_ids, std::vector<std::string>{"d2"});
    EXPECT_THROW(save_selection(reg, {"empty", {}, "", std::nullopt}), Error);
    EXPECT_THROW(delete_selection(reg, "missing"), Error);
    EXPECT_TRUE(delete_selection(reg, "x").selections.empty());
}

TEST(ExportMetadata, HeaderOnlyWhenEmpty) {
    EXPECT_EQ(export_metadata_csv(Registry{}), std::string(metadata_csv_header) + "\n");
}

TEST(ExportMetadata, FormattingAndOrder) {
    const auto csv = export_metadata_csv(sample());
    EXPECT_EQ(csv, std::string(metadata_csv_header) +
                       "\nd1,10,20,100,0.500000,0.125000,0.333333,0.100000,0.000000,explicit\n"
                       "d2,10,20,100,0.750000,0.125000,0.333333,0.100000,0.000000,explicit\n");
    EXPECT_EQ(read_csv(export_metadata_csv(sample(), {"d2", "unknown"})).size(), 1u);
}

TEST(ExportMetadata, ReparsesToStoredValues) {
    const auto reg = sample();
    for (const auto& row : read_csv(export_metadata_csv(reg))) {
        const auto& m = reg.metas.at(row.at("dataset"));
        EXPECT_EQ(std::stoul(row.at("n_users")), m.n_users);
        EXPECT_EQ(std::stoul(row.at("n_items")), m.n_items);
        EXPECT_EQ(std::stoul(row.at("n_interactions")), m.n_interactions);
        EXPECT_NEAR(std::stod(row.at("sparsity")), m.sparsity, 5e-7);
        EXPECT_NEAR(std::stod(row.at("gini_user")), m.gini_user, 5e-7);
        EXPECT_NEAR(std::stod(row.at("gini_item")), m.gini_item, 5e-7);
        EXPECT_NEAR(std::stod(row.at("user_coldstart_risk")), m.user_coldstart_risk, 5e-7);
        EXPECT_NEAR(std::stod(row.at("item_coldstart_risk")), m.item_coldstart_risk, 5e-7);
        EXPECT_EQ(row.at("feedback"), "explicit");
    }
}

TEST(Persistence, SaveLoadRoundTrip) {
    test::TempDir dir;
    auto reg = sample();
    reg = add_results(std::move(reg), "main", test::read_fixture("results_fixture.csv"));
    reg = save_selection(std::move(reg), {"pick", {"d2", "d1"}, "2026-01-02T03:04:05Z", "note"});
    save_registry(reg, dir.path());

    EXPECT_TRUE(std::filesystem::exists(dir.path() / "metas.json"));
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "selections.json"));
    EXPECT_EQ(detail::read_file(dir.path() / "results" / "main.csv"), test::read_fixture("results_fixture.csv"));

    const auto loaded = load_registry(dir.path());
    EXPECT_EQ(loaded.metas, reg.metas);
    EXPECT_EQ(loaded.selections, reg.selections);
    EXPECT_EQ(loaded.result_sets.at("main").results.records(), reg.result_sets.at("main").results.records());
    EXPECT_EQ(export_metadata_csv(loaded), export_metadata_csv(reg));

    test::TempDir again;
    save_registry(loaded, again.path());
    for (auto f : {"metas.json", "selections.json", "results/main.csv"})
        EXPECT_EQ(detail::read_file(again.path() / f), detail::read_file(dir.path() / f)) << f;
}

TEST(Persistence, MissingDirectoryIsEmptyAndCorruptionIsReported) {
    test::TempDir dir;
    EXPECT_TRUE(load_registry(dir.path() / "absent").metas.empty());
    {
        std::ofstream(dir.path() / "metas.json") << "{ not json";
    }
    try {
        load_registry(dir.path());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "registry_corrupt");
    }
}

TEST(AddResults, RejectsCollisionsAcrossSets) {
    Registry reg;
    const std::string h = "dataset,algorithm,metric,k,fold,value\n";
    reg = add_results(std::move(reg), "one", h + "d,a,nDCG,10,1,0.5\n");
    try {
        add_results(reg, "two", h + "d,a,nDCG,10,1,0.6\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "duplicate_key");
    }
    // Replacing the same set is fine.
    reg = add_results(std::move(reg), "one", h + "d,a,nDCG,10,1,0.6\n");
    EXPECT_EQ(reg.merged_results().records()[0].value, 0.6);
    EXPECT_THROW(add_results(reg, "bad name", h), Error);
}
