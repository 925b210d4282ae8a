#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "feedaudit/bias.hpp"
#include "feedaudit/metrics.hpp"
#include "feedaudit/sim.hpp"
#include "feedaudit/types.hpp"

namespace feedaudit {

inline constexpr char kSnapshotsFormatVersion[] = "feedaudit.snapshots/1";
inline constexpr char kCatalogFormatVersion[] = "feedaudit.catalog/1";
inline constexpr char kManifestFormatVersion[] = "feedaudit.manifest/1";

// Accompanies every generated dataset; counts let a reader cross-check the
// data files without parsing them fully.
struct DatasetManifest {
    std::string format_version = kManifestFormatVersion;
    std::string generator;  // tool, RNG algorithm id and seed for synthetic data
    std::string time_zone = "UTC";
    std::map<std::string, std::int64_t> snapshots_per_bot;
    std::int64_t catalog_size = 0;

    bool operator==(const DatasetManifest&) const = default;
};

// A report is a rectangular table of pre-formatted cells; the writer emits
// canonical CSV (header row, LF endings, rows sorted by bot_id, publisher_id
// and numeric K where those columns exist).
struct ReportTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    bool operator==(const ReportTable&) const = default;
};

// Canonical number rendering for report cells: 12 significant digits.
std::string format_value(double v);

// Line-delimited snapshot file: a format-version header line followed by one
// JSON snapshot per line. All validation errors name the line and field.
SnapshotSet read_snapshots(const std::filesystem::path& path);
void write_snapshots(const SnapshotSet& set, const std::filesystem::path& path);

std::vector<PostRecord> read_catalog(const std::filesystem::path& path);
void write_catalog(const std::vector<PostRecord>& catalog, const std::filesystem::path& path);

void write_report(const ReportTable& table, const std::filesystem::path& path);
ReportTable read_report(const std::filesystem::path& path);

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

SimConfig read_sim_config(const std::filesystem::path& path);

// Runs the simulator and writes snapshots.jsonl, catalog.jsonl,
// truth_rates.csv and manifest.json under out_dir.
DatasetManifest generate_synthetic(const SimConfig& config,
                                   const std::filesystem::path& out_dir);

// Report builders (cells already in canonical rendering).
ReportTable exposure_report(const std::vector<ExposureRow>& rows);
ReportTable rate_report(const RateTable& rows);
ReportTable bias_report(const std::vector<BiasRow>& rows);
ReportTable scatter_report(const std::vector<ScatterRow>& rows, int k);
ReportTable curve_report(const std::map<std::string, std::vector<CurvePoint>>& per_bot);

}  // namespace feedaudit
