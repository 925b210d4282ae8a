#include "feedaudit/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "feedaudit/errors.hpp"
#include "feedaudit/rng.hpp"

namespace feedaudit {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t line,
                          const std::string& msg) {
    throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open \"" + path.string() + "\" for reading");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    if (in.bad()) throw IoError("error while reading \"" + path.string() + "\"");
    return lines;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open \"" + path.string() + "\" for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("error while writing \"" + path.string() + "\"");
}

ordered_json parse_line(const std::filesystem::path& path, std::size_t line_no,
                        const std::string& line) {
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded()) fail_at(path, line_no, "malformed JSON record");
    if (!j.is_object()) fail_at(path, line_no, "record must be a JSON object");
    return j;
}

void check_keys(const std::filesystem::path& path, std::size_t line_no, const ordered_json& j,
                const std::set<std::string>& required, const std::set<std::string>& optional) {
    for (const auto& [key, _] : j.items()) {
        if (!required.count(key) && !optional.count(key))
            fail_at(path, line_no, "unknown field \"" + key + "\"");
    }
    for (const auto& key : required) {
        if (!j.contains(key)) fail_at(path, line_no, "missing field \"" + key + "\"");
    }
}

std::string get_string(const std::filesystem::path& path, std::size_t line_no,
                       const ordered_json& j, const char* field) {
    const auto& v = j.at(field);
    if (!v.is_string() || v.get<std::string>().empty())
        fail_at(path, line_no, std::string("field \"") + field + "\" must be a non-empty string");
    return v.get<std::string>();
}

TimeNs get_time(const std::filesystem::path& path, std::size_t line_no, const ordered_json& j,
                const char* field) {
    const std::string text = get_string(path, line_no, j, field);
    try {
        return parse_rfc3339(text);
    } catch (const std::invalid_argument& e) {
        fail_at(path, line_no, std::string("field \"") + field + "\": " + e.what());
    }
}

std::int64_t get_int(const std::filesystem::path& path, std::size_t line_no,
                     const ordered_json& j, const char* field) {
    const auto& v = j.at(field);
    if (!v.is_number_integer())
        fail_at(path, line_no, std::string("field \"") + field + "\" must be an integer");
    return v.get<std::int64_t>();
}

void check_header(const std::filesystem::path& path, const std::vector<std::string>& lines,
                  const char* expected_version) {
    const ordered_json j = parse_line(path, 1, lines.at(0));
    if (!j.contains("format_version") || !j.at("format_version").is_string())
        fail_at(path, 1, "missing format_version header");
    const auto version = j.at("format_version").get<std::string>();
    if (version != expected_version)
        fail_at(path, 1, "unknown format_version \"" + version + "\" (expected \"" +
                             std::string(expected_version) + "\")");
    check_keys(path, 1, j, {"format_version"}, {});
}

std::string time_to_string(TimeNs t) { return format_rfc3339(t); }

ordered_json snapshot_to_json(const Snapshot& snap) {
    ordered_json j;
    j["bot_id"] = snap.bot_id;
    j["snapshot_time"] = time_to_string(snap.snapshot_time);
    auto entries = ordered_json::array();
    for (const auto& e : snap.entries) {
        ordered_json je;
        je["position"] = e.position;
        je["post_id"] = e.post_id;
        je["publisher_id"] = e.publisher_id;
        je["publication_time"] = time_to_string(e.publication_time);
        if (e.likes) je["likes"] = *e.likes;
        if (e.shares) je["shares"] = *e.shares;
        entries.push_back(std::move(je));
    }
    j["entries"] = std::move(entries);
    return j;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_split(const std::filesystem::path& path, std::size_t line_no,
                                   const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"' && current.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (quoted) fail_at(path, line_no, "unterminated quoted field");
    fields.push_back(std::move(current));
    return fields;
}

}  // namespace

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

SnapshotSet read_snapshots(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw ValidationError(path.string() + ": no snapshots");
    check_header(path, lines, kSnapshotsFormatVersion);

    std::vector<Snapshot> snapshots;
    snapshots.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (lines[i].empty()) fail_at(path, line_no, "empty line");
        const ordered_json j = parse_line(path, line_no, lines[i]);
        check_keys(path, line_no, j, {"bot_id", "snapshot_time", "entries"}, {});

        Snapshot snap;
        snap.bot_id = get_string(path, line_no, j, "bot_id");
        snap.snapshot_time = get_time(path, line_no, j, "snapshot_time");
        const auto& entries = j.at("entries");
        if (!entries.is_array()) fail_at(path, line_no, "field \"entries\" must be an array");

        std::unordered_set<std::string> post_ids;
        int expected_position = 1;
        for (const auto& je : entries) {
            if (!je.is_object()) fail_at(path, line_no, "entry must be a JSON object");
            check_keys(path, line_no, je,
                       {"position", "post_id", "publisher_id", "publication_time"},
                       {"likes", "shares"});
            SnapshotEntry e;
            const std::int64_t pos = get_int(path, line_no, je, "position");
            if (pos < 1) fail_at(path, line_no, "position must be >= 1");
            if (pos < expected_position)
                fail_at(path, line_no, "duplicate position " + std::to_string(pos));
            if (pos > expected_position)
                fail_at(path, line_no,
                        "positions must be contiguous from 1 (expected " +
                            std::to_string(expected_position) + ", got " + std::to_string(pos) +
                            ")");
            e.position = static_cast<int>(pos);
            e.post_id = get_string(path, line_no, je, "post_id");
            e.publisher_id = get_string(path, line_no, je, "publisher_id");
            e.publication_time = get_time(path, line_no, je, "publication_time");
            if (je.contains("likes")) e.likes = get_int(path, line_no, je, "likes");
            if (je.contains("shares")) e.shares = get_int(path, line_no, je, "shares");
            if (!post_ids.insert(e.post_id).second)
                fail_at(path, line_no, "duplicate post_id \"" + e.post_id + "\"");
            snap.entries.push_back(std::move(e));
            ++expected_position;
        }
        snapshots.push_back(std::move(snap));
    }
    if (snapshots.empty()) throw ValidationError(path.string() + ": no snapshots");

    auto set = SnapshotSet::group(std::move(snapshots));
    for (const auto& bot : set.bot_ids) {
        const auto& snaps = set.per_bot.at(bot);
        for (std::size_t i = 1; i < snaps.size(); ++i) {
            if (snaps[i].snapshot_time < snaps[i - 1].snapshot_time)
                throw ValidationError(path.string() + ": snapshot times of bot \"" + bot +
                                      "\" are not nondecreasing");
        }
    }
    return set;
}

void write_snapshots(const SnapshotSet& set, const std::filesystem::path& path) {
    std::string out;
    out += ordered_json{{"format_version", kSnapshotsFormatVersion}}.dump();
    out += '\n';
    for (const auto& bot : set.bot_ids) {
        for (const auto& snap : set.per_bot.at(bot)) {
            out += snapshot_to_json(snap).dump();
            out += '\n';
        }
    }
    write_text(path, out);
}

std::vector<PostRecord> read_catalog(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw ValidationError(path.string() + ": no posts");
    check_header(path, lines, kCatalogFormatVersion);

    std::vector<PostRecord> posts;
    posts.reserve(lines.size() - 1);
    std::unordered_set<std::string> ids;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (lines[i].empty()) fail_at(path, line_no, "empty line");
        const ordered_json j = parse_line(path, line_no, lines[i]);
        check_keys(path, line_no, j, {"post_id", "publisher_id", "publication_time"}, {});
        PostRecord post;
        post.post_id = get_string(path, line_no, j, "post_id");
        post.publisher_id = get_string(path, line_no, j, "publisher_id");
        post.publication_time = get_time(path, line_no, j, "publication_time");
        if (!ids.insert(post.post_id).second)
            fail_at(path, line_no, "duplicate post_id \"" + post.post_id + "\"");
        posts.push_back(std::move(post));
    }
    if (posts.empty()) throw ValidationError(path.string() + ": no posts");
    return posts;
}

void write_catalog(const std::vector<PostRecord>& catalog,
                   const std::filesystem::path& path) {
    std::string out;
    out += ordered_json{{"format_version", kCatalogFormatVersion}}.dump();
    out += '\n';
    for (const auto& post : catalog) {
        ordered_json j;
        j["post_id"] = post.post_id;
        j["publisher_id"] = post.publisher_id;
        j["publication_time"] = time_to_string(post.publication_time);
        out += j.dump();
        out += '\n';
    }
    write_text(path, out);
}

void write_report(const ReportTable& table, const std::filesystem::path& path) {
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw ValidationError("report row width does not match the header");
    }

    const auto column_index = [&](const char* name) -> std::ptrdiff_t {
        const auto it = std::find(table.columns.begin(), table.columns.end(), name);
        return it == table.columns.end() ? -1 : it - table.columns.begin();
    };
    const std::ptrdiff_t bot_col = column_index("bot_id");
    const std::ptrdiff_t pub_col = column_index("publisher_id");
    const std::ptrdiff_t k_col = column_index("K");

    auto rows = table.rows;
    std::stable_sort(rows.begin(), rows.end(),
                     [&](const std::vector<std::string>& a, const std::vector<std::string>& b) {
                         if (bot_col >= 0 && a[bot_col] != b[bot_col])
                             return a[bot_col] < b[bot_col];
                         if (pub_col >= 0 && a[pub_col] != b[pub_col])
                             return a[pub_col] < b[pub_col];
                         if (k_col >= 0 && a[k_col] != b[k_col])
                             return std::stoll(a[k_col]) < std::stoll(b[k_col]);
                         return a < b;
                     });

    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += csv_escape(table.columns[c]);
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += csv_escape(row[c]);
        }
        out += '\n';
    }
    write_text(path, out);
}

ReportTable read_report(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw ValidationError(path.string() + ": missing header row");
    ReportTable table;
    table.columns = csv_split(path, 1, lines[0]);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto row = csv_split(path, i + 1, lines[i]);
        if (row.size() != table.columns.size())
            fail_at(path, i + 1,
                    "expected " + std::to_string(table.columns.size()) + " fields, got " +
                        std::to_string(row.size()));
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    ordered_json j;
    j["format_version"] = manifest.format_version;
    j["generator"] = manifest.generator;
    j["time_zone"] = manifest.time_zone;
    ordered_json per_bot = ordered_json::object();
    for (const auto& [bot, count] : manifest.snapshots_per_bot) per_bot[bot] = count;
    j["counts"] = {{"snapshots_per_bot", std::move(per_bot)},
                   {"catalog_size", manifest.catalog_size}};
    write_text(path, j.dump(2) + "\n");
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open \"" + path.string() + "\" for reading");
    ordered_json j = ordered_json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ValidationError(path.string() + ": malformed JSON");

    DatasetManifest m;
    try {
        m.format_version = j.at("format_version").get<std::string>();
        if (m.format_version != kManifestFormatVersion)
            throw ValidationError(path.string() + ": unknown format_version \"" +
                                  m.format_version + "\"");
        m.generator = j.at("generator").get<std::string>();
        m.time_zone = j.at("time_zone").get<std::string>();
        if (m.time_zone != "UTC")
            throw ValidationError(path.string() + ": time_zone must be \"UTC\"");
        for (const auto& [bot, count] : j.at("counts").at("snapshots_per_bot").items())
            m.snapshots_per_bot[bot] = count.get<std::int64_t>();
        m.catalog_size = j.at("counts").at("catalog_size").get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return m;
}

SimConfig read_sim_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open \"" + path.string() + "\" for reading");
    ordered_json j = ordered_json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ValidationError(path.string() + ": malformed JSON");

    SimConfig config;
    try {
        check_keys(path, 1, j,
                   {"publishers", "bots", "k", "snapshot_interval", "snapshot_count"},
                   {"warmup"});
        for (const auto& jp : j.at("publishers")) {
            check_keys(path, 1, jp, {"id", "rate"}, {});
            config.publishers.push_back(
                {jp.at("id").get<std::string>(), jp.at("rate").get<double>()});
        }
        for (const auto& jb : j.at("bots")) {
            check_keys(path, 1, jb, {"id", "acceptance"}, {});
            BotSpec bot;
            bot.id = jb.at("id").get<std::string>();
            for (const auto& [pub, prob] : jb.at("acceptance").items())
                bot.acceptance[pub] = prob.get<double>();
            config.bots.push_back(std::move(bot));
        }
        config.k = j.at("k").get<int>();
        config.snapshot_interval = j.at("snapshot_interval").get<double>();
        config.snapshot_count = j.at("snapshot_count").get<int>();
        if (j.contains("warmup")) config.warmup = j.at("warmup").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return config;
}

DatasetManifest generate_synthetic(const SimConfig& config,
                                   const std::filesystem::path& out_dir) {
    config.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory \"" + out_dir.string() + "\": " + ec.message());

    SimResult result = run_simulation(config);
    const auto set = SnapshotSet::group(std::move(result.snapshots));

    write_snapshots(set, out_dir / "snapshots.jsonl");
    write_catalog(result.catalog, out_dir / "catalog.jsonl");
    write_report(rate_report(result.truth), out_dir / "truth_rates.csv");

    DatasetManifest manifest;
    manifest.generator = "feedaudit-simulate rng=" + std::string(kRngAlgorithmId) +
                         " seed=" + std::to_string(config.seed);
    for (const auto& [bot, snaps] : set.per_bot)
        manifest.snapshots_per_bot[bot] = static_cast<std::int64_t>(snaps.size());
    manifest.catalog_size = static_cast<std::int64_t>(result.catalog.size());
    write_manifest(manifest, out_dir / "manifest.json");
    return manifest;
}

ReportTable exposure_report(const std::vector<ExposureRow>& rows) {
    ReportTable table;
    table.columns = {"bot_id",      "publisher_id",         "K",
                     "occupancy",   "visibility",           "normalized_occupancy",
                     "impressions", "unique_posts",         "snapshots"};
    for (const auto& r : rows) {
        table.rows.push_back({r.bot_id, r.publisher_id, std::to_string(r.k),
                              format_value(r.occupancy), format_value(r.visibility),
                              format_value(r.normalized_occupancy),
                              std::to_string(r.impressions), std::to_string(r.unique_posts),
                              std::to_string(r.snapshots)});
    }
    return table;
}

ReportTable rate_report(const RateTable& rows) {
    ReportTable table;
    table.columns = {"bot_id", "publisher_id", "effective_rate", "creation_rate"};
    for (const auto& r : rows) {
        table.rows.push_back({r.bot_id, r.publisher_id, format_value(r.effective_rate),
                              format_value(r.creation_rate)});
    }
    return table;
}

ReportTable bias_report(const std::vector<BiasRow>& rows) {
    ReportTable table;
    table.columns = {"bot_id", "publisher_id", "K",          "n_model", "n_unfiltered",
                     "bias",   "boot_mean",    "ci_low",     "ci_high", "replicates",
                     "level"};
    for (const auto& r : rows) {
        table.rows.push_back({r.bot_id, r.publisher_id, std::to_string(r.k),
                              format_value(r.n_model), format_value(r.n_unfiltered),
                              format_value(r.bias), format_value(r.boot_mean),
                              format_value(r.ci_low), format_value(r.ci_high),
                              std::to_string(r.replicates), format_value(r.level)});
    }
    return table;
}

ReportTable scatter_report(const std::vector<ScatterRow>& rows, int k) {
    ReportTable table;
    table.columns = {"bot_id", "publisher_id", "K", "n_measured", "n_model"};
    for (const auto& r : rows) {
        table.rows.push_back({r.bot_id, r.publisher_id, std::to_string(k),
                              format_value(r.n_measured), format_value(r.n_model)});
    }
    return table;
}

ReportTable curve_report(const std::map<std::string, std::vector<CurvePoint>>& per_bot) {
    ReportTable table;
    table.columns = {"bot_id", "publisher_id", "K", "normalized_occupancy"};
    for (const auto& [bot, points] : per_bot) {
        for (const auto& p : points) {
            table.rows.push_back({bot, p.publisher_id, std::to_string(p.k),
                                  format_value(p.normalized_occupancy)});
        }
    }
    return table;
}

}  // namespace feedaudit
