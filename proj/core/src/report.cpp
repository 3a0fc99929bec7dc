#include "wowbench/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "wowbench/errors.hpp"
#include "wowbench/ingest.hpp"

namespace wowbench {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct JsonLines {
    ordered_json meta;
    std::vector<ordered_json> rows;
};

JsonLines read_jsonl(const std::string& path) {
    JsonLines out;
    std::istringstream in(read_text_file(path));
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json doc;
        try {
            doc = ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError("line " + std::to_string(line_no) + ": " + e.what(), path,
                             "line " + std::to_string(line_no));
        }
        if (doc.is_object() && doc.value("record_type", "") == "meta") {
            out.meta = doc;
        } else {
            out.rows.push_back(std::move(doc));
        }
    }
    return out;
}

std::string format_fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string stamp_from_meta(const ordered_json& meta) {
    return "# registry=" + meta.value("registry_hash", std::string("none")) +
           " frozen=" + meta.value("frozen_hash", std::string("none")) +
           " seed=" + std::to_string(meta.value("seed", 0ULL)) +
           " folds=" + std::to_string(meta.value("folds", 0)) + "\n";
}

std::vector<std::string> collect_group_ids(const JsonLines& board) {
    std::vector<std::string> group_ids;
    if (!board.rows.empty() && board.rows.front().contains("groups")) {
        for (const auto& [gid, value] : board.rows.front()["groups"].items()) {
            group_ids.push_back(gid);
        }
    }
    return group_ids;
}

}  // namespace

void run_report(const std::string& scored_dir,
                const std::string& out_dir,
                ReportFormat format,
                std::ostream& diag) {
    const fs::path in(scored_dir);
    const fs::path board_path = in / "leaderboard.jsonl";
    if (!fs::exists(board_path)) {
        throw InputError("missing leaderboard.jsonl (run score first)", board_path.string(),
                         "leaderboard.jsonl");
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw InputError("cannot create output directory: " + ec.message(), out_dir, "out");

    const JsonLines board = read_jsonl(board_path.string());
    const std::vector<std::string> group_ids = collect_group_ids(board);
    const std::string stamp = stamp_from_meta(board.meta);

    auto group_value = [](const ordered_json& row, const std::string& gid) -> double {
        const auto& g = row["groups"][gid]["value"];
        return g.is_number() ? g.get<double>() : std::numeric_limits<double>::quiet_NaN();
    };

    if (format == ReportFormat::Markdown) {
        std::map<std::string, double> best_group;
        double best_overall = -std::numeric_limits<double>::infinity();
        for (const auto& row : board.rows) {
            best_overall = std::max(best_overall, row["overall"].get<double>());
            for (const auto& gid : group_ids) {
                const double v = group_value(row, gid);
                if (std::isnan(v)) continue;
                auto [it, inserted] = best_group.emplace(gid, v);
                if (!inserted) it->second = std::max(it->second, v);
            }
        }
        std::ostringstream md;
        md << "| Rank | Model |";
        for (const auto& gid : group_ids) md << " " << gid << " |";
        md << " Overall |\n| --- | --- |";
        for (size_t i = 0; i < group_ids.size(); ++i) md << " --- |";
        md << " --- |\n";
        for (const auto& row : board.rows) {
            md << "| " << row["rank"].get<int>() << " | " << row["model_id"].get<std::string>()
               << " |";
            for (const auto& gid : group_ids) {
                const double v = group_value(row, gid);
                if (std::isnan(v)) {
                    md << " - |";
                } else if (v == best_group[gid]) {
                    md << " **" << format_fixed2(v) << "** |";
                } else {
                    md << " " << format_fixed2(v) << " |";
                }
            }
            const double overall = row["overall"].get<double>();
            if (overall == best_overall) {
                md << " **" << format_fixed2(overall) << "** |\n";
            } else {
                md << " " << format_fixed2(overall) << " |\n";
            }
        }
        md << "\n_registry " << board.meta.value("registry_hash", std::string("none")) << " · frozen "
           << board.meta.value("frozen_hash", std::string("none")) << " · seed "
           << board.meta.value("seed", 0ULL) << " · folds " << board.meta.value("folds", 0) << "_\n";
        write_text_file((fs::path(out_dir) / "leaderboard.md").string(), md.str());
    } else if (format == ReportFormat::Csv) {
        std::ostringstream csv;
        csv << stamp << "rank,model_id,overall";
        for (const auto& gid : group_ids) csv << "," << gid;
        csv << "\n";
        for (const auto& row : board.rows) {
            csv << row["rank"].get<int>() << "," << row["model_id"].get<std::string>() << ","
                << format_fixed2(row["overall"].get<double>());
            for (const auto& gid : group_ids) {
                const double v = group_value(row, gid);
                csv << "," << (std::isnan(v) ? std::string() : format_fixed2(v));
            }
            csv << "\n";
        }
        write_text_file((fs::path(out_dir) / "leaderboard_report.csv").string(), csv.str());
    } else {
        std::ostringstream jsonl;
        jsonl << board.meta.dump() << "\n";
        for (const auto& row : board.rows) jsonl << row.dump() << "\n";
        write_text_file((fs::path(out_dir) / "leaderboard_report.jsonl").string(), jsonl.str());
    }

    // Plot-data series keep full precision.
    std::ostringstream bars;
    bars << stamp << "model_id,group_id,value,n\n";
    for (const auto& row : board.rows) {
        for (const auto& gid : group_ids) {
            const auto& g = row["groups"][gid];
            bars << row["model_id"].get<std::string>() << "," << gid << ",";
            if (g["value"].is_number()) bars << g["value"].dump();
            bars << "," << g["n"].dump() << "\n";
        }
    }
    write_text_file((fs::path(out_dir) / "group_bars.csv").string(), bars.str());

    const fs::path samples_path = in / "sample_metrics.jsonl";
    if (fs::exists(samples_path)) {
        const JsonLines samples = read_jsonl(samples_path.string());
        std::ostringstream dist;
        dist << stamp << "metric_id,model_id,sample_id,value\n";
        for (const auto& row : samples.rows) {
            if (!row.contains("metrics")) continue;
            for (const auto& [metric_id, value] : row["metrics"].items()) {
                dist << metric_id << "," << row["model_id"].get<std::string>() << ","
                     << row["sample_id"].get<std::string>() << ",";
                if (value.is_number()) {
                    dist << value.dump();
                } else if (value.is_string()) {
                    dist << value.get<std::string>();
                }
                dist << "\n";
            }
        }
        write_text_file((fs::path(out_dir) / "metric_distributions.csv").string(), dist.str());
    } else {
        diag << "warning: sample_metrics.jsonl not found; metric distributions skipped\n";
    }
}

}  // namespace wowbench
