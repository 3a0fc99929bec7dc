#include "wowbench/ingest.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <png.h>

#include "json.hpp"

#include "wowbench/errors.hpp"

namespace wowbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json parse_line(const std::string& line, const std::string& path, size_t line_no) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        throw InputError("line " + std::to_string(line_no) + ": " + e.what(), path,
                         "line " + std::to_string(line_no));
    }
}

template <typename Fn>
void for_each_json_line(const std::string& path, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file", path, path);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = true;
        for (const char c : line) {
            if (c != ' ' && c != '\t') {
                blank = false;
                break;
            }
        }
        if (blank) continue;
        fn(parse_line(line, path, line_no), line_no);
    }
}

std::string require_string(const json& doc, const char* key, const std::string& path, size_t line_no) {
    if (!doc.contains(key) || !doc[key].is_string()) {
        throw InputError("line " + std::to_string(line_no) + ": missing string field '" + key + "'",
                         path, key);
    }
    return doc[key].get<std::string>();
}

double require_number(const json& value, const std::string& key, const std::string& path,
                      size_t line_no) {
    if (!value.is_number()) {
        throw InputError("line " + std::to_string(line_no) + ": field '" + key + "' is not a number",
                         path, key);
    }
    return value.get<double>();
}

}  // namespace

std::vector<EvaluationRecord> read_records(const std::string& path) {
    std::vector<EvaluationRecord> records;
    for_each_json_line(path, [&](const json& doc, size_t line_no) {
        EvaluationRecord record;
        record.model_id = require_string(doc, "model_id", path, line_no);
        record.sample_id = require_string(doc, "sample_id", path, line_no);
        if (doc.contains("measurements")) {
            if (!doc["measurements"].is_object()) {
                throw InputError("line " + std::to_string(line_no) + ": 'measurements' must be an object",
                                 path, "measurements");
            }
            for (const auto& [metric_id, value] : doc["measurements"].items()) {
                record.measurements[metric_id] = require_number(value, metric_id, path, line_no);
            }
        }
        records.push_back(std::move(record));
    });
    return records;
}

std::vector<TrajectoryDoc> read_trajectory_docs(const std::string& path) {
    std::vector<TrajectoryDoc> docs;
    for_each_json_line(path, [&](const json& doc, size_t line_no) {
        TrajectoryDoc out;
        if (doc.contains("model_id")) out.model_id = require_string(doc, "model_id", path, line_no);
        out.sample_id = require_string(doc, "sample_id", path, line_no);
        if (!doc.contains("tracks") || !doc["tracks"].is_array()) {
            throw InputError("line " + std::to_string(line_no) + ": missing array field 'tracks'", path,
                             "tracks");
        }
        for (const auto& track_doc : doc["tracks"]) {
            Trajectory track;
            track.track_id = require_string(track_doc, "track_id", path, line_no);
            try {
                track.entity =
                    track_entity_from_string(require_string(track_doc, "entity", path, line_no));
            } catch (const std::invalid_argument& e) {
                throw InputError("line " + std::to_string(line_no) + ": " + e.what(), path, "entity");
            }
            if (!track_doc.contains("points") || !track_doc["points"].is_array() ||
                track_doc["points"].empty()) {
                throw InputError("line " + std::to_string(line_no) + ": track '" + track.track_id +
                                     "' needs a nonempty 'points' array",
                                 path, "points");
            }
            for (const auto& pt : track_doc["points"]) {
                if (!pt.is_array() || pt.size() != 2) {
                    throw InputError("line " + std::to_string(line_no) + ": points must be [x, y] pairs",
                                     path, "points");
                }
                Point2 p{require_number(pt[0], "points", path, line_no),
                         require_number(pt[1], "points", path, line_no)};
                if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
                    throw InputError("line " + std::to_string(line_no) + ": non-finite coordinate", path,
                                     "points");
                }
                track.points.push_back(p);
            }
            out.tracks.push_back(std::move(track));
        }
        docs.push_back(std::move(out));
    });
    return docs;
}

std::vector<PlanDoc> read_plan_docs(const std::string& path) {
    std::vector<PlanDoc> docs;
    for_each_json_line(path, [&](const json& doc, size_t line_no) {
        PlanDoc out;
        if (doc.contains("model_id")) out.model_id = require_string(doc, "model_id", path, line_no);
        out.sample_id = require_string(doc, "sample_id", path, line_no);
        if (!doc.contains("steps") || !doc["steps"].is_array()) {
            throw InputError("line " + std::to_string(line_no) + ": missing array field 'steps'", path,
                             "steps");
        }
        for (const auto& step : doc["steps"]) {
            if (!step.is_string()) {
                throw InputError("line " + std::to_string(line_no) + ": steps must be strings", path,
                                 "steps");
            }
            out.steps.push_back(step.get<std::string>());
        }
        docs.push_back(std::move(out));
    });
    return docs;
}

std::vector<DagDoc> read_dag_docs(const std::string& path) {
    std::vector<DagDoc> docs;
    for_each_json_line(path, [&](const json& doc, size_t line_no) {
        const std::string sample_id = require_string(doc, "sample_id", path, line_no);
        if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
            throw InputError("line " + std::to_string(line_no) + ": missing array field 'nodes'", path,
                             "nodes");
        }
        std::vector<PlanNode> nodes;
        for (const auto& node_doc : doc["nodes"]) {
            PlanNode node;
            node.node_id = require_string(node_doc, "id", path, line_no);
            node.action = require_string(node_doc, "action", path, line_no);
            nodes.push_back(std::move(node));
        }
        std::vector<std::pair<std::string, std::string>> edges;
        if (doc.contains("edges")) {
            if (!doc["edges"].is_array()) {
                throw InputError("line " + std::to_string(line_no) + ": 'edges' must be an array", path,
                                 "edges");
            }
            for (const auto& edge : doc["edges"]) {
                if (!edge.is_array() || edge.size() != 2 || !edge[0].is_string() ||
                    !edge[1].is_string()) {
                    throw InputError("line " + std::to_string(line_no) + ": edges must be [from, to]",
                                     path, "edges");
                }
                edges.emplace_back(edge[0].get<std::string>(), edge[1].get<std::string>());
            }
        }
        try {
            docs.push_back({sample_id, PlanDag::build(std::move(nodes), edges)});
        } catch (const std::invalid_argument& e) {
            throw InputError("line " + std::to_string(line_no) + " (sample '" + sample_id +
                                 "'): " + e.what(),
                             path, sample_id);
        }
    });
    return docs;
}

std::vector<EmbeddingDoc> read_embedding_docs(const std::string& path) {
    std::vector<EmbeddingDoc> docs;
    for_each_json_line(path, [&](const json& doc, size_t line_no) {
        EmbeddingDoc out;
        if (doc.contains("model_id")) out.model_id = require_string(doc, "model_id", path, line_no);
        out.sample_id = require_string(doc, "sample_id", path, line_no);
        if (!doc.contains("regions") || !doc["regions"].is_array()) {
            throw InputError("line " + std::to_string(line_no) + ": missing array field 'regions'", path,
                             "regions");
        }
        for (const auto& region_doc : doc["regions"]) {
            RegionEmbeddingSequence seq;
            try {
                seq.region = region_from_string(require_string(region_doc, "region", path, line_no));
            } catch (const std::invalid_argument& e) {
                throw InputError("line " + std::to_string(line_no) + ": " + e.what(), path, "region");
            }
            for (const auto& other : out.regions) {
                if (other.region == seq.region) {
                    throw InputError("line " + std::to_string(line_no) + ": duplicate region '" +
                                         to_string(seq.region) + "'",
                                     path, "region");
                }
            }
            if (!region_doc.contains("frames") || !region_doc["frames"].is_array()) {
                throw InputError("line " + std::to_string(line_no) + ": region needs a 'frames' array",
                                 path, "frames");
            }
            for (const auto& frame : region_doc["frames"]) {
                if (!frame.is_array() || frame.empty()) {
                    throw InputError(
                        "line " + std::to_string(line_no) + ": frames must be nonempty arrays", path,
                        "frames");
                }
                std::vector<double> v;
                v.reserve(frame.size());
                for (const auto& component : frame) {
                    v.push_back(require_number(component, "frames", path, line_no));
                }
                seq.frames.push_back(std::move(v));
            }
            out.regions.push_back(std::move(seq));
        }
        docs.push_back(std::move(out));
    });
    return docs;
}

std::vector<FramesDoc> read_frames_docs(const std::string& path) {
    std::vector<FramesDoc> docs;
    for_each_json_line(path, [&](const json& doc, size_t line_no) {
        FramesDoc out;
        out.model_id = require_string(doc, "model_id", path, line_no);
        out.sample_id = require_string(doc, "sample_id", path, line_no);
        for (const char* key : {"generated", "reference"}) {
            if (!doc.contains(key) || !doc[key].is_array()) {
                throw InputError("line " + std::to_string(line_no) + ": missing array field '" +
                                     std::string(key) + "'",
                                 path, key);
            }
            auto& target = std::string(key) == "generated" ? out.generated : out.reference;
            for (const auto& entry : doc[key]) {
                if (!entry.is_string()) {
                    throw InputError("line " + std::to_string(line_no) + ": frame paths must be strings",
                                     path, key);
                }
                target.push_back(entry.get<std::string>());
            }
        }
        docs.push_back(std::move(out));
    });
    return docs;
}

std::vector<RatingRow> read_ratings(const std::string& path) {
    std::vector<RatingRow> rows;
    for_each_json_line(path, [&](const json& doc, size_t line_no) {
        RatingRow row;
        row.model_id = require_string(doc, "model_id", path, line_no);
        row.sample_id = require_string(doc, "sample_id", path, line_no);
        row.metric_id = require_string(doc, "metric_id", path, line_no);
        if (!doc.contains("rating")) {
            throw InputError("line " + std::to_string(line_no) + ": missing field 'rating'", path,
                             "rating");
        }
        row.rating = require_number(doc["rating"], "rating", path, line_no);
        if (!std::isfinite(row.rating)) {
            throw InputError("line " + std::to_string(line_no) + ": non-finite rating", path, "rating");
        }
        rows.push_back(std::move(row));
    });
    return rows;
}

namespace {

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* file = nullptr;
    ~PngReadCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (file) std::fclose(file);
    }
};

}  // namespace

Frame read_png(const std::string& path) {
    PngReadCloser guard;
    guard.file = std::fopen(path.c_str(), "rb");
    if (!guard.file) throw InputError("cannot open PNG", path, path);

    guard.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!guard.png) throw InputError("png_create_read_struct failed", path, path);
    guard.info = png_create_info_struct(guard.png);
    if (!guard.info) throw InputError("png_create_info_struct failed", path, path);
    if (setjmp(png_jmpbuf(guard.png))) {
        throw InputError("PNG decode error", path, path);
    }

    png_init_io(guard.png, guard.file);
    png_read_info(guard.png, guard.info);

    // Normalize everything to 8-bit RGB.
    png_set_strip_16(guard.png);
    png_set_palette_to_rgb(guard.png);
    png_set_expand_gray_1_2_4_to_8(guard.png);
    if (png_get_valid(guard.png, guard.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(guard.png);
    png_set_strip_alpha(guard.png);
    png_set_gray_to_rgb(guard.png);
    png_read_update_info(guard.png, guard.info);

    const png_uint_32 width = png_get_image_width(guard.png, guard.info);
    const png_uint_32 height = png_get_image_height(guard.png, guard.info);
    const png_byte channels = png_get_channels(guard.png, guard.info);
    if (channels != 3) throw InputError("expected RGB after PNG normalization", path, path);

    std::vector<std::uint8_t> interleaved(static_cast<size_t>(width) * height * 3);
    std::vector<png_bytep> row_ptrs(height);
    for (png_uint_32 y = 0; y < height; ++y) {
        row_ptrs[y] = interleaved.data() + static_cast<size_t>(y) * width * 3;
    }
    png_read_image(guard.png, row_ptrs.data());
    png_read_end(guard.png, nullptr);

    Frame frame;
    frame.width = static_cast<int>(width);
    frame.height = static_cast<int>(height);
    frame.channels = 3;
    frame.data.resize(interleaved.size());
    const size_t plane = static_cast<size_t>(width) * height;
    for (size_t i = 0; i < plane; ++i) {
        for (size_t c = 0; c < 3; ++c) {
            frame.data[c * plane + i] = interleaved[i * 3 + c];
        }
    }
    return frame;
}

std::vector<Frame> read_raw_dump(const std::string& path) {
    const std::string header_path = path + ".hdr.json";
    json header;
    try {
        header = json::parse(read_text_file(header_path));
    } catch (const json::parse_error& e) {
        throw InputError(std::string("bad raw header: ") + e.what(), header_path, header_path);
    }
    const auto read_dim = [&](const char* key) {
        if (!header.contains(key) || !header[key].is_number_integer()) {
            throw InputError("raw header missing integer field '" + std::string(key) + "'", header_path,
                             key);
        }
        const long long v = header[key].get<long long>();
        if (v <= 0) throw InputError("raw header field '" + std::string(key) + "' must be positive",
                                     header_path, key);
        return static_cast<size_t>(v);
    };
    const size_t width = read_dim("width");
    const size_t height = read_dim("height");
    const size_t channels = header.contains("channels") ? read_dim("channels") : 3;
    const size_t frames = read_dim("frames");

    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open raw dump", path, path);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const size_t frame_bytes = width * height * channels;
    if (bytes.size() != frame_bytes * frames) {
        throw InputError("raw dump size " + std::to_string(bytes.size()) + " does not match header (" +
                             std::to_string(frame_bytes * frames) + " bytes expected)",
                         path, path);
    }

    std::vector<Frame> out(frames);
    for (size_t f = 0; f < frames; ++f) {
        Frame& frame = out[f];
        frame.width = static_cast<int>(width);
        frame.height = static_cast<int>(height);
        frame.channels = static_cast<int>(channels);
        const char* src = bytes.data() + f * frame_bytes;
        frame.data.assign(reinterpret_cast<const std::uint8_t*>(src),
                          reinterpret_cast<const std::uint8_t*>(src) + frame_bytes);
    }
    return out;
}

std::vector<Frame> read_frame_source(const std::string& entry, const std::string& base_dir) {
    fs::path p(entry);
    if (p.is_relative()) p = fs::path(base_dir) / p;
    const std::string resolved = p.string();
    if (resolved.size() >= 4 && resolved.substr(resolved.size() - 4) == ".png") {
        return {read_png(resolved)};
    }
    return read_raw_dump(resolved);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file", path, path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open file for writing", path, path);
    out << content;
    if (!out) throw InputError("write failed", path, path);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const char c : bytes) {
        hash ^= static_cast<std::uint8_t>(c);
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::string fnv1a64_hex(std::string_view bytes) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace wowbench
