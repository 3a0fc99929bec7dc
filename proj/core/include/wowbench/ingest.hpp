#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wowbench/consistency.hpp"
#include "wowbench/plan.hpp"
#include "wowbench/registry.hpp"
#include "wowbench/trajectory.hpp"

namespace wowbench {

/// One line of a trajectory file: every track of one video.
struct TrajectoryDoc {
    std::string model_id;  // empty in reference files
    std::string sample_id;
    std::vector<Trajectory> tracks;
};

/// One predicted plan (linear step list).
struct PlanDoc {
    std::string model_id;
    std::string sample_id;
    std::vector<std::string> steps;
};

/// One ground-truth plan DAG.
struct DagDoc {
    std::string sample_id;
    PlanDag dag;
};

/// Per-region embedding sequences of one generated video.
struct EmbeddingDoc {
    std::string model_id;
    std::string sample_id;
    std::vector<RegionEmbeddingSequence> regions;
};

/// Frame-sequence index entry: generated and reference frame sources, paired
/// by position after expansion. Paths are resolved against the index file's
/// directory; a source is a PNG (one frame) or a raw planar dump (sidecar
/// header <path>.hdr.json with width/height/channels/frames).
struct FramesDoc {
    std::string model_id;
    std::string sample_id;
    std::vector<std::string> generated;
    std::vector<std::string> reference;
};

struct RatingRow {
    std::string model_id;
    std::string sample_id;
    std::string metric_id;
    double rating = 0.0;
};

// All readers take JSON-lines files (one document per line, UTF-8) and throw
// InputError carrying the file path and offending key.
std::vector<EvaluationRecord> read_records(const std::string& path);
std::vector<TrajectoryDoc> read_trajectory_docs(const std::string& path);
std::vector<PlanDoc> read_plan_docs(const std::string& path);
std::vector<DagDoc> read_dag_docs(const std::string& path);
std::vector<EmbeddingDoc> read_embedding_docs(const std::string& path);
std::vector<FramesDoc> read_frames_docs(const std::string& path);
std::vector<RatingRow> read_ratings(const std::string& path);

Frame read_png(const std::string& path);
std::vector<Frame> read_raw_dump(const std::string& path);

/// Expands one index entry (PNG or raw dump) into frames.
std::vector<Frame> read_frame_source(const std::string& entry, const std::string& base_dir);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace wowbench
