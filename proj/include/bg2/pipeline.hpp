#pragma once

#include <bg2/manifest.hpp>
#include <bg2/parallel.hpp>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace bg2 {

/// Outcome of one pipeline stage. Failures are collected per job so the others still complete.
struct StageReport {
    std::size_t written = 0; // jobs that produced output
    std::size_t skipped = 0; // jobs already complete with matching content hash
    std::size_t files = 0;   // image or bake files emitted
    std::vector<std::string> errors;

    bool ok() const { return errors.empty(); }
};

/// Applies the BG2_SEED environment override, if set.
void apply_env_overrides(JobManifest& manifest);

/// Seed of texture draw i for one segment.
std::uint64_t texture_seed(std::uint64_t seed, const std::string& video_id, std::uint32_t segment, int index);

namespace layout {
std::filesystem::path segments_manifest(const std::filesystem::path& out, const std::string& video);
std::filesystem::path bake_file(const std::filesystem::path& out, const std::string& video, std::uint32_t segment);
std::filesystem::path layer_png(const std::filesystem::path& out, int texture, const std::string& video,
                                std::uint32_t segment, std::uint32_t frame, const std::string& cam);
std::filesystem::path layer_depth(const std::filesystem::path& out, int texture, const std::string& video,
                                  std::uint32_t segment, std::uint32_t frame, const std::string& cam);
std::filesystem::path composited_png(const std::filesystem::path& out, int texture, const std::string& video,
                                     std::uint32_t segment, std::uint32_t frame, const std::string& cam);
std::filesystem::path job_marker(const std::filesystem::path& out, const std::string& video, std::uint32_t segment,
                                 const std::string& cam, int texture);
std::filesystem::path annotations(const std::filesystem::path& out);
} // namespace layout

/// Stage 1: simulates every video and writes one bake per segment plus bakes/{video}.segments.json.
StageReport cmd_bake(const JobManifest& manifest, int workers = default_workers());

/// Stage 2a: renders `textures` layers per (segment, camera) from existing bakes.
StageReport cmd_render(const JobManifest& manifest, int textures, int workers = default_workers());

/// Stage 2b: composites every rendered layer over its source frame and writes annotations.jsonl.
StageReport cmd_composite(const JobManifest& manifest, int workers = default_workers());

/// Per-category counts of one output tree.
struct CategoryCounts {
    std::set<std::string> subjects;
    std::set<std::string> exercises;
    std::size_t videos = 0;
    std::size_t segments = 0;
    std::size_t frames = 0; // source frames times cameras
    std::size_t layers = 0;
    std::size_t composited = 0;
    std::set<std::string> resolutions;
    std::set<double> framerates;
};

struct DatasetSummary {
    std::map<std::string, CategoryCounts> categories; // Standing, Lying, Alternating
    std::size_t annotation_records = 0;
    std::vector<std::string> problems;

    CategoryCounts total() const;
    bool empty() const;
    /// Aligned text table with one column per category plus Total.
    std::string to_table() const;
};

/// Reads an output tree and cross-checks segment tiling, bake hashes, layer and annotation counts.
DatasetSummary summarize_output(const std::filesystem::path& output_root);

/// Prints the summary; returns the process exit code (non-zero when empty or inconsistent).
int cmd_validate(const std::filesystem::path& output_root, std::ostream& out);

} // namespace bg2
