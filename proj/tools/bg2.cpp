// Command-line front end: the two pipeline stages, dataset validation and pose evaluation.
#include <bg2/eval.hpp>
#include <bg2/fixtures.hpp>
#include <bg2/image_io.hpp>
#include <bg2/mesh_io.hpp>
#include <bg2/pipeline.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

bg2::JobManifest manifest_from(const std::string& path)
{
    bg2::JobManifest m = bg2::load_manifest(path);
    bg2::apply_env_overrides(m);
    return m;
}

int finish(const char* stage, const bg2::StageReport& r)
{
    for (const auto& e : r.errors)
        fmt::print(stderr, "error: {}\n", e);
    fmt::print("{}: {} jobs done, {} skipped, {} files, {} errors\n", stage, r.written, r.skipped, r.files,
               r.errors.size());
    return r.ok() ? 0 : 1;
}

// Metric rows from a JSON array, a {"rows": [...]} object, a single row, or JSON lines.
std::vector<bg2::MetricRow> load_rows(const fs::path& path)
{
    const std::string text = bg2::read_file(path);
    std::vector<bg2::MetricRow> rows;
    auto take = [&rows](const nlohmann::json& j) {
        if (j.is_array())
            for (const auto& r : j)
                rows.push_back(bg2::metric_row_from_json(r));
        else if (j.contains("rows"))
            for (const auto& r : j["rows"])
                rows.push_back(bg2::metric_row_from_json(r));
        else
            rows.push_back(bg2::metric_row_from_json(j));
    };
    try {
        take(nlohmann::json::parse(text));
    } catch (const nlohmann::json::parse_error&) {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line))
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                take(nlohmann::json::parse(line));
    }
    return rows;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Synthetic blanket occlusion toolkit"};
    app.require_subcommand(1);

    std::string manifest;
    int workers = bg2::default_workers();
    int textures = 1;

    auto* bake = app.add_subcommand("bake", "Simulate cloth for every video and write bake files");
    bake->add_option("-m,--manifest", manifest, "Job manifest")->required()->check(CLI::ExistingFile);
    bake->add_option("-j,--jobs", workers, "Worker threads")->check(CLI::PositiveNumber);

    auto* render = app.add_subcommand("render", "Render RGBA blanket layers from existing bakes");
    render->add_option("-m,--manifest", manifest, "Job manifest")->required()->check(CLI::ExistingFile);
    render->add_option("-n,--textures", textures, "Texture draws per segment and camera")->required()->check(
        CLI::NonNegativeNumber);
    render->add_option("-j,--jobs", workers, "Worker threads")->check(CLI::PositiveNumber);

    auto* composite = app.add_subcommand("composite", "Composite layers over source frames and write annotations");
    composite->add_option("-m,--manifest", manifest, "Job manifest")->required()->check(CLI::ExistingFile);
    composite->add_option("-j,--jobs", workers, "Worker threads")->check(CLI::PositiveNumber);

    std::string outRoot;
    auto* validate = app.add_subcommand("validate", "Summarise and cross-check an output tree");
    validate->add_option("-o,--output", outRoot, "Output root")->required();

    std::string pred, gt, rig, map, split = "none", testSet, model, blanket = "No", rowsOut;
    auto* eval = app.add_subcommand("eval", "PCK@0.05 and NME of predictions against ground truth");
    eval->add_option("--pred", pred, "Prediction JSON lines")->required()->check(CLI::ExistingFile);
    eval->add_option("--gt", gt, "Ground-truth JSON lines")->required()->check(CLI::ExistingFile);
    eval->add_option("--rig", rig, "Target rig config")->required()->check(CLI::ExistingFile);
    eval->add_option("--map", map, "Skeleton map applied to predictions")->check(CLI::ExistingFile);
    eval->add_option("--split", split, "Ground-truth split filter")->check(CLI::IsMember({"none", "cover", "uncover"}));
    eval->add_option("--test-set", testSet, "Test-set name for the emitted metric row");
    eval->add_option("--model", model, "Model name for the emitted metric row");
    eval->add_option("--blanket", blanket, "Blanket condition (No, Synthetic, Real)");
    eval->add_option("--row-out", rowsOut, "Append the metric row to this JSON-lines file");
    eval->add_option("-j,--jobs", workers, "Worker threads")->check(CLI::PositiveNumber);

    std::vector<std::string> inputs;
    std::string csvOut;
    auto* report = app.add_subcommand("report", "Metric table with per-set difference rows");
    report->add_option("--inputs", inputs, "Metric row files (JSON or JSON lines)")->required()->check(CLI::ExistingFile);
    report->add_option("--csv", csvOut, "Also write the table as CSV");

    std::string demoRoot;
    bg2::fixtures::DemoOptions demo;
    auto* fixture = app.add_subcommand("fixture", "Write a synthetic capsule-body demo dataset");
    fixture->add_option("-o,--output", demoRoot, "Directory to create")->required();
    fixture->add_option("--frames", demo.frames, "Frames per video");
    fixture->add_option("--size", demo.image_size, "Square image size in pixels");
    fixture->add_option("--videos", demo.videos, "Number of videos");
    fixture->add_flag("--walking", demo.walking, "Later videos slide out from under the blanket");
    fixture->add_option("--seed", demo.seed, "Manifest seed");

    std::string objDir, bgmsOut;
    double fps = 50.0;
    auto* importObj = app.add_subcommand("import-obj", "Convert a directory of per-frame OBJ files to BGMS");
    importObj->add_option("dir", objDir, "OBJ directory")->required()->check(CLI::ExistingDirectory);
    importObj->add_option("-o,--output", bgmsOut, "BGMS file")->required();
    importObj->add_option("--fps", fps, "Frame rate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*bake)
            return finish("bake", bg2::cmd_bake(manifest_from(manifest), workers));
        if (*render)
            return finish("render", bg2::cmd_render(manifest_from(manifest), textures, workers));
        if (*composite)
            return finish("composite", bg2::cmd_composite(manifest_from(manifest), workers));
        if (*validate)
            return bg2::cmd_validate(outRoot, std::cout);
        if (*eval) {
            const bg2::Rig r = bg2::load_rig(rig);
            std::optional<bg2::SkeletonMap> m;
            if (!map.empty())
                m = bg2::load_skeleton_map(map);
            const auto metrics = bg2::evaluate_set(bg2::load_pose_records(pred), bg2::load_pose_records(gt), r,
                                                   m ? &*m : nullptr, bg2::parse_split(split), workers);
            fmt::print("frames {}  PCK@0.05 {:.3f}  NME {:.3f}\n", metrics.frames, metrics.pck, metrics.nme);
            if (!rowsOut.empty()) {
                const bg2::MetricRow row{testSet, bg2::parse_blanket(blanket), model, metrics.pck, metrics.nme};
                std::ofstream(rowsOut, std::ios::app) << bg2::to_json(row).dump() << "\n";
            }
            return 0;
        }
        if (*report) {
            std::vector<bg2::MetricRow> rows;
            for (const auto& in : inputs) {
                auto more = load_rows(in);
                rows.insert(rows.end(), more.begin(), more.end());
            }
            const bg2::MetricReport rep = bg2::build_report(rows);
            std::cout << rep.to_text();
            if (!csvOut.empty())
                bg2::write_file_atomic(csvOut, rep.to_csv());
            return 0;
        }
        if (*fixture) {
            fmt::print("{}\n", bg2::fixtures::write_demo_dataset(demoRoot, demo).string());
            return 0;
        }
        if (*importObj) {
            bg2::save_bgms(bgmsOut, bg2::import_obj_directory(objDir, fps));
            return 0;
        }
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
