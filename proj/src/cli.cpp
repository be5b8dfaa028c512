#include "gazekit/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "gazekit/attributes.hpp"
#include "gazekit/config.hpp"
#include "gazekit/crops.hpp"
#include "gazekit/error.hpp"
#include "gazekit/fixation.hpp"
#include "gazekit/io.hpp"
#include "gazekit/kar.hpp"
#include "gazekit/metrics.hpp"
#include "gazekit/saliency.hpp"

namespace gazekit::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Size2 parse_size(const std::string& text) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) throw ConfigError("size must look like WxH, got '" + text + "'");
    try {
        std::size_t used_w = 0;
        std::size_t used_h = 0;
        const int w = std::stoi(text.substr(0, x), &used_w);
        const int h = std::stoi(text.substr(x + 1), &used_h);
        if (used_w != x || used_h != text.size() - x - 1 || w <= 0 || h <= 0) throw std::invalid_argument(text);
        return {w, h};
    } catch (const std::logic_error&) {
        throw ConfigError("size must look like WxH with positive integers, got '" + text + "'");
    }
}

std::vector<std::pair<int, int>> load_pairs(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file", path.string());
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("pairs CSV is empty (header row required)");
    std::vector<std::pair<int, int>> pairs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("expected class_a,class_b", lineno);
        try {
            pairs.emplace_back(std::stoi(line.substr(0, comma)), std::stoi(line.substr(comma + 1)));
        } catch (const std::logic_error&) {
            throw ParseError("class ids must be integers", lineno);
        }
    }
    return pairs;
}

json number_or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json report_header(const char* kind) { return json{{"schema_version", kSchemaVersion}, {"kind", kind}}; }

// ---- subcommand bodies ----------------------------------------------------

struct FixateArgs {
    std::string gaze, geometry, out;
};

void run_fixate(const FixateArgs& a, PipelineConfig cfg, std::ostream& out) {
    if (!a.geometry.empty()) {
        cfg.geometry = load_geometry(a.geometry);
        cfg.ivt.geometry = cfg.geometry;
    }
    const auto samples = load_gaze_csv(a.gaze);
    const auto fixations = detect_fixations(samples, cfg.ivt);
    write_fixation_csv(fixations, a.out);
    out << "fixate: " << samples.size() << " samples -> " << fixations.size() << " fixations\n";
}

struct RenderArgs {
    std::string fixations, geometry, size, out;
    int depth = 8;
    std::optional<double> sigma;
    bool exact = false;
};

void run_render(const RenderArgs& a, PipelineConfig cfg, std::ostream& out) {
    if (!a.geometry.empty()) cfg.geometry = load_geometry(a.geometry);
    if (a.sigma) cfg.render.sigma = *a.sigma;
    if (a.exact) cfg.render.exact = true;
    const Size2 display{cfg.geometry.screen_resolution_x, cfg.geometry.screen_resolution_y};
    const Size2 size = a.size.empty() ? display : parse_size(a.size);
    const auto fixations = load_fixation_csv(a.fixations);
    const auto map = render_saliency(fixations, cfg.render_config(size));
    write_saliency_image(map, a.out, a.depth);
    out << "render: " << fixations.size() << " fixations -> " << size.width << "x" << size.height
        << (map.is_all_zero() ? " (empty map)" : "") << "\n";
}

struct CropsArgs {
    std::string saliency, image, preset, out_dir, manifest_out, image_id, resize;
    std::vector<int> k;
    std::optional<double> nms;
    std::optional<int> stride;
};

void run_crops(const CropsArgs& a, PipelineConfig cfg, std::ostream& out) {
    if (!a.preset.empty()) {
        cfg.windows.preset = a.preset;
        cfg.windows.custom.clear();
    }
    if (!a.k.empty()) {
        if (a.k.size() != 3) throw ConfigError("--k expects three counts: large,medium,small");
        cfg.windows.k = {a.k[0], a.k[1], a.k[2]};
    }
    if (a.nms) cfg.windows.nms_iou = *a.nms;
    if (a.stride) cfg.windows.stride = *a.stride;
    if (!a.resize.empty()) cfg.windows.resize_to = parse_size(a.resize);

    const auto image = read_raster_image(a.image);
    auto map = read_saliency_image(a.saliency);
    if (map.size() != image.size()) map = resize_bilinear(map, image.size());
    const Size2 resize_to = cfg.windows.resize_to.value_or(Size2{image.width() / 2, image.height() / 2});
    const std::string id = a.image_id.empty() ? fs::path(a.image).stem().string() : a.image_id;
    const auto specs = cfg.windows.specs();
    const auto plan = plan_crops(map, specs, resize_to, cfg.windows.nms_iou, id);
    const auto crops = extract_and_resize({image, 0}, plan);

    fs::create_directories(a.out_dir);
    json boxes = json::array();
    for (std::size_t i = 0; i < crops.size(); ++i) {
        const auto& b = crops[i].box;
        const std::string file = id + "_crop" + std::to_string(i) + "_" + std::string(scale_name(b.scale)) + ".png";
        write_raster_image(crops[i].image, fs::path(a.out_dir) / file);
        boxes.push_back({{"x", b.x}, {"y", b.y}, {"w", b.width}, {"h", b.height}, {"score", b.score},
                         {"scale", scale_name(b.scale)}, {"file", file}});
    }
    auto report = report_header("crops");
    report["image_id"] = id;
    report["resize_to"] = {resize_to.width, resize_to.height};
    report["nms_iou"] = cfg.windows.nms_iou;
    report["degenerate"] = plan.degenerate;
    report["boxes"] = boxes;
    write_json_atomic(a.manifest_out, report);
    out << "crops: " << plan.boxes.size() << " boxes" << (plan.degenerate ? " (degenerate all-zero map)" : "")
        << "\n";
}

struct ApplyArgs {
    std::string image, saliency, out;
};

void run_apply(const ApplyArgs& a, std::ostream& out, std::ostream& err) {
    const auto image = read_raster_image(a.image);
    const auto map = read_saliency_image(a.saliency);
    const auto result = apply_attention(image, map);
    if (result.zero_map) err << "warning: saliency map is all zero; output image is black\n";
    write_raster_image(result.image, a.out);
    out << "apply-attention: wrote " << a.out << "\n";
}

struct KarMaskArgs {
    std::string saliency, out, image;
    double percent = 0.0;
};

void run_kar_mask(const KarMaskArgs& a, std::ostream& out) {
    const auto map = read_saliency_image(a.saliency);
    const auto mask = keep_mask(map, a.percent);
    if (!a.image.empty()) {
        const auto image = read_raster_image(a.image);
        write_raster_image(apply_mask(image, mask), a.out);
    } else {
        RasterImage binary(mask.width, mask.height, 1, 0.0);
        for (std::size_t i = 0; i < mask.kept.size(); ++i) binary.values()[i] = mask.kept[i] ? 1.0 : 0.0;
        write_raster_image(binary, a.out);
    }
    out << "kar-mask: kept " << mask.kept_count() << " of " << mask.kept.size() << " pixels\n";
}

struct KarRunArgs {
    std::string manifest, saliency_dir, out;
    std::vector<double> percents;
};

void run_kar(const KarRunArgs& a, PipelineConfig cfg, std::ostream& out) {
    if (!a.percents.empty()) cfg.kar.percents = a.percents;
    const auto manifest = load_manifest(a.manifest);
    const auto base = fs::path(a.manifest).parent_path();
    KarDataset data;
    for (std::size_t i = 0; i < manifest.images.size(); ++i) {
        const auto& rec = manifest.images[i];
        auto image = read_raster_image(base / rec.path);
        auto map = read_saliency_image(fs::path(a.saliency_dir) / (rec.id + ".png"));
        const bool test = rec.split ? *rec.split == "test" : i % 3 == 2;
        (test ? data.test : data.train).push_back({std::move(image), rec.label});
        (test ? data.test_maps : data.train_maps).push_back(std::move(map));
    }
    const auto curve = kar_run(data, cfg.kar.percents, cfg.kar.train, cfg.workers);

    json points = json::array();
    for (const auto& p : curve.points) {
        json jp{{"percent", p.percent}, {"accuracy", p.accuracy}};
        if (p.error) jp["error"] = *p.error;
        points.push_back(jp);
    }
    const auto& t = cfg.kar.train;
    auto report = report_header("kar");
    report["points"] = points;
    report["auc"] = curve.auc;
    report["auc_convention"] = "trapezoid over percent/100 divided by covered range";
    report["train_images"] = data.train.size();
    report["test_images"] = data.test.size();
    report["config"] = {{"epochs", t.epochs},
                        {"learning_rate", t.learning_rate},
                        {"lr_decay_factor", t.lr_decay_factor},
                        {"lr_decay_every", t.lr_decay_every},
                        {"batch_size", t.batch_size},
                        {"feature_dim", t.feature_dim},
                        {"seed", t.seed},
                        {"percents", cfg.kar.percents}};
    write_json_atomic(a.out, report);
    out << "kar-run: AUC " << curve.auc << " over " << curve.points.size() << " points\n";
}

struct CompareArgs {
    std::string candidate, reference, fixations, negatives, baseline, out;
};

void run_compare(const CompareArgs& a, const PipelineConfig& cfg, std::ostream& out) {
    const auto candidate = read_saliency_image(a.candidate);
    const auto reference = read_saliency_image(a.reference);
    CompareInputs inputs;
    inputs.epsilon = cfg.metrics.epsilon;
    if (!a.fixations.empty()) {
        inputs.positives = fixation_set(load_fixation_csv(a.fixations), candidate.size());
        if (!a.negatives.empty()) {
            inputs.negatives = fixation_set(load_fixation_csv(a.negatives), candidate.size());
        } else {
            inputs.negatives = sample_uniform_locations(candidate.size(), cfg.metrics.negatives, cfg.seed);
        }
    }
    std::string baseline_path = a.baseline;
    if (baseline_path.empty() && cfg.metrics.ig_baseline != "center") baseline_path = cfg.metrics.ig_baseline;
    if (!baseline_path.empty()) inputs.baseline = DistributionMap::from(read_saliency_image(baseline_path));

    const auto m = compare_all(candidate, reference, inputs);
    auto report = report_header("compare");
    report["candidate"] = a.candidate;
    report["reference"] = a.reference;
    report["kl_d"] = number_or_null(m.kl_d);
    report["cc"] = number_or_null(m.cc);
    report["sim"] = number_or_null(m.sim);
    report["rank_co"] = number_or_null(m.rank_co);
    report["sauc"] = number_or_null(m.sauc);
    report["ig"] = number_or_null(m.ig);
    report["units"] = {{"kl_d", "nats"}, {"cc", "unitless"}, {"sim", "unitless"},
                       {"rank_co", "unitless"}, {"sauc", "unitless"}, {"ig", "bits"}};
    report["errors"] = m.errors;
    write_json_atomic(a.out, report);
    out << "compare: " << (6 - m.errors.size()) << " of 6 metrics computed\n";
}

struct AttrsArgs {
    std::string manifest, pairs, fixation_dir, out;
};

void run_attrs(const AttrsArgs& a, std::ostream& out) {
    const auto manifest = load_manifest(a.manifest);
    const auto pairs = load_pairs(a.pairs);
    const fs::path dir = a.fixation_dir;
    const auto analysis = analyze_attributes(manifest, pairs, [&](const ImageRecord& rec) {
        return load_fixation_csv(dir / rec.fixations.value_or(rec.id + ".csv"));
    });

    json per_pair = json::array();
    for (const auto& p : analysis.per_pair) {
        per_pair.push_back({{"class_a", p.class_a},
                            {"class_b", p.class_b},
                            {"discriminative_part", p.part.part},
                            {"degenerate", p.part.degenerate},
                            {"part_sums", p.part.part_sums}});
    }
    json rates = json::object();
    for (const auto& [k, r] : analysis.hits.hit_rate_at_k) rates[std::to_string(k)] = r;
    json hist = json::object();
    for (const auto& [n, c] : analysis.hits.focused_parts_histogram) hist[std::to_string(n)] = c;
    auto report = report_header("attrs");
    report["per_pair"] = per_pair;
    report["hit_rate"] = rates;
    report["histogram"] = hist;
    report["images"] = analysis.hits.images;
    report["skipped_images"] = analysis.skipped_images;
    write_json_atomic(a.out, report);
    out << "attrs: " << analysis.per_pair.size() << " pairs, " << analysis.hits.images << " images\n";
}

struct ReportArgs {
    std::vector<std::string> inputs;
    std::string out;
};

void run_report(const ReportArgs& a, std::ostream& out) {
    std::vector<json> reports;
    for (const auto& path : a.inputs) reports.push_back(load_json(path));
    json combined;
    out << format_reports(reports, &combined);
    if (!a.out.empty()) write_json_atomic(a.out, combined);
}

// ---- formatting ------------------------------------------------------------

std::string fmt(const json& v, int decimals = 4) {
    if (v.is_null()) return "-";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v.get<double>());
    return buf;
}

class Table {
public:
    explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    std::string str() const {
        std::vector<std::size_t> width(rows_.front().size(), 0);
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
        }
        std::ostringstream os;
        for (std::size_t ri = 0; ri < rows_.size(); ++ri) {
            const auto& r = rows_[ri];
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) os << "  ";
                // first column left-aligned, numbers right-aligned
                if (i == 0) {
                    os << r[i] << std::string(width[i] - r[i].size(), ' ');
                } else {
                    os << std::string(width[i] - r[i].size(), ' ') << r[i];
                }
            }
            os << "\n";
            if (ri == 0) {
                std::size_t total = 0;
                for (auto w : width) total += w;
                os << std::string(total + 2 * (width.size() - 1), '-') << "\n";
            }
        }
        return os.str();
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

// Levenshtein distance, for "did you mean" hints.
std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::optional<std::string> suggest(const std::string& bad, const CLI::App& app) {
    std::optional<std::string> best;
    std::size_t best_d = 4;
    auto scan = [&](const CLI::App* a) {
        for (const auto* opt : a->get_options()) {
            for (const auto& name : opt->get_lnames()) {
                const std::string flag = "--" + name;
                const auto d = edit_distance(bad, flag);
                if (d < best_d) {
                    best_d = d;
                    best = flag;
                }
            }
        }
    };
    scan(&app);
    if (const auto* parent = app.get_parent()) scan(parent);
    return best;
}


}  // namespace

std::string format_reports(const std::vector<json>& reports, json* combined) {
    if (reports.empty()) throw SchemaError("report needs at least one input report");
    std::optional<int> version;
    for (const auto& r : reports) {
        if (!r.is_object() || !r.contains("schema_version") || !r.contains("kind")) {
            throw SchemaError("input is not a report (missing schema_version or kind)");
        }
        const int v = r.at("schema_version").get<int>();
        if (version && *version != v) {
            throw SchemaError("mixed report schema versions " + std::to_string(*version) + " and " + std::to_string(v));
        }
        version = v;
    }

    std::ostringstream os;
    json rows = json::array();
    Table metrics({"candidate", "KL-D (nats)", "CC", "SIM", "Rank-Co", "sAUC", "IG (bits)"});
    bool any_compare = false;
    for (const auto& r : reports) {
        const auto kind = r.at("kind").get<std::string>();
        if (kind != "compare") continue;
        any_compare = true;
        metrics.add({r.value("candidate", std::string("?")), fmt(r.at("kl_d")), fmt(r.at("cc")), fmt(r.at("sim")),
                     fmt(r.at("rank_co")), fmt(r.at("sauc")), fmt(r.at("ig"))});
    }
    if (any_compare) os << metrics.str() << "\n";

    for (const auto& r : reports) {
        const auto kind = r.at("kind").get<std::string>();
        if (kind == "compare") {
            rows.push_back({{"kind", kind},
                            {"candidate", r.value("candidate", std::string())},
                            {"kl_d", r.at("kl_d")},
                            {"cc", r.at("cc")},
                            {"sim", r.at("sim")},
                            {"rank_co", r.at("rank_co")},
                            {"sauc", r.at("sauc")},
                            {"ig", r.at("ig")}});
        } else if (kind == "kar") {
            Table curve({"percent", "accuracy"});
            for (const auto& p : r.at("points")) {
                curve.add({fmt(p.at("percent"), 0), p.contains("error") ? "failed" : fmt(p.at("accuracy"))});
            }
            os << curve.str() << "AUC = " << fmt(r.at("auc")) << " (" << r.value("auc_convention", std::string())
               << ")\n\n";
            rows.push_back({{"kind", kind}, {"points", r.at("points")}, {"auc", r.at("auc")}});
        } else if (kind == "attrs") {
            Table hits({"k", "hit rate"});
            std::vector<std::pair<int, json>> ordered;
            for (const auto& [k, v] : r.at("hit_rate").items()) ordered.emplace_back(std::stoi(k), v);
            std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
            for (const auto& [k, v] : ordered) hits.add({std::to_string(k), fmt(v)});
            os << hits.str() << "images = " << r.value("images", 0) << "\n\n";
            rows.push_back({{"kind", kind}, {"hit_rate", r.at("hit_rate")}, {"histogram", r.at("histogram")}});
        } else if (kind == "crops") {
            Table boxes({"scale", "x", "y", "w", "h", "score"});
            for (const auto& b : r.at("boxes")) {
                boxes.add({b.at("scale").get<std::string>(), std::to_string(b.at("x").get<int>()),
                           std::to_string(b.at("y").get<int>()), std::to_string(b.at("w").get<int>()),
                           std::to_string(b.at("h").get<int>()), fmt(b.at("score"))});
            }
            os << "crops for " << r.value("image_id", std::string()) << "\n" << boxes.str() << "\n";
            rows.push_back({{"kind", kind}, {"image_id", r.value("image_id", std::string())}, {"boxes", r.at("boxes")}});
        } else {
            throw SchemaError("unknown report kind '" + kind + "'");
        }
    }
    if (combined) {
        *combined = json{{"schema_version", *version}, {"kind", "report"}, {"rows", rows}};
    }
    return os.str();
}

int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"gazekit: gaze saliency maps, attention-guided crops, keep-and-retrain and saliency metrics",
                 "gazekit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    app.add_option("--config", config_path, "Pipeline config JSON (flags take precedence)");
    app.add_option("--seed", seed, "Seed for every random draw")->envname("GAZEKIT_SEED");
    app.add_option("--workers", workers, "Worker threads for batch work")->envname("GAZEKIT_WORKERS");

    FixateArgs fixate;
    auto* c_fixate = app.add_subcommand("fixate", "Detect fixations in raw gaze samples (I-VT)");
    c_fixate->add_option("--gaze", fixate.gaze, "Gaze CSV (timestamp_us,x_px,y_px,valid)")->required();
    c_fixate->add_option("--geometry", fixate.geometry, "Geometry or pipeline config JSON");
    c_fixate->add_option("--out", fixate.out, "Fixation CSV output")->required();

    RenderArgs render;
    auto* c_render = app.add_subcommand("render", "Render a duration-weighted Gaussian saliency map");
    c_render->add_option("--fixations", render.fixations, "Fixation CSV (x_px,y_px,duration_ms)")->required();
    c_render->add_option("--geometry", render.geometry, "Geometry or pipeline config JSON");
    c_render->add_option("--size", render.size, "Output size WxH (default: display resolution)");
    c_render->add_option("--out", render.out, "Output PNG")->required();
    c_render->add_option("--depth", render.depth, "PNG bit depth")->check(CLI::IsMember({8, 16}));
    c_render->add_option("--sigma", render.sigma, "Gaussian sigma in display pixels (default: from geometry)");
    c_render->add_flag("--exact", render.exact, "Evaluate Gaussians without truncation");

    CropsArgs crops;
    auto* c_crops = app.add_subcommand("crops", "Plan and extract attention-guided crops");
    c_crops->add_option("--saliency", crops.saliency, "Saliency PNG")->required();
    c_crops->add_option("--image", crops.image, "Source image PNG")->required();
    c_crops->add_option("--preset", crops.preset, "Window preset")
        ->check(CLI::IsMember({"cub", "cub-corrected", "cxr"}));
    c_crops->add_option("--k", crops.k, "Crops per scale: large,medium,small")->delimiter(',');
    c_crops->add_option("--nms", crops.nms, "NMS IoU threshold");
    c_crops->add_option("--stride", crops.stride, "Window stride in pixels (default: min(w,h)/8)");
    c_crops->add_option("--resize", crops.resize, "Crop output size WxH (default: half the image)");
    c_crops->add_option("--image-id", crops.image_id, "Identifier recorded in the manifest");
    c_crops->add_option("--out-dir", crops.out_dir, "Directory for crop PNGs")->required();
    c_crops->add_option("--manifest-out", crops.manifest_out, "Crop manifest JSON")->required();

    ApplyArgs apply;
    auto* c_apply = app.add_subcommand("apply-attention", "Weight an image by its max-normalized saliency map");
    c_apply->add_option("--image", apply.image, "Image PNG")->required();
    c_apply->add_option("--saliency", apply.saliency, "Saliency PNG")->required();
    c_apply->add_option("--out", apply.out, "Output PNG")->required();

    KarMaskArgs mask;
    auto* c_mask = app.add_subcommand("kar-mask", "Keep the top percent of pixels of a saliency map");
    c_mask->add_option("--saliency", mask.saliency, "Saliency PNG")->required();
    c_mask->add_option("--percent", mask.percent, "Percent of pixels to keep, in (0, 100]")->required();
    c_mask->add_option("--image", mask.image, "Apply the mask to this image instead of writing the mask");
    c_mask->add_option("--out", mask.out, "Output PNG")->required();

    KarRunArgs kar;
    auto* c_kar = app.add_subcommand("kar-run", "Keep-and-retrain sweep with the built-in toy classifier");
    c_kar->add_option("--manifest", kar.manifest, "Dataset manifest JSON")->required();
    c_kar->add_option("--saliency-dir", kar.saliency_dir, "Directory of <image id>.png saliency maps")->required();
    c_kar->add_option("--percents", kar.percents, "Insertion percents, comma separated")->delimiter(',');
    c_kar->add_option("--out", kar.out, "Report JSON")->required();

    CompareArgs cmp;
    auto* c_cmp = app.add_subcommand("compare", "Saliency similarity metrics against a reference map");
    c_cmp->add_option("--candidate", cmp.candidate, "Candidate saliency PNG")->required();
    c_cmp->add_option("--reference", cmp.reference, "Reference saliency PNG")->required();
    c_cmp->add_option("--fixations", cmp.fixations, "Positive fixation CSV (map pixel coordinates)");
    c_cmp->add_option("--negatives", cmp.negatives, "Negative fixation CSV for sAUC");
    c_cmp->add_option("--baseline", cmp.baseline, "Baseline saliency PNG for information gain");
    c_cmp->add_option("--out", cmp.out, "Report JSON")->required();

    AttrsArgs attrs;
    auto* c_attrs = app.add_subcommand("attrs", "Discriminative-part hit rates from attributes and fixations");
    c_attrs->add_option("--manifest", attrs.manifest, "Dataset manifest JSON")->required();
    c_attrs->add_option("--pairs", attrs.pairs, "CSV of class_a,class_b pairs")->required();
    c_attrs->add_option("--fixation-dir", attrs.fixation_dir, "Directory of per-image fixation CSVs")->required();
    c_attrs->add_option("--out", attrs.out, "Report JSON")->required();

    ReportArgs rep;
    auto* c_rep = app.add_subcommand("report", "Consolidate JSON reports into tables");
    c_rep->add_option("inputs", rep.inputs, "Report JSON files")->required();
    c_rep->add_option("--out", rep.out, "Combined JSON output");

    if (args.empty()) {
        err << app.help();
        return kExitUsage;
    }

    const CLI::App* chosen = nullptr;
    for (const auto& a : args) {
        if (a.rfind("-", 0) == 0) continue;
        for (const auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
            if (sub->get_name() == a) chosen = sub;
        }
        if (chosen) break;
    }
    for (const auto& a : args) {
        if (!chosen || a.rfind("--", 0) != 0 || a == "--") continue;
        const std::string name = a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2);
        bool known = name == "help";
        for (const CLI::App* scope : {static_cast<const CLI::App*>(&app), chosen}) {
            if (!scope) continue;
            for (const auto* opt : scope->get_options()) {
                for (const auto& l : opt->get_lnames()) known = known || l == name;
            }
        }
        if (!known) {
            err << "usage error: unknown flag --" << name << "\n";
            if (const auto hint = suggest("--" + name, chosen ? *chosen : app)) {
                err << "did you mean '" << *hint << "'?\n";
            }
            return kExitUsage;
        }
    }

    std::vector<const char*> argv{"gazekit"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        if (!chosen) {
            std::optional<std::string> best;
            std::size_t best_d = 4;
            for (const auto& a : args) {
                if (a.rfind("-", 0) == 0) continue;
                for (const auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
                    const auto d = edit_distance(a, sub->get_name());
                    if (d < best_d) {
                        best_d = d;
                        best = sub->get_name();
                    }
                }
                break;
            }
            if (best) err << "did you mean '" << *best << "'?\n";
            err << app.help();
        }
        return kExitUsage;
    }

    try {
        PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
        if (seed) cfg.set_seed(*seed);
        if (workers) cfg.workers = *workers;
        cfg.validate();

        if (c_fixate->parsed()) run_fixate(fixate, cfg, out);
        else if (c_render->parsed()) run_render(render, cfg, out);
        else if (c_crops->parsed()) run_crops(crops, cfg, out);
        else if (c_apply->parsed()) run_apply(apply, out, err);
        else if (c_mask->parsed()) run_kar_mask(mask, out);
        else if (c_kar->parsed()) run_kar(kar, cfg, out);
        else if (c_cmp->parsed()) run_compare(cmp, cfg, out);
        else if (c_attrs->parsed()) run_attrs(attrs, out);
        else if (c_rep->parsed()) run_report(rep, out);
    } catch (const Error& e) {
        err << json{{"error", {{"code", e.code()}, {"message", e.what()}}}}.dump() << "\n";
        return kExitProcessing;
    } catch (const std::exception& e) {
        err << json{{"error", {{"code", "internal"}, {"message", e.what()}}}}.dump() << "\n";
        return kExitProcessing;
    }
    return kExitOk;
}

}  // namespace gazekit::cli
