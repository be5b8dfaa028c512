#include "gazekit/io.hpp"

#include <png.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <unistd.h>

#include "gazekit/error.hpp"

namespace gazekit {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? pos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

// strtod accepts "nan"/"inf" spellings, which from_chars does not on all toolchains.
double parse_real(const std::string& field, std::size_t line, const char* what) {
    if (field.empty()) throw ParseError(std::string("empty ") + what + " field", line);
    char* end = nullptr;
    double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size()) {
        throw ParseError(std::string("cannot parse ") + what + " '" + field + "'", line);
    }
    return v;
}

std::int64_t parse_int(const std::string& field, std::size_t line, const char* what) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError(std::string("cannot parse ") + what + " '" + field + "'", line);
    }
    return v;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw SchemaError("CSV header lacks column '" + name + "'");
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file", path.string());
    return in;
}

std::string shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

fs::path temp_sibling(const fs::path& path) {
    auto tmp = path;
    tmp += ".tmp-" + std::to_string(::getpid());
    return tmp;
}

void commit_temp(const fs::path& tmp, const fs::path& path) {
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move temporary file into place", path.string());
    }
}

// ---- PNG ----------------------------------------------------------------

struct PngPixels {
    int width = 0;
    int height = 0;
    int channels = 0;  // after alpha stripping: 1 or 3
    int depth = 8;     // 8 or 16
    std::vector<std::uint16_t> samples;
};

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void png_error_fn(png_structp png, png_const_charp msg) {
    auto* err = static_cast<std::string*>(png_get_error_ptr(png));
    if (err) *err = msg;
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

PngPixels read_png(const fs::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw IoError("cannot open image", path.string());
    unsigned char sig[8] = {};
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw FormatError("not a PNG file: " + path.string());
    }

    std::string err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
    if (!png) throw FormatError("libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    PngPixels out;
    std::vector<png_byte> rowbuf;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("corrupt PNG " + path.string() + ": " + err);
    }

    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int color = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.depth = png_get_bit_depth(png, info) == 16 ? 16 : 8;
    out.channels = png_get_channels(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    rowbuf.resize(rowbytes);
    out.samples.resize(static_cast<std::size_t>(out.width) * out.height * out.channels);

    for (int y = 0; y < out.height; ++y) {
        png_read_row(png, rowbuf.data(), nullptr);
        const std::size_t n = static_cast<std::size_t>(out.width) * out.channels;
        auto* dst = out.samples.data() + static_cast<std::size_t>(y) * n;
        if (out.depth == 16) {
            for (std::size_t i = 0; i < n; ++i) {
                dst[i] = static_cast<std::uint16_t>((rowbuf[2 * i] << 8) | rowbuf[2 * i + 1]);
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) dst[i] = rowbuf[i];
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

void write_png(const fs::path& path, int width, int height, int channels, int depth,
               const std::vector<std::uint16_t>& samples) {
    const auto tmp = temp_sibling(path);
    {
        FilePtr file(std::fopen(tmp.c_str(), "wb"));
        if (!file) throw IoError("cannot open output image for writing", path.string());

        std::string err;
        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
        if (!png) throw IoError("libpng initialisation failed", path.string());
        png_infop info = png_create_info_struct(png);
        const std::size_t n = static_cast<std::size_t>(width) * channels;
        std::vector<png_byte> rowbuf(n * (depth == 16 ? 2 : 1));

        if (setjmp(png_jmpbuf(png))) {
            png_destroy_write_struct(&png, &info);
            file.reset();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("PNG encoding failed (" + err + ")", path.string());
        }

        png_init_io(png, file.get());
        png_set_IHDR(png, info, width, height, depth, channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        for (int y = 0; y < height; ++y) {
            const auto* src = samples.data() + static_cast<std::size_t>(y) * n;
            if (depth == 16) {
                for (std::size_t i = 0; i < n; ++i) {
                    rowbuf[2 * i] = static_cast<png_byte>(src[i] >> 8);
                    rowbuf[2 * i + 1] = static_cast<png_byte>(src[i] & 0xFF);
                }
            } else {
                for (std::size_t i = 0; i < n; ++i) rowbuf[i] = static_cast<png_byte>(src[i]);
            }
            png_write_row(png, rowbuf.data());
        }
        png_write_end(png, nullptr);
        png_destroy_write_struct(&png, &info);
        if (std::fflush(file.get()) != 0) throw IoError("write failed", path.string());
    }
    commit_temp(tmp, path);
}

}  // namespace

// ---- CSV ----------------------------------------------------------------

std::vector<GazeSample> parse_gaze_csv(std::istream& in, const GazeCsvSchema& schema) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("gaze CSV is empty (header row required)");
    const auto header = split_csv_line(line);
    const auto it = column_index(header, schema.timestamp);
    const auto ix = column_index(header, schema.x);
    const auto iy = column_index(header, schema.y);
    const bool has_valid = !schema.valid.empty();
    const auto iv = has_valid ? column_index(header, schema.valid) : 0;

    std::vector<GazeSample> samples;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        }
        GazeSample s;
        s.timestamp_us = parse_int(fields[it], lineno, "timestamp");
        s.x = parse_real(fields[ix], lineno, "x");
        s.y = parse_real(fields[iy], lineno, "y");
        s.valid = true;
        if (has_valid) {
            const auto& v = fields[iv];
            if (v == "1") {
                s.valid = true;
            } else if (v == "0") {
                s.valid = false;
            } else {
                throw ParseError("validity must be 0 or 1, got '" + v + "'", lineno);
            }
        }
        if (!std::isfinite(s.x) || !std::isfinite(s.y)) s.valid = false;
        if (!samples.empty() && s.timestamp_us <= samples.back().timestamp_us) {
            throw SchemaError("gaze timestamps must strictly increase (line " + std::to_string(lineno) + ": " +
                              std::to_string(s.timestamp_us) + " after " +
                              std::to_string(samples.back().timestamp_us) + ")");
        }
        samples.push_back(s);
    }
    return samples;
}

std::vector<GazeSample> load_gaze_csv(const fs::path& path, const GazeCsvSchema& schema) {
    auto in = open_input(path);
    return parse_gaze_csv(in, schema);
}

void write_gaze_csv(const std::vector<GazeSample>& samples, const fs::path& path) {
    std::ostringstream out;
    out << "timestamp_us,x_px,y_px,valid\n";
    for (const auto& s : samples) {
        out << s.timestamp_us << ',' << shortest(s.x) << ',' << shortest(s.y) << ',' << (s.valid ? 1 : 0) << '\n';
    }
    write_text_atomic(path, out.str());
}

std::vector<Fixation> parse_fixation_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("fixation CSV is empty (header row required)");
    const auto header = split_csv_line(line);
    const auto ix = column_index(header, "x_px");
    const auto iy = column_index(header, "y_px");
    const auto id = column_index(header, "duration_ms");

    std::vector<Fixation> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        }
        Fixation f{parse_real(fields[ix], lineno, "x"), parse_real(fields[iy], lineno, "y"),
                   parse_real(fields[id], lineno, "duration")};
        if (!std::isfinite(f.x) || !std::isfinite(f.y)) throw ParseError("fixation coordinates must be finite", lineno);
        if (!(f.duration_ms > 0.0) || !std::isfinite(f.duration_ms)) {
            throw ParseError("fixation duration must be positive", lineno);
        }
        out.push_back(f);
    }
    return out;
}

std::vector<Fixation> load_fixation_csv(const fs::path& path) {
    auto in = open_input(path);
    return parse_fixation_csv(in);
}

std::string format_fixation_csv(const std::vector<Fixation>& fixations) {
    std::ostringstream out;
    out << "x_px,y_px,duration_ms\n";
    for (const auto& f : fixations) {
        out << shortest(f.x) << ',' << shortest(f.y) << ',' << shortest(f.duration_ms) << '\n';
    }
    return out.str();
}

void write_fixation_csv(const std::vector<Fixation>& fixations, const fs::path& path) {
    write_text_atomic(path, format_fixation_csv(fixations));
}

// ---- images -------------------------------------------------------------

std::vector<std::uint16_t> quantize_saliency(const SaliencyMap& map, int depth) {
    if (depth != 8 && depth != 16) throw ConfigError("saliency image depth must be 8 or 16");
    if (map.empty()) throw ShapeError("cannot quantize an empty saliency map");
    const double top = static_cast<double>((1 << depth) - 1);
    const double max = map.max_value();
    std::vector<std::uint16_t> out(map.pixel_count(), 0);
    if (max <= 0.0) return out;
    auto values = map.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint16_t>(std::lround(values[i] / max * top));
    }
    return out;
}

void write_saliency_image(const SaliencyMap& map, const fs::path& path, int depth) {
    const auto q = quantize_saliency(map, depth);
    write_png(path, map.width(), map.height(), 1, depth, q);
}

SaliencyMap read_saliency_image(const fs::path& path, bool luma) {
    const auto px = read_png(path);
    std::vector<double> values(static_cast<std::size_t>(px.width) * px.height);
    if (px.channels == 1) {
        for (std::size_t i = 0; i < values.size(); ++i) values[i] = px.samples[i];
    } else if (luma) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            values[i] = 0.299 * px.samples[3 * i] + 0.587 * px.samples[3 * i + 1] + 0.114 * px.samples[3 * i + 2];
        }
    } else {
        throw FormatError("saliency image must be single-channel: " + path.string());
    }
    return SaliencyMap(px.width, px.height, std::move(values));
}

RasterImage read_raster_image(const fs::path& path) {
    const auto px = read_png(path);
    const double top = px.depth == 16 ? 65535.0 : 255.0;
    std::vector<double> values(px.samples.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = px.samples[i] / top;
    return RasterImage(px.width, px.height, px.channels, std::move(values));
}

void write_raster_image(const RasterImage& image, const fs::path& path) {
    std::vector<std::uint16_t> samples(image.values().size());
    auto values = image.values();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i] = static_cast<std::uint16_t>(std::lround(std::clamp(values[i], 0.0, 1.0) * 255.0));
    }
    write_png(path, image.width(), image.height(), image.channels(), 8, samples);
}

// ---- manifest -----------------------------------------------------------

json manifest_to_json(const DatasetManifest& m) {
    json images = json::array();
    for (const auto& img : m.images) {
        json j{{"id", img.id}, {"path", img.path}, {"width", img.width}, {"height", img.height}, {"label", img.label}};
        if (!img.part_centers.empty()) {
            json parts = json::array();
            for (const auto& pc : img.part_centers) parts.push_back({{"part", pc.part}, {"x", pc.x}, {"y", pc.y}});
            j["part_centers"] = parts;
        }
        if (img.attributes) j["attributes"] = *img.attributes;
        if (img.fixations) j["fixations"] = *img.fixations;
        if (img.split) j["split"] = *img.split;
        images.push_back(std::move(j));
    }
    json mapping = json::object();
    for (const auto& [a, p] : m.attribute_to_part) mapping[std::to_string(a)] = p;
    return json{{"images", images},
                {"num_classes", m.num_classes},
                {"num_parts", m.num_parts},
                {"num_attributes", m.num_attributes},
                {"attribute_to_part", mapping}};
}

DatasetManifest manifest_from_json(const json& j) {
    DatasetManifest m;
    try {
        m.num_classes = j.at("num_classes").get<int>();
        m.num_parts = j.value("num_parts", 0);
        m.num_attributes = j.value("num_attributes", 0);
        if (j.contains("attribute_to_part")) {
            for (const auto& [key, value] : j.at("attribute_to_part").items()) {
                int attr = 0;
                auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), attr);
                if (ec != std::errc() || ptr != key.data() + key.size()) {
                    throw SchemaError("manifest: attribute_to_part key '" + key + "' is not an integer");
                }
                m.attribute_to_part[attr] = value.get<int>();
            }
        }
        for (const auto& ji : j.at("images")) {
            ImageRecord r;
            r.id = ji.at("id").get<std::string>();
            r.path = ji.value("path", std::string{});
            r.width = ji.value("width", 0);
            r.height = ji.value("height", 0);
            r.label = ji.at("label").get<int>();
            if (ji.contains("part_centers")) {
                for (const auto& pc : ji.at("part_centers")) {
                    r.part_centers.push_back(
                        {pc.at("part").get<int>(), pc.at("x").get<double>(), pc.at("y").get<double>()});
                }
            }
            if (ji.contains("attributes")) {
                std::vector<std::uint8_t> attrs;
                for (const auto& a : ji.at("attributes")) {
                    const int v = a.get<int>();
                    if (v != 0 && v != 1) throw SchemaError("manifest: attributes must be 0/1 in image " + r.id);
                    attrs.push_back(static_cast<std::uint8_t>(v));
                }
                r.attributes = std::move(attrs);
            }
            if (ji.contains("fixations")) r.fixations = ji.at("fixations").get<std::string>();
            if (ji.contains("split")) r.split = ji.at("split").get<std::string>();
            m.images.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("manifest: ") + e.what());
    }
    m.validate();
    return m;
}

json load_json(const fs::path& path) {
    auto in = open_input(path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid JSON in ") + path.string() + ": " + e.what());
    }
}

DatasetManifest load_manifest(const fs::path& path) { return manifest_from_json(load_json(path)); }

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
    manifest.validate();
    write_json_atomic(path, manifest_to_json(manifest));
}

void write_text_atomic(const fs::path& path, const std::string& content) {
    const auto tmp = temp_sibling(path);
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open output file for writing", path.string());
        out << content;
        out.flush();
        if (!out) throw IoError("write failed", path.string());
    }
    commit_temp(tmp, path);
}

void write_json_atomic(const fs::path& path, const json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

}  // namespace gazekit
