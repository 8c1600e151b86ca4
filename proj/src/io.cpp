#include "ads/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace ads {

namespace {

std::string lower_extension(const std::string& path) {
  std::string ext = fs::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

std::ofstream open_output(const std::string& path, std::ios::openmode mode) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
  }
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

// Skips whitespace and '#' comment lines in a PNM header.
void skip_pnm_separators(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == std::char_traits<char>::eof()) return;
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      in.get();
    } else {
      return;
    }
  }
}

long read_pnm_number(std::istream& in, const std::string& path) {
  skip_pnm_separators(in);
  long value = -1;
  if (!(in >> value) || value < 0) throw IoError("malformed PNM header in " + path);
  return value;
}

std::vector<unsigned char> read_pnm_payload(std::istream& in, std::size_t count,
                                            const std::string& path) {
  in.get();  // single separator after maxval
  std::vector<unsigned char> bytes(count);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count));
  if (in.gcount() != static_cast<std::streamsize>(count))
    throw IoError("truncated PNM payload in " + path);
  return bytes;
}

ordered_json parse_json(const std::string& text, const std::string& context) {
  ordered_json doc = ordered_json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw IoError("invalid JSON in " + context);
  return doc;
}

ordered_json descriptor_to_json(const SceneDescriptor& d) {
  return ordered_json{{"d", d.d},          {"sx", d.sx}, {"sy", d.sy},
                      {"theta_deg", d.theta_deg}, {"tx", d.tx}, {"ty", d.ty},
                      {"a", d.a},          {"background_seed", d.background_seed}};
}

SceneDescriptor descriptor_from_json(const ordered_json& j) {
  SceneDescriptor d;
  d.d = j.at("d").get<double>();
  d.sx = j.at("sx").get<double>();
  d.sy = j.at("sy").get<double>();
  d.theta_deg = j.at("theta_deg").get<double>();
  d.tx = j.at("tx").get<double>();
  d.ty = j.at("ty").get<double>();
  d.a = j.at("a").get<double>();
  d.background_seed = j.at("background_seed").get<std::uint64_t>();
  return d;
}

ordered_json gt_to_json(const GroundTruthDifference& g) {
  return ordered_json{{"d", g.d},   {"sx", g.sx}, {"sy", g.sy}, {"theta_deg", g.theta_deg},
                      {"tx", g.tx}, {"ty", g.ty}, {"a", g.a}};
}

GroundTruthDifference gt_from_json(const ordered_json& j) {
  GroundTruthDifference g;
  g.d = j.at("d").get<double>();
  g.sx = j.at("sx").get<double>();
  g.sy = j.at("sy").get<double>();
  g.theta_deg = j.at("theta_deg").get<double>();
  g.tx = j.at("tx").get<double>();
  g.ty = j.at("ty").get<double>();
  g.a = j.at("a").get<double>();
  return g;
}

// Five-stop monotone ramp (dark violet to pale yellow), interpolated
// linearly; input clamped to [0,1].
constexpr double kRampStops[5][3] = {{0.001, 0.000, 0.014},
                                     {0.341, 0.062, 0.429},
                                     {0.729, 0.212, 0.333},
                                     {0.965, 0.553, 0.036},
                                     {0.988, 0.998, 0.645}};

}  // namespace

std::uint8_t quantize8(double v) {
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(clamped * 255.0));
}

Image load_image(const std::string& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".ppm") return load_ppm(path);
  if (ext == ".png") return load_png(path);
  throw IoError("unsupported image format: " + path);
}

void save_image(const std::string& path, const Image& image) {
  const std::string ext = lower_extension(path);
  if (ext == ".ppm") return save_ppm(path, image);
  if (ext == ".png") return save_png(path, image);
  throw IoError("unsupported image format: " + path);
}

Image load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P6") throw IoError("not a P6 PPM file: " + path);
  const long w = read_pnm_number(in, path);
  const long h = read_pnm_number(in, path);
  const long maxval = read_pnm_number(in, path);
  if (w <= 0 || h <= 0 || maxval != 255) throw IoError("unsupported PPM header in " + path);
  const auto bytes = read_pnm_payload(in, static_cast<std::size_t>(w) * h * 3, path);
  Image img(w, h);
  for (Index p = 0; p < img.pixel_count(); ++p)
    for (int ch = 0; ch < 3; ++ch) img.rgb(ch, p) = bytes[static_cast<std::size_t>(p) * 3 + ch] / 255.0;
  return img;
}

void save_ppm(const std::string& path, const Image& image) {
  std::ofstream out = open_output(path, std::ios::binary);
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  std::vector<unsigned char> bytes(static_cast<std::size_t>(image.pixel_count()) * 3);
  for (Index p = 0; p < image.pixel_count(); ++p)
    for (int ch = 0; ch < 3; ++ch)
      bytes[static_cast<std::size_t>(p) * 3 + ch] = quantize8(image.rgb(ch, p));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing: " + path);
}

Mask load_mask(const std::string& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".pgm") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw IoError("not a P5 PGM file: " + path);
    const long w = read_pnm_number(in, path);
    const long h = read_pnm_number(in, path);
    const long maxval = read_pnm_number(in, path);
    if (w <= 0 || h <= 0 || maxval != 255) throw IoError("unsupported PGM header in " + path);
    const auto bytes = read_pnm_payload(in, static_cast<std::size_t>(w) * h, path);
    Mask mask(w, h);
    for (Index p = 0; p < mask.pixel_count(); ++p)
      mask.values(p) = bytes[static_cast<std::size_t>(p)] >= 128 ? 1.0 : 0.0;
    return mask;
  }
  if (ext == ".png") {
    const Image img = load_png(path);
    Mask mask(img.width, img.height);
    for (Index p = 0; p < mask.pixel_count(); ++p)
      mask.values(p) = img.rgb.col(p).mean() * 255.0 >= 128.0 ? 1.0 : 0.0;
    return mask;
  }
  throw IoError("unsupported mask format: " + path);
}

void save_mask(const std::string& path, const Mask& mask) {
  const std::string ext = lower_extension(path);
  if (ext == ".pgm") {
    std::ofstream out = open_output(path, std::ios::binary);
    out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
    std::vector<unsigned char> bytes(static_cast<std::size_t>(mask.pixel_count()));
    for (Index p = 0; p < mask.pixel_count(); ++p)
      bytes[static_cast<std::size_t>(p)] = mask.values(p) >= 0.5 ? 255 : 0;
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing: " + path);
    return;
  }
  if (ext == ".png") {
    Image img(mask.width, mask.height);
    img.rgb.colwise() = Eigen::Vector3d::Zero();
    for (Index p = 0; p < mask.pixel_count(); ++p) img.rgb.col(p).setConstant(mask.values(p));
    save_png(path, img);
    return;
  }
  throw IoError("unsupported mask format: " + path);
}

Image heatmap_to_image(const Heatmap& heatmap) {
  Image img(heatmap.width, heatmap.height);
  for (Index p = 0; p < heatmap.values.size(); ++p) {
    const double v = std::clamp(heatmap.values(p), 0.0, 1.0);
    const double pos = v * 4.0;
    const int seg = std::min(3, static_cast<int>(pos));
    const double f = pos - seg;
    for (int ch = 0; ch < 3; ++ch)
      img.rgb(ch, p) = kRampStops[seg][ch] + f * (kRampStops[seg + 1][ch] - kRampStops[seg][ch]);
  }
  return img;
}

void save_heatmap_png(const std::string& path, const Heatmap& heatmap) {
  save_png(path, heatmap_to_image(heatmap));
}

std::string transforms_to_json(const AffineTransform& affine,
                               const Eigen::Matrix<double, 2, 9>& tps_control) {
  const auto p = affine.params();
  ordered_json doc;
  doc["affine"] = {p[0], p[1], p[2], p[3], p[4], p[5]};
  std::vector<double> xs(9), ys(9);
  for (int k = 0; k < 9; ++k) {
    xs[static_cast<std::size_t>(k)] = tps_control(0, k);
    ys[static_cast<std::size_t>(k)] = tps_control(1, k);
  }
  doc["tps_control_points"] = {xs, ys};
  return doc.dump(2) + "\n";
}

ImportedTransforms parse_transforms_json(const std::string& text) {
  const ordered_json doc = parse_json(text, "transform parameters");
  try {
    ImportedTransforms t;
    const auto& aff = doc.at("affine");
    if (!aff.is_array() || aff.size() != 6)
      throw IoError("transform JSON: \"affine\" must hold 6 numbers");
    std::array<double, 6> params{};
    for (int i = 0; i < 6; ++i) params[static_cast<std::size_t>(i)] = aff.at(i).get<double>();
    t.affine = AffineTransform::from_params(params);
    const auto& cp = doc.at("tps_control_points");
    if (!cp.is_array() || cp.size() != 2 || cp.at(0).size() != 9 || cp.at(1).size() != 9)
      throw IoError("transform JSON: \"tps_control_points\" must be two rows of 9 numbers");
    for (int k = 0; k < 9; ++k) {
      t.tps_control(0, k) = cp.at(0).at(k).get<double>();
      t.tps_control(1, k) = cp.at(1).at(k).get<double>();
    }
    return t;
  } catch (const ordered_json::exception& e) {
    throw IoError(std::string("transform JSON: ") + e.what());
  }
}

ImportedTransforms load_transforms(const std::string& path) {
  try {
    return parse_transforms_json(read_text_file(path));
  } catch (const IoError& e) {
    throw IoError(std::string(e.what()) + " (" + path + ")");
  }
}

void save_transforms(const std::string& path, const AffineTransform& affine,
                     const Eigen::Matrix<double, 2, 9>& tps_control) {
  write_text_file(path, transforms_to_json(affine, tps_control));
}

Correspondences load_keypoints(const std::string& path, Index source_width, Index source_height,
                               Index target_width, Index target_height) {
  const ordered_json doc = parse_json(read_text_file(path), path);
  if (!doc.contains("pairs") || !doc.at("pairs").is_array())
    throw IoError("keypoint file missing \"pairs\" array: " + path);
  const auto& pairs = doc.at("pairs");
  const Index n = static_cast<Index>(pairs.size());
  Correspondences c;
  c.source.resize(2, n);
  c.target.resize(2, n);
  std::string units;
  try {
    for (Index i = 0; i < n; ++i) {
      const auto& pair = pairs.at(static_cast<std::size_t>(i));
      if (!pair.is_array() || pair.size() != 2 || pair.at(0).size() != 2 || pair.at(1).size() != 2)
        throw IoError("keypoint pair " + std::to_string(i) + " malformed in " + path);
      c.source(0, i) = pair.at(0).at(0).get<double>();
      c.source(1, i) = pair.at(0).at(1).get<double>();
      c.target(0, i) = pair.at(1).at(0).get<double>();
      c.target(1, i) = pair.at(1).at(1).get<double>();
    }
    if (doc.contains("weights") && !doc.at("weights").is_null()) {
      const auto& w = doc.at("weights");
      if (!w.is_array() || static_cast<Index>(w.size()) != n)
        throw IoError("keypoint weights length mismatch in " + path);
      c.weights.resize(n);
      for (Index i = 0; i < n; ++i) c.weights(i) = w.at(static_cast<std::size_t>(i)).get<double>();
    }
    units = doc.value("units", std::string("normalized"));
  } catch (const ordered_json::exception& e) {
    throw IoError("keypoint file " + path + ": " + e.what());
  }
  if (units == "pixel") {
    for (Index i = 0; i < n; ++i) {
      c.source(0, i) = -1.0 + 2.0 * (c.source(0, i) + 0.5) / static_cast<double>(source_width);
      c.source(1, i) = -1.0 + 2.0 * (c.source(1, i) + 0.5) / static_cast<double>(source_height);
      c.target(0, i) = -1.0 + 2.0 * (c.target(0, i) + 0.5) / static_cast<double>(target_width);
      c.target(1, i) = -1.0 + 2.0 * (c.target(1, i) + 0.5) / static_cast<double>(target_height);
    }
  } else if (units != "normalized") {
    throw IoError("unknown keypoint units \"" + units + "\" in " + path);
  }
  c.validate();
  return c;
}

void save_keypoints(const std::string& path, const Correspondences& correspondences) {
  ordered_json pairs = ordered_json::array();
  for (Index i = 0; i < correspondences.size(); ++i) {
    pairs.push_back({{correspondences.source(0, i), correspondences.source(1, i)},
                     {correspondences.target(0, i), correspondences.target(1, i)}});
  }
  ordered_json doc;
  doc["pairs"] = std::move(pairs);
  if (correspondences.weights.size()) {
    std::vector<double> w(correspondences.weights.data(),
                          correspondences.weights.data() + correspondences.weights.size());
    doc["weights"] = w;
  }
  write_text_file(path, doc.dump() + "\n");
}

std::string report_to_json(const DifferenceReport& report) {
  const MeasureSet& m = report.measures;
  ordered_json doc;
  doc["s_hat"] = m.s;
  doc["sx"] = m.sx;
  doc["sy"] = m.sy;
  doc["t_hat"] = m.t;
  doc["tx"] = m.tx;
  doc["ty"] = m.ty;
  doc["theta_deg"] = m.theta_deg;
  doc["shear"] = m.shear;
  doc["d_hat"] = m.d;
  doc["a_hat"] = m.a;
  doc["mse_baseline"] = report.baseline_mse;
  if (report.residual_keypoint_distance)
    doc["residual_kp"] = *report.residual_keypoint_distance;
  else
    doc["residual_kp"] = nullptr;
  doc["provenance"] = report.source == TransformSource::imported ? "imported" : "estimated";
  return doc.dump(2) + "\n";
}

void save_report(const std::string& path, const DifferenceReport& report) {
  write_text_file(path, report_to_json(report));
}

std::string manifest_entry_to_json(const ManifestEntry& entry) {
  ordered_json doc;
  doc["pair"] = entry.pair_index;
  doc["source"] = descriptor_to_json(entry.source);
  doc["target"] = descriptor_to_json(entry.target);
  doc["source_image"] = entry.source_image;
  doc["source_mask"] = entry.source_mask;
  doc["target_image"] = entry.target_image;
  doc["keypoints"] = entry.keypoint_file;
  doc["gt"] = gt_to_json(entry.gt);
  return doc.dump();
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  DatasetManifest manifest;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    ordered_json doc = ordered_json::parse(line, nullptr, false);
    if (doc.is_discarded())
      throw IoError("manifest line " + std::to_string(line_number) + " is not valid JSON: " + path);
    try {
      ManifestEntry entry;
      entry.pair_index = doc.at("pair").get<int>();
      entry.source = descriptor_from_json(doc.at("source"));
      entry.target = descriptor_from_json(doc.at("target"));
      entry.source_image = doc.at("source_image").get<std::string>();
      entry.source_mask = doc.at("source_mask").get<std::string>();
      entry.target_image = doc.at("target_image").get<std::string>();
      entry.keypoint_file = doc.at("keypoints").get<std::string>();
      entry.gt = gt_from_json(doc.at("gt"));
      manifest.entries.push_back(std::move(entry));
    } catch (const ordered_json::exception& e) {
      throw IoError("manifest line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return manifest;
}

void save_manifest(const std::string& path, const DatasetManifest& manifest) {
  std::ostringstream out;
  for (const auto& entry : manifest.entries) out << manifest_entry_to_json(entry) << "\n";
  write_text_file(path, out.str());
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Eigen::Vector3d parse_color(const std::string& value, const std::string& key) {
  std::istringstream in(value);
  Eigen::Vector3d color;
  if (!(in >> color(0) >> color(1) >> color(2)))
    throw IoError("config value for " + key + " needs three numbers");
  return color;
}

}  // namespace

SceneConfig load_scene_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  SceneConfig cfg;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw IoError("config line " + std::to_string(line_number) + " is not key = value: " + path);
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "base_radius") cfg.base_radius = std::stod(value);
      else if (key == "shape_amplitude") cfg.shape_amplitude = std::stod(value);
      else if (key == "shape_harmonic") cfg.shape_harmonic = std::stoi(value);
      else if (key == "keypoint_count") cfg.keypoint_count = std::stoi(value);
      else if (key == "color_low") cfg.color_low = parse_color(value, key);
      else if (key == "color_high") cfg.color_high = parse_color(value, key);
      else if (key == "background_low") cfg.background_low = std::stod(value);
      else if (key == "background_high") cfg.background_high = std::stod(value);
      else if (key == "shape_min") cfg.shape_min = std::stod(value);
      else if (key == "shape_max") cfg.shape_max = std::stod(value);
      else if (key == "scale_min") cfg.scale_min = std::stod(value);
      else if (key == "scale_max") cfg.scale_max = std::stod(value);
      else if (key == "rotation_min_deg") cfg.rotation_min_deg = std::stod(value);
      else if (key == "rotation_max_deg") cfg.rotation_max_deg = std::stod(value);
      else if (key == "translation_min") cfg.translation_min = std::stod(value);
      else if (key == "translation_max") cfg.translation_max = std::stod(value);
      else if (key == "appearance_min") cfg.appearance_min = std::stod(value);
      else if (key == "appearance_max") cfg.appearance_max = std::stod(value);
      else throw IoError("unknown config key \"" + key + "\"");
    } catch (const std::invalid_argument&) {
      throw IoError("config line " + std::to_string(line_number) + ": bad value for " + key);
    }
  }
  return cfg;
}

void save_scene_config(const std::string& path, const SceneConfig& cfg) {
  std::ostringstream out;
  out << "# blob generator settings\n";
  out << "base_radius = " << format_double(cfg.base_radius) << "\n";
  out << "shape_amplitude = " << format_double(cfg.shape_amplitude) << "\n";
  out << "shape_harmonic = " << cfg.shape_harmonic << "\n";
  out << "keypoint_count = " << cfg.keypoint_count << "\n";
  out << "color_low = " << format_double(cfg.color_low(0)) << " " << format_double(cfg.color_low(1))
      << " " << format_double(cfg.color_low(2)) << "\n";
  out << "color_high = " << format_double(cfg.color_high(0)) << " "
      << format_double(cfg.color_high(1)) << " " << format_double(cfg.color_high(2)) << "\n";
  out << "background_low = " << format_double(cfg.background_low) << "\n";
  out << "background_high = " << format_double(cfg.background_high) << "\n";
  out << "shape_min = " << format_double(cfg.shape_min) << "\n";
  out << "shape_max = " << format_double(cfg.shape_max) << "\n";
  out << "scale_min = " << format_double(cfg.scale_min) << "\n";
  out << "scale_max = " << format_double(cfg.scale_max) << "\n";
  out << "rotation_min_deg = " << format_double(cfg.rotation_min_deg) << "\n";
  out << "rotation_max_deg = " << format_double(cfg.rotation_max_deg) << "\n";
  out << "translation_min = " << format_double(cfg.translation_min) << "\n";
  out << "translation_max = " << format_double(cfg.translation_max) << "\n";
  out << "appearance_min = " << format_double(cfg.appearance_min) << "\n";
  out << "appearance_max = " << format_double(cfg.appearance_max) << "\n";
  write_text_file(path, out.str());
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_output(path, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("failed writing: " + path);
}

}  // namespace ads
