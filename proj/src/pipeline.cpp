#include "spikecam/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "spikecam/codec.hpp"
#include "spikecam/image_io.hpp"
#include "spikecam/recon.hpp"
#include "spikecam/rng.hpp"

namespace fs = std::filesystem;

namespace spikecam {

namespace {

constexpr std::string_view kManifestFormat = "spikecam-dataset-1";

std::string key(std::string_view prefix, std::string_view name) {
  return std::string(prefix) + std::string(name);
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  if (text.empty()) return parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

std::string scene_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene_%03zu", index);
  return buf;
}

double draw(SplitMix64& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

Tensor grid_tensor(const Grid<Tick>& g) {
  Tensor t{{static_cast<std::uint32_t>(g.height), static_cast<std::uint32_t>(g.width)}, {}};
  t.values.reserve(g.size());
  for (auto v : g.data) t.values.push_back(static_cast<float>(v));
  return t;
}

Tensor flag_tensor(const Grid<std::uint8_t>& g) {
  Tensor t{{static_cast<std::uint32_t>(g.height), static_cast<std::uint32_t>(g.width)}, {}};
  t.values.reserve(g.size());
  for (auto v : g.data) t.values.push_back(v ? 1.0f : 0.0f);
  return t;
}

std::vector<std::string> sorted_entries(const fs::path& dir, bool directories) {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (directories ? entry.is_directory() : (entry.is_regular_file() && entry.path().extension() == ".pgm")) {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

void evaluate_scene(const std::string& scene, const fs::path& recon_dir, const fs::path& gt_dir,
                    MetricReport& report) {
  if (!fs::is_directory(gt_dir)) throw ManifestError("no ground truth directory for scene '" + scene + "'");
  const auto recon = sorted_entries(recon_dir, false);
  const auto gt = sorted_entries(gt_dir, false);
  std::vector<std::string> missing;
  std::set_symmetric_difference(recon.begin(), recon.end(), gt.begin(), gt.end(), std::back_inserter(missing));
  if (!missing.empty()) {
    throw ManifestError("scene '" + scene + "': unpaired frame " + missing.front());
  }
  for (const auto& name : recon) {
    const auto a = read_pgm(recon_dir / name);
    const auto b = read_pgm(gt_dir / name);
    report.rows.push_back({scene, fs::path(name).stem().string(), psnr(a, b), ssim(a, b)});
  }
}

}  // namespace

std::string frame_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%03zu", index);
  return buf;
}

SimConfig sim_config_from(const KeyValueFile& kv, std::string_view prefix) {
  SimConfig cfg;
  cfg.threshold = kv.get_double(key(prefix, "threshold"), 1.0);
  cfg.gain = kv.get_double(key(prefix, "gain"), cfg.threshold / 4.0);
  cfg.readout_period = static_cast<Tick>(kv.get_uint(key(prefix, "readout_period"), 1));
  cfg.dark_mean = kv.get_double(key(prefix, "dark_mean"), cfg.threshold / 2500.0);
  cfg.dark_fpn_sigma = kv.get_double(key(prefix, "dark_fpn_sigma"), cfg.dark_mean / 4.0);
  cfg.shot_noise = kv.get_bool(key(prefix, "shot_noise"), false);
  cfg.shot_quanta = kv.get_double(key(prefix, "shot_quanta"), 256.0);
  cfg.seed = kv.get_uint(key(prefix, "seed"), 0);
  cfg.validate();
  return cfg;
}

void sim_config_to(const SimConfig& cfg, KeyValueFile& kv, std::string_view prefix) {
  kv.set(key(prefix, "threshold"), cfg.threshold);
  kv.set(key(prefix, "gain"), cfg.gain);
  kv.set(key(prefix, "readout_period"), static_cast<std::uint64_t>(cfg.readout_period));
  kv.set(key(prefix, "dark_mean"), cfg.dark_mean);
  kv.set(key(prefix, "dark_fpn_sigma"), cfg.dark_fpn_sigma);
  kv.set(key(prefix, "shot_noise"), cfg.shot_noise);
  kv.set(key(prefix, "shot_quanta"), cfg.shot_quanta);
  kv.set(key(prefix, "seed"), cfg.seed);
}

double darkening_preset(std::string_view name) {
  if (name == "normal") return 1.0;
  if (name == "dim") return 0.3;
  if (name == "low") return 0.08;
  if (name == "very-low") return 0.03;
  throw ConfigError("unknown darkening preset '" + std::string(name) + "'");
}

void DatasetConfig::validate() const {
  if (scenes == 0) throw ConfigError("scenes must be positive");
  if (height == 0 || width == 0) throw ConfigError("height and width must be positive");
  if (window_len == 0 || window_len % 2 == 0) throw ConfigError("window_len must be odd");
  if (num_windows == 0) throw ConfigError("num_windows must be positive");
  if (num_windows * window_len > effective_length()) {
    throw ConfigError("num_windows * window_len exceeds stream_length");
  }
  if (!(darkening_min >= 0.0 && darkening_max <= 1.0 && darkening_min < darkening_max)) {
    throw ConfigError("darkening range must satisfy 0 <= min < max <= 1");
  }
  if (darkening != "random") {
    double factor = 0;
    try {
      factor = darkening_preset(darkening);
    } catch (const ConfigError&) {
      factor = parse_double(darkening);
    }
    if (!(factor > 0.0 && factor <= 1.0)) throw ConfigError("darkening must lie in (0, 1]");
  }
  if (!(min_speed >= 0.0 && min_speed <= max_speed)) throw ConfigError("speeds must satisfy 0 <= min <= max");
  sim.validate();
}

DatasetConfig DatasetConfig::from(const KeyValueFile& kv) {
  static const std::set<std::string, std::less<>> known = {
      "scenes", "height", "width", "num_windows", "window_len", "stream_length", "seed", "kinds",
      "darkening", "darkening_min", "darkening_max", "min_speed", "max_speed", "threshold", "gain",
      "readout_period", "dark_mean", "dark_fpn_sigma", "shot_noise", "shot_quanta"};
  for (const auto& [k, v] : kv.entries()) {
    if (!known.contains(k)) throw ConfigError("unknown config key '" + k + "'");
  }
  DatasetConfig c;
  c.scenes = kv.get_uint("scenes", c.scenes);
  c.height = kv.get_uint("height", c.height);
  c.width = kv.get_uint("width", c.width);
  c.num_windows = kv.get_uint("num_windows", c.num_windows);
  c.window_len = kv.get_uint("window_len", c.window_len);
  c.stream_length = kv.get_uint("stream_length", c.stream_length);
  c.seed = kv.get_uint("seed", c.seed);
  if (const auto kinds = kv.get("kinds"); kinds && *kinds != "random") {
    for (const auto& name : split(*kinds, ',')) {
      try {
        c.kinds.push_back(parse_scene_kind(name));
      } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
      }
    }
  }
  c.darkening = kv.get("darkening").value_or(c.darkening);
  c.darkening_min = kv.get_double("darkening_min", c.darkening_min);
  c.darkening_max = kv.get_double("darkening_max", c.darkening_max);
  c.min_speed = kv.get_double("min_speed", c.min_speed);
  c.max_speed = kv.get_double("max_speed", c.max_speed);
  c.sim = sim_config_from(kv);
  c.validate();
  return c;
}

DatasetConfig DatasetConfig::load(const fs::path& path) { return from(KeyValueFile::load(path)); }

KeyValueFile manifest_to_keyvalue(const DatasetManifest& m) {
  KeyValueFile kv;
  kv.set("format", std::string(kManifestFormat));
  kv.set("height", static_cast<std::uint64_t>(m.height));
  kv.set("width", static_cast<std::uint64_t>(m.width));
  kv.set("stream_length", static_cast<std::uint64_t>(m.stream_length));
  kv.set("num_windows", static_cast<std::uint64_t>(m.num_windows));
  kv.set("window_len", static_cast<std::uint64_t>(m.window_len));
  kv.set("seed", m.seed);
  sim_config_to(m.sim, kv, "sim.");
  kv.set("scenes", static_cast<std::uint64_t>(m.scenes.size()));
  for (std::size_t i = 0; i < m.scenes.size(); ++i) {
    const auto& s = m.scenes[i];
    const auto p = "scene." + std::to_string(i) + ".";
    kv.set(p + "id", s.id);
    kv.set(p + "kind", std::string(to_string(s.kind)));
    kv.set(p + "seed", s.seed);
    kv.set(p + "sim_seed", s.sim_seed);
    kv.set(p + "darkening", s.darkening);
    kv.set(p + "speed", s.speed);
    kv.set(p + "stream", s.stream);
    kv.set(p + "gt", join(s.ground_truth, ','));
  }
  return kv;
}

DatasetManifest manifest_from_keyvalue(const KeyValueFile& kv) {
  try {
    if (kv.require("format") != kManifestFormat) throw ManifestError("unsupported manifest format");
    DatasetManifest m;
    m.height = parse_uint(kv.require("height"));
    m.width = parse_uint(kv.require("width"));
    m.stream_length = parse_uint(kv.require("stream_length"));
    m.num_windows = parse_uint(kv.require("num_windows"));
    m.window_len = parse_uint(kv.require("window_len"));
    m.seed = parse_uint(kv.require("seed"));
    m.sim = sim_config_from(kv, "sim.");
    const auto count = parse_uint(kv.require("scenes"));
    for (std::size_t i = 0; i < count; ++i) {
      const auto p = "scene." + std::to_string(i) + ".";
      ManifestScene s;
      s.id = kv.require(p + "id");
      s.kind = parse_scene_kind(kv.require(p + "kind"));
      s.seed = parse_uint(kv.require(p + "seed"));
      s.sim_seed = parse_uint(kv.require(p + "sim_seed"));
      s.darkening = parse_double(kv.require(p + "darkening"));
      s.speed = parse_double(kv.require(p + "speed"));
      s.stream = kv.require(p + "stream");
      s.ground_truth = split(kv.require(p + "gt"), ',');
      m.scenes.push_back(std::move(s));
    }
    return m;
  } catch (const ManifestError&) {
    throw;
  } catch (const Error& e) {
    throw ManifestError(std::string("bad manifest: ") + e.what());
  }
}

void write_manifest(const DatasetManifest& manifest, const fs::path& path) {
  manifest_to_keyvalue(manifest).save(path);
}

DatasetManifest read_manifest(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw ManifestError("manifest not found: " + path.string());
  return manifest_from_keyvalue(KeyValueFile::load(path));
}

void validate_manifest(const DatasetManifest& m, const fs::path& root) {
  if (m.window_len % 2 == 0 || m.num_windows * m.window_len > m.stream_length) {
    throw ManifestError("window layout " + std::to_string(m.num_windows) + "x" + std::to_string(m.window_len) +
                        " does not fit stream length " + std::to_string(m.stream_length));
  }
  for (const auto& s : m.scenes) {
    const auto stream_path = root / s.stream;
    if (!fs::is_regular_file(stream_path)) throw ManifestError("missing stream " + stream_path.string());
    try {
      const auto stream = read_spk_file(stream_path);
      if (stream.height() != m.height || stream.width() != m.width || stream.length() != m.stream_length) {
        throw ManifestError("stream " + stream_path.string() + " has unexpected dimensions");
      }
    } catch (const FormatError& e) {
      throw ManifestError("stream " + stream_path.string() + ": " + e.what());
    }
    if (s.ground_truth.size() != m.num_windows) {
      throw ManifestError("scene " + s.id + " lists " + std::to_string(s.ground_truth.size()) +
                          " ground-truth frames, expected " + std::to_string(m.num_windows));
    }
    for (const auto& gt : s.ground_truth) {
      if (!fs::is_regular_file(root / gt)) throw ManifestError("missing ground truth " + (root / gt).string());
    }
  }
}

DatasetManifest generate_dataset(const DatasetConfig& config, const fs::path& out_dir) {
  config.validate();
  ensure_dir(out_dir / "streams");
  ensure_dir(out_dir / "gt");

  DatasetManifest manifest;
  manifest.height = config.height;
  manifest.width = config.width;
  manifest.stream_length = config.effective_length();
  manifest.num_windows = config.num_windows;
  manifest.window_len = config.window_len;
  manifest.seed = config.seed;
  manifest.sim = config.sim;
  manifest.sim.seed = 0;

  const auto n_ticks = manifest.stream_length;
  for (std::size_t i = 0; i < config.scenes; ++i) {
    SplitMix64 rng(derive_seed(config.seed, 0xDA7A, i));
    ManifestScene scene;
    scene.id = scene_id(i);
    scene.kind = config.kinds.empty() ? kAllSceneKinds[rng() % kAllSceneKinds.size()]
                                      : config.kinds[i % config.kinds.size()];
    if (config.darkening == "random") {
      // Upper-inclusive draw keeps the factor strictly positive.
      scene.darkening = config.darkening_max - (config.darkening_max - config.darkening_min) * rng.uniform();
    } else {
      try {
        scene.darkening = darkening_preset(config.darkening);
      } catch (const ConfigError&) {
        scene.darkening = parse_double(config.darkening);
      }
    }
    scene.speed = draw(rng, config.min_speed, config.max_speed);
    scene.seed = derive_seed(config.seed, 0x5CE7E, i);
    scene.sim_seed = derive_seed(config.seed, 0x51A, i);
    scene.stream = "streams/" + scene.id + ".spk";

    const auto gt_dir = out_dir / "gt" / scene.id;
    ensure_dir(gt_dir);
    const SceneGenerator generator(scene.kind, config.height, config.width, {scene.speed, 0}, scene.seed);
    const auto sim = manifest.scene_sim(scene);
    SensorState sensor(sim, sample_dark_current(sim, config.height, config.width));
    SpikeStreamBuilder builder(config.height, config.width, n_ticks);
    std::size_t next_gt = 0;
    for (std::size_t n = 0; n < n_ticks; ++n) {
      auto frame = generator.render(static_cast<Tick>(n));
      darken_in_place(frame, scene.darkening);
      sensor.step(frame, n, builder);
      if (next_gt < config.num_windows &&
          static_cast<Tick>(n) == window_center(0, next_gt, config.window_len)) {
        const auto rel = "gt/" + scene.id + "/" + frame_name(next_gt) + ".pgm";
        write_pgm(frame, out_dir / rel);
        scene.ground_truth.push_back(rel);
        ++next_gt;
      }
    }
    write_spk_file(std::move(builder).build(), out_dir / scene.stream);
    manifest.scenes.push_back(std::move(scene));
  }
  write_manifest(manifest, out_dir / "manifest.txt");
  return manifest;
}

std::string_view to_string(TransformMode mode) {
  switch (mode) {
    case TransformMode::Lisi: return "lisi";
    case TransformMode::GisiForward: return "gisi-forward";
    case TransformMode::GisiBackward: return "gisi-backward";
    case TransformMode::GisiCombined: return "gisi-combined";
  }
  return "unknown";
}

TransformMode parse_transform_mode(std::string_view name) {
  for (auto mode : {TransformMode::Lisi, TransformMode::GisiForward, TransformMode::GisiBackward,
                    TransformMode::GisiCombined}) {
    if (to_string(mode) == name) return mode;
  }
  throw ArgumentError("unknown transform mode '" + std::string(name) + "'");
}

std::vector<IsiMap> transform_stream(const SpikeStream& stream, TransformMode mode, std::size_t num_windows,
                                     std::size_t window_len) {
  const auto windows = partition_windows(stream, num_windows, window_len);
  auto sweep = gisi_sweep(windows);
  switch (mode) {
    case TransformMode::Lisi: return std::move(sweep.lisi);
    case TransformMode::GisiForward: return std::move(sweep.forward);
    case TransformMode::GisiBackward: return std::move(sweep.backward);
    case TransformMode::GisiCombined: return std::move(sweep.combined);
  }
  return {};
}

std::vector<fs::path> write_transform(const SpikeStream& stream, TransformMode mode, std::size_t num_windows,
                                      std::size_t window_len, const fs::path& out_dir) {
  const auto maps = transform_stream(stream, mode, num_windows, window_len);
  ensure_dir(out_dir);
  std::vector<fs::path> written;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    char base[64];
    std::snprintf(base, sizeof(base), "%s_%03zu", std::string(to_string(mode)).c_str(), i);
    const auto intervals = out_dir / (std::string(base) + ".ten");
    const auto prev = out_dir / (std::string(base) + ".censored_prev.ten");
    const auto next = out_dir / (std::string(base) + ".censored_next.ten");
    write_tensor(grid_tensor(maps[i].intervals), intervals);
    write_tensor(flag_tensor(maps[i].censored_prev), prev);
    write_tensor(flag_tensor(maps[i].censored_next), next);
    written.insert(written.end(), {intervals, prev, next});
  }
  return written;
}

std::string_view to_string(ReconMethod method) {
  switch (method) {
    case ReconMethod::Tfp: return "tfp";
    case ReconMethod::Tfi: return "tfi";
    case ReconMethod::GisiTfi: return "gisi-tfi";
  }
  return "unknown";
}

ReconMethod parse_recon_method(std::string_view name) {
  for (auto method : {ReconMethod::Tfp, ReconMethod::Tfi, ReconMethod::GisiTfi}) {
    if (to_string(method) == name) return method;
  }
  throw ArgumentError("unknown reconstruction method '" + std::string(name) + "'");
}

std::vector<Image> reconstruct_stream(const SpikeStream& stream, ReconMethod method, std::size_t num_windows,
                                      std::size_t window_len, const SimConfig& cfg) {
  const auto windows = partition_windows(stream, num_windows, window_len);
  std::vector<Image> images;
  switch (method) {
    case ReconMethod::Tfp:
      for (const auto& w : windows) images.push_back(tfp_reconstruct(w, cfg));
      break;
    case ReconMethod::Tfi:
      for (const auto& w : windows) images.push_back(tfi_reconstruct(lisi_transform(w), cfg));
      break;
    case ReconMethod::GisiTfi:
      images = gisi_tfi_reconstruct(windows, cfg);
      break;
  }
  return images;
}

std::vector<fs::path> write_recon(const SpikeStream& stream, ReconMethod method, std::size_t num_windows,
                                  std::size_t window_len, const SimConfig& cfg, const fs::path& out_dir) {
  const auto images = reconstruct_stream(stream, method, num_windows, window_len, cfg);
  ensure_dir(out_dir);
  std::vector<fs::path> written;
  for (std::size_t i = 0; i < images.size(); ++i) {
    written.push_back(out_dir / (frame_name(i) + ".pgm"));
    write_pgm(images[i], written.back());
  }
  return written;
}

void recon_dataset(const fs::path& manifest_path, ReconMethod method, const fs::path& out_dir) {
  const auto manifest = read_manifest(manifest_path);
  const auto root = manifest_path.parent_path();
  validate_manifest(manifest, root);
  for (const auto& scene : manifest.scenes) {
    const auto stream = read_spk_file(root / scene.stream);
    write_recon(stream, method, manifest.num_windows, manifest.window_len, manifest.scene_sim(scene),
                out_dir / scene.id);
  }
}

MetricReport evaluate_dirs(const fs::path& recon_dir, const fs::path& gt_dir) {
  if (!fs::is_directory(recon_dir)) throw ManifestError("not a directory: " + recon_dir.string());
  if (!fs::is_directory(gt_dir)) throw ManifestError("not a directory: " + gt_dir.string());
  MetricReport report;
  const auto scenes = sorted_entries(recon_dir, true);
  if (scenes.empty()) {
    evaluate_scene(gt_dir.filename().string(), recon_dir, gt_dir, report);
  } else {
    for (const auto& scene : scenes) evaluate_scene(scene, recon_dir / scene, gt_dir / scene, report);
  }
  if (report.rows.empty()) throw ManifestError("no frames to evaluate in " + recon_dir.string());
  return report;
}

std::string metrics_csv(const MetricReport& report) {
  std::string out = "scene,frame,psnr,ssim\n";
  for (const auto& row : report.rows) {
    out += row.scene + "," + row.frame + "," + format_double(row.psnr) + "," + format_double(row.ssim) + "\n";
  }
  return out;
}

std::string metrics_summary(const MetricReport& report) {
  std::map<std::string, std::vector<const MetricRow*>> by_scene;
  for (const auto& row : report.rows) by_scene[row.scene].push_back(&row);
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-24s %7s %10s %9s\n", "scene", "frames", "psnr", "ssim");
  out += line;
  for (const auto& [scene, rows] : by_scene) {
    double p = 0, s = 0;
    for (const auto* r : rows) {
      p += r->psnr;
      s += r->ssim;
    }
    const auto n = static_cast<double>(rows.size());
    std::snprintf(line, sizeof(line), "%-24s %7zu %10.4f %9.5f\n", scene.c_str(), rows.size(), p / n, s / n);
    out += line;
  }
  std::snprintf(line, sizeof(line), "%-24s %7zu %10.4f %9.5f\n", "mean", report.rows.size(), report.mean_psnr(),
                report.mean_ssim());
  out += line;
  return out;
}

std::vector<fs::path> export_window_tensors(const SpikeStream& stream, std::size_t num_windows,
                                            std::size_t window_len, const fs::path& out_dir) {
  const auto windows = partition_windows(stream, num_windows, window_len);
  ensure_dir(out_dir);
  std::vector<fs::path> written;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    Tensor t{{static_cast<std::uint32_t>(w.length()), static_cast<std::uint32_t>(w.height()),
              static_cast<std::uint32_t>(w.width())},
             {}};
    t.values.reserve(w.length() * w.pixels());
    for (std::size_t j = 0; j < w.length(); ++j) {
      for (std::size_t p = 0; p < w.pixels(); ++p) t.values.push_back(w.spike(j, p) ? 1.0f : 0.0f);
    }
    char name[32];
    std::snprintf(name, sizeof(name), "window_%03zu.ten", i);
    written.push_back(out_dir / name);
    write_tensor(t, written.back());
  }
  return written;
}

}  // namespace spikecam
