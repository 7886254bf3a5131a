#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spikecam/isi.hpp"
#include "spikecam/keyvalue.hpp"
#include "spikecam/metrics.hpp"
#include "spikecam/scene.hpp"
#include "spikecam/simulator.hpp"

namespace spikecam {

inline constexpr std::size_t kDefaultWindowLen = 41;
inline constexpr std::size_t kDefaultNumWindows = 21;

// Sensor keys: threshold, gain, dark_mean, dark_fpn_sigma, shot_noise,
// shot_quanta, seed. Missing gain defaults to threshold / 4 and missing
// dark_mean to threshold / 2500.
SimConfig sim_config_from(const KeyValueFile& kv, std::string_view prefix = "");
void sim_config_to(const SimConfig& cfg, KeyValueFile& kv, std::string_view prefix = "");

// Named darkening presets: normal, dim, low, very-low.
double darkening_preset(std::string_view name);

struct DatasetConfig {
  std::size_t scenes = 4;
  std::size_t height = 64;
  std::size_t width = 64;
  std::size_t num_windows = kDefaultNumWindows;
  std::size_t window_len = kDefaultWindowLen;
  // 0 means num_windows * window_len.
  std::size_t stream_length = 0;
  std::uint64_t seed = 0;
  // Empty: kind drawn at random per scene; otherwise cycled in order.
  std::vector<SceneKind> kinds;
  // "random" draws from (darkening_min, darkening_max]; else a preset or a number.
  std::string darkening = "random";
  double darkening_min = 0.0;
  double darkening_max = 1.0;
  double min_speed = 0.02;
  double max_speed = 0.2;
  SimConfig sim;

  std::size_t effective_length() const { return stream_length == 0 ? num_windows * window_len : stream_length; }
  void validate() const;

  static DatasetConfig from(const KeyValueFile& kv);
  static DatasetConfig load(const std::filesystem::path& path);
};

struct ManifestScene {
  std::string id;
  SceneKind kind = SceneKind::TranslatingBars;
  std::uint64_t seed = 0;
  std::uint64_t sim_seed = 0;
  double darkening = 1.0;
  double speed = 0.0;
  // Paths relative to the manifest directory.
  std::string stream;
  std::vector<std::string> ground_truth;

  friend bool operator==(const ManifestScene&, const ManifestScene&) = default;
};

struct DatasetManifest {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t stream_length = 0;
  std::size_t num_windows = kDefaultNumWindows;
  std::size_t window_len = kDefaultWindowLen;
  std::uint64_t seed = 0;
  SimConfig sim;
  std::vector<ManifestScene> scenes;

  SimConfig scene_sim(const ManifestScene& scene) const {
    auto cfg = sim;
    cfg.seed = scene.sim_seed;
    return cfg;
  }

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

KeyValueFile manifest_to_keyvalue(const DatasetManifest& manifest);
DatasetManifest manifest_from_keyvalue(const KeyValueFile& kv);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

// Throws ManifestError unless every referenced file exists and decodes, and
// num_windows * window_len fits the stream.
void validate_manifest(const DatasetManifest& manifest, const std::filesystem::path& root);

// Writes streams/<id>.spk, gt/<id>/frame_<i>.pgm (one per window center) and
// manifest.txt under out_dir.
DatasetManifest generate_dataset(const DatasetConfig& config, const std::filesystem::path& out_dir);

enum class TransformMode { Lisi, GisiForward, GisiBackward, GisiCombined };
std::string_view to_string(TransformMode mode);
TransformMode parse_transform_mode(std::string_view name);

std::vector<IsiMap> transform_stream(const SpikeStream& stream, TransformMode mode, std::size_t num_windows,
                                     std::size_t window_len);
// Writes <mode>_<i>.ten intervals plus <mode>_<i>.censored_prev/.censored_next.ten flags.
std::vector<std::filesystem::path> write_transform(const SpikeStream& stream, TransformMode mode,
                                                   std::size_t num_windows, std::size_t window_len,
                                                   const std::filesystem::path& out_dir);

enum class ReconMethod { Tfp, Tfi, GisiTfi };
std::string_view to_string(ReconMethod method);
ReconMethod parse_recon_method(std::string_view name);

std::vector<Image> reconstruct_stream(const SpikeStream& stream, ReconMethod method, std::size_t num_windows,
                                      std::size_t window_len, const SimConfig& cfg);
std::vector<std::filesystem::path> write_recon(const SpikeStream& stream, ReconMethod method,
                                               std::size_t num_windows, std::size_t window_len,
                                               const SimConfig& cfg, const std::filesystem::path& out_dir);
// Reconstructs every scene of a manifest into out_dir/<scene id>/frame_<i>.pgm.
void recon_dataset(const std::filesystem::path& manifest_path, ReconMethod method,
                   const std::filesystem::path& out_dir);

// Pairs PGM files by name. Directories holding scene subdirectories are
// matched scene by scene; flat directories form one scene named after gt_dir.
MetricReport evaluate_dirs(const std::filesystem::path& recon_dir, const std::filesystem::path& gt_dir);
std::string metrics_csv(const MetricReport& report);
std::string metrics_summary(const MetricReport& report);

// Writes window_<i>.ten, each L x H x W with 0/1 values.
std::vector<std::filesystem::path> export_window_tensors(const SpikeStream& stream, std::size_t num_windows,
                                                         std::size_t window_len,
                                                         const std::filesystem::path& out_dir);

std::string frame_name(std::size_t index);

}  // namespace spikecam
