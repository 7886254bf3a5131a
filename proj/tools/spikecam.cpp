#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "spikecam/codec.hpp"
#include "spikecam/image_io.hpp"
#include "spikecam/pipeline.hpp"

namespace fs = std::filesystem;
using namespace spikecam;

namespace {

struct WindowFlags {
  std::size_t window_len = kDefaultWindowLen;
  std::size_t num_windows = kDefaultNumWindows;

  void attach(CLI::App* cmd) {
    cmd->add_option("--window-len", window_len, "window length 2*dt+1 in ticks")->capture_default_str();
    cmd->add_option("--num-windows", num_windows, "number of contiguous windows K")->capture_default_str();
  }
};

void write_text(const std::string& text, const fs::path& path) {
  write_file_bytes(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()), path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spikecam: spike camera simulation, ISI transforms and classical reconstruction"};
  app.require_subcommand(1);

  // gen-dataset
  auto* gen = app.add_subcommand("gen-dataset", "simulate a low-light dataset from a key=value config");
  std::string gen_config;
  std::string gen_out;
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--config", gen_config, "dataset config file")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--seed", gen_seed, "override the config seed");

  // transform
  auto* transform = app.add_subcommand("transform", "export LISI/GISI maps as .ten tensors");
  std::string transform_stream_path;
  std::string transform_mode = "gisi-combined";
  std::string transform_out;
  WindowFlags transform_windows;
  transform->add_option("stream", transform_stream_path, ".spk stream")->required();
  transform->add_option("--mode", transform_mode, "lisi | gisi-forward | gisi-backward | gisi-combined")
      ->capture_default_str();
  transform->add_option("--out", transform_out, "output directory")->required();
  transform_windows.attach(transform);

  // recon
  auto* recon = app.add_subcommand("recon", "classical reconstruction, one PGM per window center");
  std::string recon_stream_path;
  std::string recon_manifest;
  std::string recon_method = "tfi";
  std::string recon_config;
  std::string recon_out;
  WindowFlags recon_windows;
  auto* recon_stream_opt = recon->add_option("stream", recon_stream_path, ".spk stream");
  auto* recon_manifest_opt = recon->add_option("--manifest", recon_manifest, "reconstruct every scene of a dataset");
  recon_stream_opt->excludes(recon_manifest_opt);
  recon->add_option("--method", recon_method, "tfp | tfi | gisi-tfi")->capture_default_str();
  recon->add_option("--config", recon_config, "sensor config (threshold, gain)")->check(CLI::ExistingFile);
  recon->add_option("--out", recon_out, "output directory")->required();
  recon_windows.attach(recon);

  // eval
  auto* eval = app.add_subcommand("eval", "PSNR/SSIM of reconstructions against ground truth");
  std::string eval_recon;
  std::string eval_gt;
  std::string eval_out;
  std::string eval_summary;
  eval->add_option("recon_dir", eval_recon)->required();
  eval->add_option("gt_dir", eval_gt)->required();
  eval->add_option("--out", eval_out, "CSV path (scene,frame,psnr,ssim)")->required();
  eval->add_option("--summary", eval_summary, "also write the summary table here");

  // export-tensors
  auto* export_cmd = app.add_subcommand("export-tensors", "export spike windows as L x H x W .ten tensors");
  std::string export_stream_path;
  std::string export_out;
  WindowFlags export_windows;
  export_cmd->add_option("stream", export_stream_path, ".spk stream")->required();
  export_cmd->add_option("--out", export_out, "output directory")->required();
  export_windows.attach(export_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      auto kv = KeyValueFile::load(gen_config);
      if (gen_seed) kv.set("seed", *gen_seed);
      const auto manifest = generate_dataset(DatasetConfig::from(kv), gen_out);
      std::cout << "wrote " << manifest.scenes.size() << " scenes to " << gen_out << "\n";
    } else if (*transform) {
      const auto stream = read_spk_file(transform_stream_path);
      const auto files = write_transform(stream, parse_transform_mode(transform_mode), transform_windows.num_windows,
                                         transform_windows.window_len, transform_out);
      std::cout << "wrote " << files.size() << " tensors to " << transform_out << "\n";
    } else if (*recon) {
      const auto method = parse_recon_method(recon_method);
      if (!recon_manifest.empty()) {
        recon_dataset(recon_manifest, method, recon_out);
      } else {
        if (recon_stream_path.empty()) throw ArgumentError("recon needs a stream or --manifest");
        const auto cfg = recon_config.empty() ? SimConfig{} : sim_config_from(KeyValueFile::load(recon_config));
        write_recon(read_spk_file(recon_stream_path), method, recon_windows.num_windows, recon_windows.window_len,
                    cfg, recon_out);
      }
      std::cout << "wrote " << to_string(method) << " reconstructions to " << recon_out << "\n";
    } else if (*eval) {
      const auto report = evaluate_dirs(eval_recon, eval_gt);
      write_text(metrics_csv(report), eval_out);
      const auto summary = metrics_summary(report);
      if (!eval_summary.empty()) write_text(summary, eval_summary);
      std::cout << summary;
    } else if (*export_cmd) {
      const auto files = export_window_tensors(read_spk_file(export_stream_path), export_windows.num_windows,
                                               export_windows.window_len, export_out);
      std::cout << "wrote " << files.size() << " tensors to " << export_out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "spikecam: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
