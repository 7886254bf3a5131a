#pragma once

#include <string>
#include <vector>

#include "spikecam/grid.hpp"

namespace spikecam {

// Returned for identical images instead of +inf.
inline constexpr double kPsnrCapDb = 99.0;

// PSNR with peak 1. Throws ArgumentError on shape mismatch.
double psnr(const Image& a, const Image& b);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double data_range = 1.0;
};

// Mean of the Gaussian-weighted local SSIM map over all fully contained
// windows. Throws ArgumentError on shape mismatch or images smaller than the window.
double ssim(const Image& a, const Image& b, const SsimParams& params = {});

struct MetricRow {
  std::string scene;
  std::string frame;
  double psnr = 0;
  double ssim = 0;
};

struct MetricReport {
  std::vector<MetricRow> rows;

  double mean_psnr() const;
  double mean_ssim() const;
};

}  // namespace spikecam
