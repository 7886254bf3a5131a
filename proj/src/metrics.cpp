#include "spikecam/metrics.hpp"

#include <cmath>
#include <string>

namespace spikecam {

namespace {

void check_same_shape(const Image& a, const Image& b) {
  if (!a.same_shape(b) || a.data.size() != b.data.size()) {
    throw ArgumentError("image shapes differ: " + std::to_string(a.height) + "x" + std::to_string(a.width) +
                        " vs " + std::to_string(b.height) + "x" + std::to_string(b.width));
  }
}

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(static_cast<std::size_t>(size));
  const double c = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - c;
    k[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += k[static_cast<std::size_t>(i)];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Separable 'valid' filtering: output is (H - n + 1) x (W - n + 1).
Image filter_valid(const Image& src, const std::vector<double>& k) {
  const auto n = k.size();
  const auto out_w = src.width - n + 1;
  const auto out_h = src.height - n + 1;
  Image rows(src.height, out_w);
  for (std::size_t r = 0; r < src.height; ++r) {
    for (std::size_t c = 0; c < out_w; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += k[i] * src.at(r, c + i);
      rows.at(r, c) = acc;
    }
  }
  Image out(out_h, out_w);
  for (std::size_t r = 0; r < out_h; ++r) {
    for (std::size_t c = 0; c < out_w; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += k[i] * rows.at(r + i, c);
      out.at(r, c) = acc;
    }
  }
  return out;
}

Image product(const Image& a, const Image& b) {
  Image out(a.height, a.width);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

}  // namespace

double psnr(const Image& a, const Image& b) {
  check_same_shape(a, b);
  if (a.data.empty()) throw ArgumentError("psnr of empty images");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(a.size());
  if (mse == 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Image& a, const Image& b, const SsimParams& params) {
  check_same_shape(a, b);
  if (params.window <= 0 || params.window % 2 == 0) throw ArgumentError("SSIM window must be odd");
  const auto n = static_cast<std::size_t>(params.window);
  if (a.height < n || a.width < n) {
    throw ArgumentError("image " + std::to_string(a.height) + "x" + std::to_string(a.width) +
                        " is smaller than the " + std::to_string(n) + "x" + std::to_string(n) + " SSIM window");
  }
  const auto k = gaussian_kernel(params.window, params.sigma);
  const double c1 = (params.k1 * params.data_range) * (params.k1 * params.data_range);
  const double c2 = (params.k2 * params.data_range) * (params.k2 * params.data_range);

  const auto mu_a = filter_valid(a, k);
  const auto mu_b = filter_valid(b, k);
  const auto e_aa = filter_valid(product(a, a), k);
  const auto e_bb = filter_valid(product(b, b), k);
  const auto e_ab = filter_valid(product(a, b), k);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double var_a = e_aa[i] - ma * ma;
    const double var_b = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
  }
  return total / static_cast<double>(mu_a.size());
}

double MetricReport::mean_psnr() const {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : rows) sum += r.psnr;
  return sum / static_cast<double>(rows.size());
}

double MetricReport::mean_ssim() const {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : rows) sum += r.ssim;
  return sum / static_cast<double>(rows.size());
}

}  // namespace spikecam
