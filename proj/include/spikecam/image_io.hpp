#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "spikecam/grid.hpp"

namespace spikecam {

// 8-bit binary PGM (P5). Values are quantized with to_u8 on write and mapped
// back to v / 255 on read.
void write_pgm(const Image& image, const std::filesystem::path& path);
Image read_pgm(const std::filesystem::path& path);

// `.ten` tensor: "TENS", u8 rank, rank x u32 LE dims, then f32 LE row-major.
struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const;
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

std::vector<std::uint8_t> encode_tensor(const Tensor& tensor);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);
void write_tensor(const Tensor& tensor, const std::filesystem::path& path);
Tensor read_tensor(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(std::span<const std::uint8_t> bytes, const std::filesystem::path& path);

}  // namespace spikecam
