#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "spikecam/spike_stream.hpp"

namespace spikecam {

// `.spk` container: "SPKS", u16 version, u32 H, u32 W, u32 N, u64 origin tick,
// then N frames in SpikeStream's packed layout. All integers little-endian.
inline constexpr std::uint16_t kSpkVersion = 1;
inline constexpr std::size_t kSpkHeaderBytes = 4 + 2 + 4 + 4 + 4 + 8;

std::size_t encode_stream(const SpikeStream& stream, std::ostream& sink);
std::vector<std::uint8_t> encode_stream(const SpikeStream& stream);

SpikeStream decode_stream(std::istream& source);
SpikeStream decode_stream(std::span<const std::uint8_t> bytes);

void write_spk_file(const SpikeStream& stream, const std::filesystem::path& path);
SpikeStream read_spk_file(const std::filesystem::path& path);

}  // namespace spikecam
