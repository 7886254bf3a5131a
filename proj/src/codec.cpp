#include "spikecam/codec.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace spikecam {

namespace {

constexpr std::array<char, 4> kMagic = {'S', 'P', 'K', 'S'};

template <typename T>
void put_le(std::uint8_t* out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out[i] = static_cast<std::uint8_t>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFFu);
  }
}

template <typename T>
T get_le(const std::uint8_t* in) {
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return static_cast<T>(value);
}

struct Header {
  std::uint32_t height;
  std::uint32_t width;
  std::uint32_t length;
  std::uint64_t origin_tick;
  std::size_t payload_bytes;
};

std::array<std::uint8_t, kSpkHeaderBytes> make_header(const SpikeStream& stream) {
  constexpr auto u32_max = std::numeric_limits<std::uint32_t>::max();
  if (stream.height() > u32_max || stream.width() > u32_max || stream.length() > u32_max) {
    throw FormatError("stream dimensions exceed the 32-bit .spk header fields");
  }
  std::array<std::uint8_t, kSpkHeaderBytes> header{};
  std::memcpy(header.data(), kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(header.data() + 4, kSpkVersion);
  put_le<std::uint32_t>(header.data() + 6, static_cast<std::uint32_t>(stream.height()));
  put_le<std::uint32_t>(header.data() + 10, static_cast<std::uint32_t>(stream.width()));
  put_le<std::uint32_t>(header.data() + 14, static_cast<std::uint32_t>(stream.length()));
  put_le<std::uint64_t>(header.data() + 18, static_cast<std::uint64_t>(stream.origin_tick()));
  return header;
}

Header parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kSpkHeaderBytes) {
    throw LengthError("truncated .spk header: " + std::to_string(bytes.size()) + " bytes");
  }
  if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError("bad .spk magic");
  }
  if (const auto version = get_le<std::uint16_t>(bytes.data() + 4); version != kSpkVersion) {
    throw FormatError("unsupported .spk version " + std::to_string(version));
  }
  Header h{};
  h.height = get_le<std::uint32_t>(bytes.data() + 6);
  h.width = get_le<std::uint32_t>(bytes.data() + 10);
  h.length = get_le<std::uint32_t>(bytes.data() + 14);
  h.origin_tick = get_le<std::uint64_t>(bytes.data() + 18);
  if (h.height == 0 || h.width == 0 || h.length == 0) {
    throw FormatError("zero dimension in .spk header");
  }
  if (h.origin_tick > static_cast<std::uint64_t>(std::numeric_limits<Tick>::max()) - h.length) {
    throw FormatError("origin tick out of range in .spk header");
  }
  std::size_t pixels = 0;
  std::size_t payload = 0;
  if (__builtin_mul_overflow(static_cast<std::size_t>(h.height), static_cast<std::size_t>(h.width), &pixels) ||
      __builtin_mul_overflow((pixels + 7) / 8, static_cast<std::size_t>(h.length), &payload)) {
    throw FormatError("dimension overflow in .spk header");
  }
  h.payload_bytes = payload;
  return h;
}

SpikeStream assemble(const Header& h, std::vector<std::uint8_t> payload) {
  return SpikeStream(h.height, h.width, h.length, static_cast<Tick>(h.origin_tick), std::move(payload));
}

}  // namespace

std::size_t encode_stream(const SpikeStream& stream, std::ostream& sink) {
  const auto header = make_header(stream);
  sink.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
  const auto bits = stream.bits();
  sink.write(reinterpret_cast<const char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
  if (!sink) throw IoError("failed writing .spk stream");
  return header.size() + bits.size();
}

std::vector<std::uint8_t> encode_stream(const SpikeStream& stream) {
  const auto header = make_header(stream);
  const auto bits = stream.bits();
  std::vector<std::uint8_t> out(header.size() + bits.size());
  std::copy(header.begin(), header.end(), out.begin());
  std::copy(bits.begin(), bits.end(), out.begin() + static_cast<std::ptrdiff_t>(header.size()));
  return out;
}

SpikeStream decode_stream(std::span<const std::uint8_t> bytes) {
  const auto h = parse_header(bytes);
  const auto available = bytes.size() - kSpkHeaderBytes;
  if (available < h.payload_bytes) {
    throw LengthError("truncated .spk payload: " + std::to_string(available) + " of " +
                      std::to_string(h.payload_bytes) + " bytes");
  }
  if (available > h.payload_bytes) {
    throw LengthError(std::to_string(available - h.payload_bytes) + " trailing bytes after .spk payload");
  }
  const auto payload = bytes.subspan(kSpkHeaderBytes);
  return assemble(h, std::vector<std::uint8_t>(payload.begin(), payload.end()));
}

SpikeStream decode_stream(std::istream& source) {
  std::array<std::uint8_t, kSpkHeaderBytes> header{};
  source.read(reinterpret_cast<char*>(header.data()), static_cast<std::streamsize>(header.size()));
  const auto got = static_cast<std::size_t>(source.gcount());
  const auto h = parse_header(std::span<const std::uint8_t>(header.data(), got));

  // Grow incrementally so a lying header cannot force a huge allocation.
  constexpr std::size_t kChunk = std::size_t{1} << 20;
  std::vector<std::uint8_t> payload;
  while (payload.size() < h.payload_bytes) {
    const auto want = std::min(kChunk, h.payload_bytes - payload.size());
    const auto old = payload.size();
    payload.resize(old + want);
    source.read(reinterpret_cast<char*>(payload.data() + old), static_cast<std::streamsize>(want));
    if (static_cast<std::size_t>(source.gcount()) != want) {
      throw LengthError("truncated .spk payload: " + std::to_string(old + static_cast<std::size_t>(source.gcount())) +
                        " of " + std::to_string(h.payload_bytes) + " bytes");
    }
  }
  if (source.peek() != std::char_traits<char>::eof()) {
    throw LengthError("trailing bytes after .spk payload");
  }
  return assemble(h, std::move(payload));
}

void write_spk_file(const SpikeStream& stream, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  encode_stream(stream, out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

SpikeStream read_spk_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return decode_stream(in);
}

}  // namespace spikecam
