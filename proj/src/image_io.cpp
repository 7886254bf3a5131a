#include "spikecam/image_io.hpp"

#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "spikecam/recon.hpp"

namespace spikecam {

namespace {

constexpr char kTensorMagic[4] = {'T', 'E', 'N', 'S'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(bytes[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  std::string token;
  while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') {
    token.push_back(static_cast<char>(bytes[pos++]));
  }
  if (token.empty()) throw FormatError("truncated PGM header");
  return token;
}

std::size_t pgm_number(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  const auto token = pgm_token(bytes, pos);
  std::size_t value = 0;
  for (char c : token) {
    if (!std::isdigit(static_cast<unsigned char>(c)) || value > 1'000'000'000) {
      throw FormatError("bad PGM header field '" + token + "'");
    }
    value = value * 10 + static_cast<std::size_t>(c - '0');
  }
  return value;
}

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(std::span<const std::uint8_t> bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void write_pgm(const Image& image, const std::filesystem::path& path) {
  const auto header = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.reserve(bytes.size() + image.size());
  for (double v : image.data) bytes.push_back(to_u8(v));
  write_file_bytes(bytes, path);
}

Image read_pgm(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  std::size_t pos = 0;
  if (pgm_token(bytes, pos) != "P5") throw FormatError(path.string() + " is not a binary PGM");
  const auto width = pgm_number(bytes, pos);
  const auto height = pgm_number(bytes, pos);
  const auto maxval = pgm_number(bytes, pos);
  if (width == 0 || height == 0) throw FormatError(path.string() + " has a zero dimension");
  if (maxval == 0 || maxval > 255) throw FormatError(path.string() + ": only 8-bit PGM is supported");
  ++pos;  // single whitespace after maxval
  if (bytes.size() < pos || bytes.size() - pos < width * height) {
    throw LengthError(path.string() + ": truncated PGM payload");
  }
  Image img(height, width);
  for (std::size_t i = 0; i < img.size(); ++i) {
    img[i] = static_cast<double>(bytes[pos + i]) / static_cast<double>(maxval);
  }
  return img;
}

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> encode_tensor(const Tensor& tensor) {
  if (tensor.dims.size() > 255) throw FormatError("tensor rank exceeds 255");
  if (tensor.values.size() != tensor.element_count()) {
    throw ArgumentError("tensor has " + std::to_string(tensor.values.size()) + " values for " +
                        std::to_string(tensor.element_count()) + " elements");
  }
  std::vector<std::uint8_t> out(std::begin(kTensorMagic), std::end(kTensorMagic));
  out.push_back(static_cast<std::uint8_t>(tensor.dims.size()));
  for (auto d : tensor.dims) put_u32(out, d);
  out.reserve(out.size() + 4 * tensor.values.size());
  for (float v : tensor.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 5) throw LengthError("truncated .ten header");
  if (std::memcmp(bytes.data(), kTensorMagic, 4) != 0) throw FormatError("bad .ten magic");
  const std::size_t rank = bytes[4];
  if (bytes.size() < 5 + 4 * rank) throw LengthError("truncated .ten dims");
  Tensor t;
  std::size_t count = 1;
  for (std::size_t i = 0; i < rank; ++i) {
    t.dims.push_back(get_u32(bytes.data() + 5 + 4 * i));
    if (__builtin_mul_overflow(count, static_cast<std::size_t>(t.dims.back()), &count)) {
      throw FormatError(".ten dimension overflow");
    }
  }
  const auto offset = 5 + 4 * rank;
  if ((bytes.size() - offset) / 4 != count || (bytes.size() - offset) % 4 != 0) {
    throw LengthError(".ten payload size does not match its dims");
  }
  t.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) t.values[i] = std::bit_cast<float>(get_u32(bytes.data() + offset + 4 * i));
  return t;
}

void write_tensor(const Tensor& tensor, const std::filesystem::path& path) {
  write_file_bytes(encode_tensor(tensor), path);
}

Tensor read_tensor(const std::filesystem::path& path) { return decode_tensor(read_file_bytes(path)); }

}  // namespace spikecam
