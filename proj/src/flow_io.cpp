#include "noisewarp/flow_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include <zlib.h>

#include "noisewarp/errors.hpp"

namespace noisewarp {
namespace {

static_assert(std::endian::native == std::endian::little, "little-endian host required");

class Writer {
 public:
  explicit Writer(std::size_t reserve) { out_.reserve(reserve); }
  template <typename T>
  void put(T value) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    out_.insert(out_.end(), p, p + sizeof(T));
  }
  void put_bytes(const char* data, std::size_t n) { out_.insert(out_.end(), data, data + n); }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, const char* what) : bytes_(bytes), what_(what) {}
  template <typename T>
  T get() {
    require(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  void require(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(std::string(what_) + ": truncated at offset " + std::to_string(pos_) +
                        ", need " + std::to_string(n) + " more bytes, have " +
                        std::to_string(bytes_.size() - pos_));
    }
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  const std::uint8_t* cursor() const { return bytes_.data() + pos_; }
  void skip(std::size_t n) {
    require(n);
    pos_ += n;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  const char* what_;
  std::size_t pos_ = 0;
};

FlowField read_one_flo(Reader& in) {
  const std::size_t start = in.pos();
  const float magic = in.get<float>();
  if (std::bit_cast<std::uint32_t>(magic) != std::bit_cast<std::uint32_t>(kFloMagic)) {
    throw FormatError(".flo: bad magic at offset " + std::to_string(start));
  }
  const std::int32_t width = in.get<std::int32_t>();
  const std::int32_t height = in.get<std::int32_t>();
  if (width <= 0 || height <= 0) {
    throw FormatError(".flo: nonpositive dimensions " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (in.remaining() / 8 < n) {
    throw FormatError(".flo: payload truncated, expected " + std::to_string(n * 8) +
                      " bytes, got " + std::to_string(in.remaining()));
  }
  std::vector<float> dx(n), dy(n);
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] = in.get<float>();
    dy[i] = in.get<float>();
  }
  try {
    return FlowField(height, width, std::move(dx), std::move(dy));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string(".flo: ") + e.what());
  }
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

void hsv_to_rgb(double hue, double sat, double val, std::uint8_t* rgb) {
  const double c = val * sat;
  const double h = hue / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(h, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = val - c;
  rgb[0] = to_byte(255.0 * (r + m));
  rgb[1] = to_byte(255.0 * (g + m));
  rgb[2] = to_byte(255.0 * (b + m));
}

void put_be32(Bytes& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(Bytes& out, const char type[4], const Bytes& data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t type_pos = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0L, out.data() + type_pos, static_cast<uInt>(4 + data.size()));
  put_be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

Bytes write_flo(const FlowField& flow) {
  Writer out(12 + flow.pixel_count() * 8);
  out.put(kFloMagic);
  out.put(static_cast<std::int32_t>(flow.width()));
  out.put(static_cast<std::int32_t>(flow.height()));
  const auto dx = flow.dx();
  const auto dy = flow.dy();
  for (std::size_t i = 0; i < flow.pixel_count(); ++i) {
    out.put(dx[i]);
    out.put(dy[i]);
  }
  return out.take();
}

FlowField read_flo(std::span<const std::uint8_t> bytes) {
  Reader in(bytes, ".flo");
  FlowField flow = read_one_flo(in);
  if (in.remaining() != 0) {
    throw FormatError(".flo: " + std::to_string(in.remaining()) + " trailing bytes after payload");
  }
  return flow;
}

std::vector<FlowField> read_flo_stream(std::span<const std::uint8_t> bytes) {
  Reader in(bytes, ".flo stream");
  std::vector<FlowField> flows;
  while (in.remaining() > 0) flows.push_back(read_one_flo(in));
  return flows;
}

Bytes write_noise_container(const NoiseSequence& seq) {
  const std::size_t per_frame = seq.frame(0).size();
  Writer out(kContainerHeaderSize + seq.size() * per_frame * 4);
  out.put_bytes("GWTF", 4);
  out.put(kContainerVersion);
  out.put(static_cast<std::uint32_t>(seq.size()));
  out.put(static_cast<std::uint32_t>(seq.channels()));
  out.put(static_cast<std::uint32_t>(seq.height()));
  out.put(static_cast<std::uint32_t>(seq.width()));
  out.put(seq.seed());
  for (const NoiseField& frame : seq.frames()) {
    for (float v : frame.values()) out.put(v);
  }
  return out.take();
}

NoiseSequence read_noise_container(std::span<const std::uint8_t> bytes) {
  Reader in(bytes, "noise container");
  in.require(kContainerHeaderSize);
  if (std::memcmp(in.cursor(), "GWTF", 4) != 0) throw FormatError("noise container: bad magic");
  in.skip(4);
  const auto version = in.get<std::uint32_t>();
  if (version != kContainerVersion) {
    throw FormatError("noise container: unsupported version " + std::to_string(version));
  }
  const auto frames = in.get<std::uint32_t>();
  const auto channels = in.get<std::uint32_t>();
  const auto height = in.get<std::uint32_t>();
  const auto width = in.get<std::uint32_t>();
  const auto seed = in.get<std::uint64_t>();
  if (frames == 0 || channels == 0 || height == 0 || width == 0 || channels > 0x7fffffffu ||
      height > 0x7fffffffu || width > 0x7fffffffu) {
    throw FormatError("noise container: invalid dimensions in header");
  }
  const std::size_t per_frame = static_cast<std::size_t>(channels) * height * width;
  const unsigned __int128 expected = static_cast<unsigned __int128>(per_frame) * frames * 4;
  if (expected != in.remaining()) {
    throw FormatError("noise container: payload length mismatch, expected " +
                      std::to_string(static_cast<std::uint64_t>(expected)) + " bytes, got " +
                      std::to_string(in.remaining()));
  }
  std::vector<NoiseField> out;
  out.reserve(frames);
  for (std::uint32_t f = 0; f < frames; ++f) {
    std::vector<float> values(per_frame);
    std::memcpy(values.data(), in.cursor(), per_frame * 4);
    in.skip(per_frame * 4);
    try {
      out.emplace_back(static_cast<int>(height), static_cast<int>(width), static_cast<int>(channels),
                       std::move(values));
    } catch (const std::invalid_argument& e) {
      throw FormatError("noise container frame " + std::to_string(f) + ": " + e.what());
    }
  }
  return NoiseSequence(std::move(out), seed, {"container"});
}

Image visualize_flow(const FlowField& flow) {
  const std::size_t n = flow.pixel_count();
  std::vector<double> magnitude(n);
  for (std::size_t i = 0; i < n; ++i) magnitude[i] = std::hypot(flow.dx()[i], flow.dy()[i]);
  std::vector<double> sorted = magnitude;
  const std::size_t rank = std::min(n - 1, static_cast<std::size_t>(std::ceil(0.99 * n)) - 1);
  std::nth_element(sorted.begin(), sorted.begin() + rank, sorted.end());
  const double reference = sorted[rank];

  Image image{flow.width(), flow.height(), 3, std::vector<std::uint8_t>(n * 3)};
  for (std::size_t i = 0; i < n; ++i) {
    double hue = std::atan2(flow.dy()[i], flow.dx()[i]) * 180.0 / std::numbers::pi;
    if (hue < 0) hue += 360.0;
    const double sat = reference > 0.0 ? std::min(1.0, magnitude[i] / reference) : 0.0;
    hsv_to_rgb(hue, sat, 1.0, image.pixels.data() + i * 3);
  }
  return image;
}

Image visualize_noise(const NoiseField& noise, int channel) {
  const auto plane = noise.channel(channel);
  Image image{noise.width(), noise.height(), 1, std::vector<std::uint8_t>(plane.size())};
  for (std::size_t i = 0; i < plane.size(); ++i) {
    const double v = std::clamp(static_cast<double>(plane[i]), -3.0, 3.0);
    image.pixels[i] = to_byte(255.0 * (v + 3.0) / 6.0);
  }
  return image;
}

Bytes encode_png(const Image& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw std::invalid_argument("encode_png supports gray or RGB images");
  }
  const std::size_t stride = static_cast<std::size_t>(image.width) * image.channels;
  Bytes raw;
  raw.reserve((stride + 1) * image.height);
  for (int y = 0; y < image.height; ++y) {
    raw.push_back(0);  // filter: none
    const auto* row = image.pixels.data() + y * stride;
    raw.insert(raw.end(), row, row + stride);
  }
  uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
  Bytes packed(packed_size);
  if (compress2(packed.data(), &packed_size, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw std::runtime_error("encode_png: zlib compression failed");
  }
  packed.resize(packed_size);

  Bytes out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  Bytes header;
  put_be32(header, static_cast<std::uint32_t>(image.width));
  put_be32(header, static_cast<std::uint32_t>(image.height));
  header.push_back(8);                                 // bit depth
  header.push_back(image.channels == 3 ? 2 : 0);       // color type
  header.insert(header.end(), {0, 0, 0});              // compression, filter, interlace
  put_chunk(out, "IHDR", header);
  put_chunk(out, "IDAT", packed);
  put_chunk(out, "IEND", {});
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

}  // namespace noisewarp
