#include <gtest/gtest.h>

#include <zlib.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "noisewarp/errors.hpp"
#include "noisewarp/flow_io.hpp"

namespace nw = noisewarp;

namespace {

const std::filesystem::path kData = NOISEWARP_TEST_DATA;

std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) | p[3];
}

// Minimal PNG reader for 8-bit images written without filtering.
nw::Image decode_png(const nw::Bytes& png) {
  static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  EXPECT_EQ(std::memcmp(png.data(), sig, 8), 0);
  nw::Image img;
  std::vector<std::uint8_t> idat;
  std::size_t pos = 8;
  while (pos + 8 <= png.size()) {
    const std::uint32_t len = be32(&png[pos]);
    const std::string type(reinterpret_cast<const char*>(&png[pos + 4]), 4);
    const std::uint8_t* data = &png[pos + 8];
    const std::uint32_t crc = be32(data + len);
    EXPECT_EQ(crc, static_cast<std::uint32_t>(::crc32(::crc32(0, &png[pos + 4], 4), data, len)));
    if (type == "IHDR") {
      img.width = static_cast<int>(be32(data));
      img.height = static_cast<int>(be32(data + 4));
      EXPECT_EQ(data[8], 8);
      img.channels = data[9] == 2 ? 3 : 1;
    } else if (type == "IDAT") {
      idat.insert(idat.end(), data, data + len);
    }
    pos += 12 + len;
  }
  const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
  std::vector<std::uint8_t> raw((stride + 1) * img.height);
  uLongf raw_len = raw.size();
  EXPECT_EQ(::uncompress(raw.data(), &raw_len, idat.data(), idat.size()), Z_OK);
  EXPECT_EQ(raw_len, raw.size());
  for (int y = 0; y < img.height; ++y) {
    EXPECT_EQ(raw[y * (stride + 1)], 0);
    img.pixels.insert(img.pixels.end(), raw.begin() + y * (stride + 1) + 1,
                      raw.begin() + (y + 1) * (stride + 1));
  }
  return img;
}

}  // namespace

TEST(Flo, GoldenZeroFlow) {
  const auto golden = nw::read_file(kData / "zero_1x1.flo");
  ASSERT_EQ(golden.size(), 20u);
  const auto flow = nw::read_flo(golden);
  EXPECT_EQ(flow, nw::FlowField::zeros(1, 1));
  EXPECT_EQ(nw::write_flo(flow), golden);
}

TEST(Flo, GoldenRamp) {
  const auto golden = nw::read_file(kData / "ramp_3x2.flo");
  const auto flow = nw::read_flo(golden);
  ASSERT_EQ(flow.width(), 3);
  ASSERT_EQ(flow.height(), 2);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(flow.dx()[i], i * 0.5f - 1.0f);
    EXPECT_EQ(flow.dy()[i], -i * 0.25f + 0.125f);
  }
  EXPECT_EQ(nw::write_flo(flow), golden);
}

TEST(Flo, RandomRoundTripIsBitExact) {
  std::mt19937 gen(3);
  std::normal_distribution<float> d(0.0f, 5.0f);
  std::vector<float> dx(37 * 23), dy(dx.size());
  for (auto& v : dx) v = d(gen);
  for (auto& v : dy) v = d(gen);
  const nw::FlowField f(37, 23, dx, dy);
  EXPECT_EQ(nw::read_flo(nw::write_flo(f)), f);
  auto two = nw::write_flo(f);
  const auto second = nw::write_flo(nw::FlowField::zeros(2, 2));
  two.insert(two.end(), second.begin(), second.end());
  const auto stream = nw::read_flo_stream(two);
  ASSERT_EQ(stream.size(), 2u);
  EXPECT_EQ(stream[1], nw::FlowField::zeros(2, 2));
}

TEST(Flo, MalformedInput) {
  auto bytes = nw::read_file(kData / "ramp_3x2.flo");
  auto bad_magic = bytes;
  std::memset(bad_magic.data(), 0, 4);
  EXPECT_THROW(nw::read_flo(bad_magic), nw::FormatError);
  EXPECT_THROW(nw::read_flo(std::span(bytes).first(bytes.size() - 4)), nw::FormatError);
  EXPECT_THROW(nw::read_flo(std::span(bytes).first(6)), nw::FormatError);
  auto zero_w = bytes;
  std::memset(zero_w.data() + 4, 0, 4);
  EXPECT_THROW(nw::read_flo(zero_w), nw::FormatError);
  auto neg_h = bytes;
  std::memset(neg_h.data() + 8, 0xff, 4);
  EXPECT_THROW(nw::read_flo(neg_h), nw::FormatError);
  bytes.push_back(0);
  EXPECT_THROW(nw::read_flo(bytes), nw::FormatError);
}

TEST(Container, GoldenRoundTrip) {
  const auto golden = nw::read_file(kData / "ramp_2x1x4x4.gwtf");
  ASSERT_EQ(golden.size(), nw::kContainerHeaderSize + 2 * 1 * 4 * 4 * 4);
  const auto seq = nw::read_noise_container(golden);
  EXPECT_EQ(seq.size(), 2u);
  EXPECT_EQ(seq.channels(), 1);
  EXPECT_EQ(seq.height(), 4);
  EXPECT_EQ(seq.seed(), 0x0123456789ABCDEFull);
  EXPECT_EQ(seq.frame(1).at(0, 3, 3), 31 * 0.125f - 2.0f);
  EXPECT_EQ(nw::write_noise_container(seq), golden);
}

TEST(Container, MultiChannelRoundTrip) {
  std::vector<nw::NoiseField> frames;
  for (std::uint64_t s = 0; s < 3; ++s) frames.push_back(nw::sample_white_noise(5, 7, 4, s));
  const nw::NoiseSequence seq(frames, 77);
  const auto bytes = nw::write_noise_container(seq);
  EXPECT_EQ(bytes.size(), 32u + 3 * 4 * 5 * 7 * 4);
  const auto back = nw::read_noise_container(bytes);
  EXPECT_EQ(back.frames(), seq.frames());
  EXPECT_EQ(back.seed(), 77u);
}

TEST(Container, MalformedInput) {
  const auto golden = nw::read_file(kData / "ramp_2x1x4x4.gwtf");
  try {
    nw::read_noise_container(std::span(golden).first(golden.size() - 8));
    FAIL() << "expected FormatError";
  } catch (const nw::FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("128"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("120"), std::string::npos) << e.what();
  }
  auto bad = golden;
  bad[0] = 'X';
  EXPECT_THROW(nw::read_noise_container(bad), nw::FormatError);
  bad = golden;
  bad[4] = 2;
  EXPECT_THROW(nw::read_noise_container(bad), nw::FormatError);
  EXPECT_THROW(nw::read_noise_container(std::span(golden).first(20)), nw::FormatError);
}

TEST(Visualize, ZeroFlowIsUniformWhite) {
  const auto img = nw::visualize_flow(nw::FlowField::zeros(6, 5));
  EXPECT_EQ(img.channels, 3);
  for (std::uint8_t v : img.pixels) EXPECT_EQ(v, 255);
}

TEST(Visualize, UniformFlowIsOneHue) {
  const auto img = nw::visualize_flow(nw::FlowField::uniform(6, 5, 2.0f, 0.0f));
  const auto first = img.pixel(0, 0);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 5; ++x) EXPECT_TRUE(std::equal(first.begin(), first.end(), img.pixel(y, x).begin()));
  EXPECT_FALSE(first[0] == first[1] && first[1] == first[2]);
  const auto left = nw::visualize_flow(nw::FlowField::uniform(2, 2, -2.0f, 0.0f));
  EXPECT_FALSE(std::equal(first.begin(), first.end(), left.pixel(0, 0).begin()));
}

TEST(Visualize, NoiseGrayLevels) {
  const nw::NoiseField n(1, 5, 1, {0.0f, -3.0f, 3.0f, -10.0f, 10.0f});
  const auto img = nw::visualize_noise(n);
  EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{128, 0, 255, 0, 255}));
}

TEST(Png, DecodesToSameImage) {
  const auto img = nw::visualize_flow(nw::FlowField::uniform(9, 11, 1.0f, -1.0f));
  const auto back = decode_png(nw::encode_png(img));
  EXPECT_EQ(back.width, 11);
  EXPECT_EQ(back.height, 9);
  EXPECT_EQ(back.pixels, img.pixels);
  const auto gray = nw::visualize_noise(nw::sample_white_noise(7, 13, 1, 1));
  EXPECT_EQ(decode_png(nw::encode_png(gray)).pixels, gray.pixels);
}
