#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <unistd.h>

#include "../support/oracles.hpp"
#include "depthsamp/errors.hpp"
#include "depthsamp/imagedata.hpp"

namespace depthsamp {
namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("depthsamp_imagedata_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::vector<std::uint8_t> read_all(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }
  void write_all(const std::filesystem::path& p, const std::vector<std::uint8_t>& b) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  }

  std::filesystem::path dir_;
};

TEST(Ppm, SinglePixel) {
  auto b = bytes_of("P6\n1 1\n255\n");
  b.insert(b.end(), {255, 0, 0});
  const RgbImage img = parse_ppm(b);
  EXPECT_EQ(img.width(), 1);
  EXPECT_EQ(img.height(), 1);
  EXPECT_EQ(img.at(0, 0), (Rgb{255, 0, 0}));
}

TEST(Ppm, CommentAfterMagic) {
  auto b = bytes_of("P6\n# made by hand\n2 2\n255\n");
  for (int i = 0; i < 12; ++i) b.push_back(static_cast<std::uint8_t>(i * 10));
  const RgbImage img = parse_ppm(b);
  EXPECT_EQ(img.width(), 2);
  EXPECT_EQ(img.at(1, 1), (Rgb{90, 100, 110}));
}

TEST(Ppm, WrongMagicIsFormatError) {
  auto b = bytes_of("P5\n1 1\n255\n");
  b.push_back(0);
  EXPECT_THROW(parse_ppm(b), FormatError);
}

TEST(Ppm, TruncatedPayloadReportsOffset) {
  auto b = bytes_of("P6\n2 1\n255\n");
  b.insert(b.end(), {1, 2, 3, 4});
  try {
    parse_ppm(b);
    FAIL() << "expected TruncationError";
  } catch (const TruncationError& e) {
    EXPECT_EQ(e.offset(), b.size());
  }
}

TEST(Ppm, BadMaxval) {
  auto b = bytes_of("P6\n1 1\n15\n");
  b.insert(b.end(), {1, 2, 3});
  EXPECT_THROW(parse_ppm(b), FormatError);
}

TEST(Pgm16, SingleSample) {
  auto b = bytes_of("P5\n1 1\n65535\n");
  b.insert(b.end(), {0x13, 0x88});
  const DepthMap d = parse_pgm16(b);
  EXPECT_DOUBLE_EQ(d.depth(0, 0), 5000.0);
  EXPECT_TRUE(d.valid(0, 0));
}

TEST(Pgm16, ZeroMeansMissing) {
  auto b = bytes_of("P5\n2 1\n65535\n");
  b.insert(b.end(), {0, 0, 0x04, 0xB0});
  const DepthMap d = parse_pgm16(b);
  EXPECT_FALSE(d.valid(0, 0));
  EXPECT_TRUE(d.valid(1, 0));
  EXPECT_DOUBLE_EQ(d.depth(1, 0), 1200.0);
  EXPECT_EQ(d.valid_count(), 1u);
}

TEST(Pgm16, EightBitRejected) {
  auto b = bytes_of("P5\n1 1\n255\n");
  b.push_back(7);
  EXPECT_THROW(parse_pgm16(b), FormatError);
}

TEST_F(TempDir, Pgm16RoundTripIsByteIdentical) {
  auto b = bytes_of("P5\n3 2\n65535\n");
  const std::vector<std::uint16_t> v{0, 1, 500, 1200, 65535, 40000};
  for (std::uint16_t s : v) {
    b.push_back(static_cast<std::uint8_t>(s >> 8));
    b.push_back(static_cast<std::uint8_t>(s & 0xFF));
  }
  write_all(dir_ / "a.pgm", b);
  save_pgm16(load_pgm16(dir_ / "a.pgm"), dir_ / "b.pgm");
  EXPECT_EQ(read_all(dir_ / "b.pgm"), b);
}

TEST_F(TempDir, DepthSaturatesAtSixteenBits) {
  DepthMap d(2, 1);
  d.set(0, 0, 65535.0);
  d.set(1, 0, 1e6);
  save_pgm16(d, dir_ / "d.pgm");
  const auto b = read_all(dir_ / "d.pgm");
  const std::size_t header = std::string("P5\n2 1\n65535\n").size();
  ASSERT_EQ(b.size(), header + 4);
  for (std::size_t i = header; i < b.size(); ++i) EXPECT_EQ(b[i], 0xFF);
}

TEST_F(TempDir, PpmRoundTrip) {
  RgbImage img(3, 2);
  img.set(2, 1, {1, 2, 3});
  img.set(0, 0, {250, 128, 7});
  save_ppm(img, dir_ / "x.ppm");
  EXPECT_EQ(load_ppm(dir_ / "x.ppm"), img);
}

TEST_F(TempDir, EmptyMaskIsAllZero) {
  save_mask(SamplingMask(4, 3), dir_ / "m.pgm");
  const auto b = read_all(dir_ / "m.pgm");
  const std::size_t header = std::string("P5\n4 3\n255\n").size();
  ASSERT_EQ(b.size(), header + 12);
  for (std::size_t i = header; i < b.size(); ++i) EXPECT_EQ(b[i], 0);
}

TEST_F(TempDir, MaskRoundTrip) {
  SamplingMask m(5, 4);
  m.set(0, 0);
  m.set(4, 3);
  m.set(2, 1);
  save_mask(m, dir_ / "m.pgm");
  const SamplingMask back = load_mask(dir_ / "m.pgm");
  EXPECT_EQ(back, m);
  EXPECT_EQ(back.count(), 3u);
}

TEST_F(TempDir, SamplesCsv) {
  save_samples({{1.5, 2.25}}, dir_ / "s.csv");
  std::ifstream in(dir_ / "s.csv");
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  EXPECT_EQ(header, "x,y");
  EXPECT_EQ(line, "1.500000,2.250000");
  const SampleSet back = load_samples(dir_ / "s.csv");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], (Point2{1.5, 2.25}));
}

TEST_F(TempDir, MissingFileIsIoError) {
  EXPECT_THROW(load_ppm(dir_ / "nope.ppm"), IoError);
}

TEST(DepthMap, RejectsNegativeAndNonFinite) {
  DepthMap d(2, 2);
  EXPECT_THROW(d.set(0, 0, -1.0), ParameterError);
  EXPECT_THROW(d.set(0, 0, std::nan("")), ParameterError);
  EXPECT_FALSE(d.valid(0, 0));
}

TEST(DepthMap, InvalidateClearsDepth) {
  DepthMap d(2, 1);
  d.set(1, 0, 42.0);
  d.invalidate(1, 0);
  EXPECT_FALSE(d.valid(1, 0));
  EXPECT_EQ(d.depth(1, 0), 0.0);
}

TEST(Raster, ZeroDimensionRejected) {
  EXPECT_THROW(RgbImage(0, 3), ParameterError);
  EXPECT_THROW(DepthMap(3, 0), ParameterError);
}

TEST(SamplingMask, CountTracksBits) {
  SamplingMask m(3, 3);
  m.set(4);
  m.set(4);
  m.set(0);
  EXPECT_EQ(m.count(), 2u);
  m.reset(4);
  EXPECT_EQ(m.count(), 1u);
  EXPECT_EQ(mask_to_locations(m), (SampleSet{{0.0, 0.0}}));
}

TEST(RoundHalfDown, TiesGoDown) {
  EXPECT_EQ(round_half_down(1.5), 1);
  EXPECT_EQ(round_half_down(1.51), 2);
  EXPECT_EQ(round_half_down(-0.5), -1);
  EXPECT_EQ(round_half_down(2.49), 2);
}

TEST(Lab, Black) {
  const Lab c = srgb_to_lab({0, 0, 0});
  EXPECT_NEAR(c.L, 0.0, 1e-9);
  EXPECT_NEAR(c.a, 0.0, 1e-9);
  EXPECT_NEAR(c.b, 0.0, 1e-9);
}

TEST(Lab, White) {
  const Lab c = srgb_to_lab({255, 255, 255});
  EXPECT_NEAR(c.L, 100.0, 1e-6);
  EXPECT_LT(std::abs(c.a), 0.01);
  EXPECT_LT(std::abs(c.b), 0.01);
}

TEST(Lab, RedMatchesScalarFormula) {
  const Lab want = oracle::lab_from_srgb(255, 0, 0);
  const Lab got = srgb_to_lab({255, 0, 0});
  EXPECT_NEAR(got.L, want.L, 0.05);
  EXPECT_NEAR(got.a, want.a, 0.05);
  EXPECT_NEAR(got.b, want.b, 0.05);
  EXPECT_NEAR(got.L, 53.24, 0.05);
  EXPECT_NEAR(got.a, 80.09, 0.05);
  EXPECT_NEAR(got.b, 67.20, 0.05);
}

TEST(Lab, RandomColorsMatchScalarFormula) {
  Rng rng(9);
  for (int i = 0; i < 500; ++i) {
    const Rgb c{static_cast<std::uint8_t>(uniform_index(rng, 256)),
                static_cast<std::uint8_t>(uniform_index(rng, 256)),
                static_cast<std::uint8_t>(uniform_index(rng, 256))};
    const Lab want = oracle::lab_from_srgb(c.r, c.g, c.b);
    const Lab got = srgb_to_lab(c);
    EXPECT_NEAR(got.L, want.L, 0.05);
    EXPECT_NEAR(got.a, want.a, 0.05);
    EXPECT_NEAR(got.b, want.b, 0.05);
  }
}

TEST(Lab, ImageConversionMatchesPixelwise) {
  RgbImage img(2, 1);
  img.set(0, 0, {10, 200, 30});
  img.set(1, 0, {0, 0, 255});
  const LabImage lab = rgb_to_lab(img);
  EXPECT_DOUBLE_EQ(lab.at(1, 0).b, srgb_to_lab({0, 0, 255}).b);
  EXPECT_DOUBLE_EQ(lab.at(0, 0).L, srgb_to_lab({10, 200, 30}).L);
}

}  // namespace
}  // namespace depthsamp
