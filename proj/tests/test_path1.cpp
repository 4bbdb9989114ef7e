#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sonopt/path1_shape.hpp"
#include "sonopt/spectral.hpp"

using namespace sonopt;

namespace {

GenerationFront front(std::vector<Point> pts) { return GenerationFront{0, std::move(pts)}; }

// Normalized convex front with n points: f2 = (1 - sqrt(f1))^p.
GenerationFront convex_front(std::size_t n, double p) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    pts.push_back({x, std::pow(1.0 - std::sqrt(x), p)});
  }
  return normalize({0, pts, "t"});
}

std::vector<double> render(Wavetable& t, std::size_t frames, double sr = 48000.0) {
  std::vector<double> out(frames);
  t.render(sr, out);
  return out;
}

}  // namespace

TEST(Chord, Endpoints) {
  const auto c = chord_of(front({{0, 1}, {0.5, 0.25}, {1, 0}}));
  EXPECT_EQ(c.p_start, (Point{0, 1}));
  EXPECT_EQ(c.p_end, (Point{1, 0}));
  EXPECT_FALSE(c.degenerate);
}

TEST(Chord, Degenerate) {
  EXPECT_TRUE(chord_of(front({{0, 0}})).degenerate);
  EXPECT_TRUE(chord_of(front({{0, 1}, {0, 1}})).degenerate);
  EXPECT_THROW(chord_of(front({})), Error);
}

TEST(ChordDistances, HandComputed) {
  const auto f = front({{0, 1}, {0.5, 0.25}, {1, 0}});
  const auto d = chord_distances(f, chord_of(f));
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_NEAR(d[1], 0.25 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(d[1], 0.176776695, 1e-9);
  EXPECT_EQ(d[2], 0.0);
}

TEST(ChordDistances, CollinearAndDegenerate) {
  const auto f = front({{0, 1}, {0.5, 0.5}, {1, 0}});
  EXPECT_EQ(chord_distances(f, chord_of(f)), (std::vector<double>{0, 0, 0}));
  const auto g = front({{0, 0}});
  EXPECT_EQ(chord_distances(g, chord_of(g)), (std::vector<double>{0}));
}

TEST(ChordDistances, EndpointsAreZero) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Point> pts(2 + trial % 80);
    for (auto& p : pts) p = {u(rng), u(rng)};
    const auto g = normalize({0, nondominated_filter(pts), "t"});
    const auto c = chord_of(g);
    if (c.degenerate) continue;
    const auto d = chord_distances(g, c);
    ASSERT_EQ(d.front(), 0.0);
    ASSERT_EQ(d.back(), 0.0);
  }
}

TEST(Wavetable, MirroredScaledWrite) {
  Wavetable t(202, 500.0);
  const std::vector<double> d{0, 0.0004, 0};
  t.write(d);
  EXPECT_EQ(t.readable_len(), 6u);
  const auto b = t.buffer();
  EXPECT_EQ(b[0], 0.0);
  EXPECT_NEAR(b[1], 0.2, 1e-15);
  EXPECT_EQ(b[2], 0.0);
  EXPECT_EQ(b[3], 0.0);
  EXPECT_NEAR(b[4], -0.2, 1e-15);
  EXPECT_EQ(b[5], 0.0);
}

TEST(Wavetable, Clamps) {
  Wavetable t(202, 500.0);
  t.write(std::vector<double>{0.01});
  EXPECT_EQ(t.readable_len(), 2u);
  EXPECT_EQ(t.buffer()[0], 1.0);
  EXPECT_EQ(t.buffer()[1], -1.0);
}

TEST(Wavetable, OverflowRejectedWithoutChange) {
  Wavetable t(10);
  t.write(std::vector<double>(5, 0.001));
  const std::vector<double> before(t.buffer().begin(), t.buffer().end());
  try {
    t.write(std::vector<double>(6, 0.001));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BufferOverflow);
  }
  EXPECT_EQ(t.readable_len(), 10u);
  EXPECT_TRUE(std::equal(before.begin(), before.end(), t.buffer().begin()));
}

TEST(Wavetable, ShrinkKeepsStaleTail) {
  Wavetable t(202, 1.0);
  t.write(std::vector<double>(100, 0.5));
  t.write(std::vector<double>(70, 0.25));
  EXPECT_EQ(t.readable_len(), 140u);
  for (std::size_t i = 140; i < 200; ++i) EXPECT_EQ(t.buffer()[i], -0.5) << i;
}

TEST(Wavetable, ReadableSumsToZero) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 0.01);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> d(1 + trial % 101);
    for (auto& x : d) x = u(rng);
    Wavetable t(202);
    t.write(d);
    const auto r = t.readable();
    const std::size_t n = r.size() / 2;
    // every sample cancels its mirror, so the paired sum is exactly zero
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += r[i] + r[n + i];
    ASSERT_EQ(sum, 0.0);
    double naive = 0.0;
    for (double s : r) naive += s;
    ASSERT_NEAR(naive, 0.0, 1e-12);
  }
}

TEST(Wavetable, SineCyclePeaksAtOscillatorFrequency) {
  Wavetable t(202, 1.0, 80.0);
  auto buf = t.mutable_buffer();
  t.write(std::vector<double>(100, 0.0));  // readable_len 200
  for (std::size_t i = 0; i < 200; ++i) buf[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 200.0);
  const auto out = render(t, 4096);
  RealFft fft(4096);
  const auto w = hann_window(4096);
  std::vector<double> frame(4096);
  for (std::size_t i = 0; i < 4096; ++i) frame[i] = out[i] * w[i];
  const auto bin = static_cast<double>(peak_bin(fft.magnitudes(frame)));
  EXPECT_NEAR(bin, 80.0 * 4096.0 / 48000.0, 1.0);
}

TEST(Wavetable, SilenceCases) {
  Wavetable empty(202);
  const double phase = empty.phase();
  for (double s : render(empty, 512)) ASSERT_EQ(s, 0.0);
  EXPECT_EQ(empty.phase(), phase);

  Wavetable zeros(202);
  zeros.write(std::vector<double>(50, 0.0));
  for (double s : render(zeros, 2048)) ASSERT_EQ(s, 0.0);
}

TEST(Wavetable, CollinearFrontIsSilent) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    // points on a line of negative slope, in raw coordinates
    const double a = 0.1 + 5.0 * u(rng), b = u(rng) * 3.0;
    std::vector<Point> pts(2 + trial % 99);
    for (auto& p : pts) {
      const double x = 10.0 * u(rng);
      p = {x, b - a * x};
    }
    Wavetable t(202);
    write_front(t, normalize({0, pts, "t"}));
    for (double s : render(t, 4096)) ASSERT_EQ(s, 0.0);
  }
}

TEST(Wavetable, PeriodIndependentOfPointCount) {
  for (std::size_t n : {3u, 17u, 50u, 101u}) {
    Wavetable t(202, 1.0, 80.0);
    write_front(t, convex_front(n, 2.0));
    const auto out = render(t, 48000);
    // 80 Hz at 48 kHz: period 600 frames
    for (std::size_t i = 0; i + 600 < out.size(); i += 97) ASSERT_NEAR(out[i], out[i + 600], 1e-9) << n;
  }
}

TEST(Wavetable, LoudnessScalesLinearly) {
  const auto f = convex_front(60, 2.0);
  const auto d = chord_distances(f, chord_of(f));
  for (double c : {1.0, 0.5, 0.125}) {
    std::vector<double> scaled(d);
    for (auto& x : scaled) x *= c;
    Wavetable full(202, 1.0), part(202, 1.0);
    full.write(d);
    part.write(scaled);
    const double r_full = rms(render(full, 48000));
    const double r_part = rms(render(part, 48000));
    EXPECT_NEAR(r_part, c * r_full, 1e-12 * r_full) << c;
  }
}

TEST(Wavetable, NoDcOverWholeCycles) {
  Wavetable t(202, 1.0, 80.0);
  write_front(t, convex_front(40, 3.0));
  const auto out = render(t, 48000);  // 80 whole cycles
  double mean = 0.0;
  for (double s : out) mean += s;
  mean /= static_cast<double>(out.size());
  EXPECT_LT(std::abs(mean), 1e-6);
}

TEST(Wavetable, StaleTailNeverRead) {
  Wavetable clean(202), poisoned(202);
  clean.write(std::vector<double>(90, 0.0003));
  poisoned.write(std::vector<double>(90, 0.0003));
  const std::vector<double> d70(70, 0.0001);
  clean.write(d70);
  poisoned.write(d70);
  auto buf = poisoned.mutable_buffer();
  for (std::size_t i = 140; i < buf.size(); ++i) buf[i] = 1.0;
  EXPECT_EQ(render(clean, 9600), render(poisoned, 9600));
}

TEST(Wavetable, PhaseSurvivesWrites) {
  Wavetable t(202, 1.0, 80.0);
  t.write(std::vector<double>(100, 0.1));
  render(t, 123);
  const double before = t.phase();
  t.write(std::vector<double>(100, 0.2));
  EXPECT_EQ(t.phase(), before);
  t.write(std::vector<double>(10, 0.2));
  EXPECT_LT(t.phase(), 20.0);
  EXPECT_EQ(t.phase(), std::fmod(before, 20.0));
}
