#pragma once

// Procedural test imagery shared by the tools and the test suites.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "rdeg/codec.hpp"
#include "rdeg/image.hpp"
#include "rdeg/manifest.hpp"
#include "rdeg/rng.hpp"

namespace rdeg::synth {

/// Photo-like content: smooth illumination, hard-edged shapes and a
/// 1/f-weighted texture, so every frequency band carries energy.
inline Image natural_image(int width, int height, std::uint64_t seed) {
  RngStream rng = derive_rng(seed, "natural", "image");
  std::vector<double> field(static_cast<std::size_t>(width) * height * 3, 0.0);
  auto at = [&](int x, int y, int c) -> double& {
    return field[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  };
  double base[3];
  for (double& b : base) b = rng.uniform(70, 170);
  const double gx = rng.uniform(-0.6, 0.6);
  const double gy = rng.uniform(-0.6, 0.6);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < 3; ++c) at(x, y, c) = base[c] + gx * x + gy * y;

  for (int d = 0; d < 6; ++d) {
    const double cx = rng.uniform(0, width), cy = rng.uniform(0, height);
    const double r = rng.uniform(4, std::max(6.0, width / 4.0));
    double shift[3];
    for (double& s : shift) s = rng.uniform(-60, 60);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) < r * r)
          for (int c = 0; c < 3; ++c) at(x, y, c) += shift[c];
  }
  for (int band = 1; band <= 24; ++band) {
    const double freq = 0.02 * band * band;
    const double amp = 40.0 / band;
    const double theta = rng.uniform(0, std::numbers::pi);
    const double phase = rng.uniform(0, 2 * std::numbers::pi);
    const double fx = std::cos(theta) * freq, fy = std::sin(theta) * freq;
    const int channel_bias = static_cast<int>(rng.uniform_int(0, 2));
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const double v = amp * std::sin(fx * x + fy * y + phase);
        for (int c = 0; c < 3; ++c) at(x, y, c) += (c == channel_bias ? 1.0 : 0.6) * v;
      }
  }
  // Sensor-like grain, shared by the three channels.
  for (std::size_t i = 0; i < field.size(); i += 3) {
    const double n = rng.normal() * 4.0;
    for (int c = 0; c < 3; ++c) field[i + c] += n;
  }

  Image img(width, height);
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = saturate_u8(field[i]);
  return img;
}

/// "Real" class of the separable toy corpus: smooth shading plus a couple of
/// soft-contrast rectangles. Little pixel-scale energy.
inline Image real_sample(int size, RngStream& rng) {
  Image img(size, size);
  const double base = rng.uniform(90, 160);
  const double gx = rng.uniform(-0.8, 0.8), gy = rng.uniform(-0.8, 0.8);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      for (int c = 0; c < 3; ++c)
        img.at(x, y, c) = saturate_u8(base + gx * (x - size / 2) + gy * (y - size / 2) + 6 * c);
  const int boxes = static_cast<int>(rng.uniform_int(1, 2));
  for (int b = 0; b < boxes; ++b) {
    const int x0 = static_cast<int>(rng.uniform_int(2, size / 2));
    const int y0 = static_cast<int>(rng.uniform_int(2, size / 2));
    const int w = static_cast<int>(rng.uniform_int(size / 6, size / 3));
    const int h = static_cast<int>(rng.uniform_int(size / 6, size / 3));
    const double step = rng.uniform(20, 40) * (rng.bernoulli(0.5) ? 1 : -1);
    for (int y = y0; y < std::min(size, y0 + h); ++y)
      for (int x = x0; x < std::min(size, x0 + w); ++x)
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = saturate_u8(img.at(x, y, c) + step);
  }
  return img;
}

/// "Fake" class: the same kind of smooth shading with fine, pixel-scale
/// texture on top (the high-frequency signature the toy detector keys on).
inline Image fake_sample(int size, RngStream& rng) {
  Image img(size, size);
  const double base = rng.uniform(90, 160);
  const double gx = rng.uniform(-0.8, 0.8), gy = rng.uniform(-0.8, 0.8);
  const double amp = rng.uniform(5, 10);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double t = amp * rng.normal();
      for (int c = 0; c < 3; ++c)
        img.at(x, y, c) =
            saturate_u8(base + gx * (x - size / 2) + gy * (y - size / 2) + 6 * c + t);
    }
  return img;
}

/// Writes `count` images (alternating real/fake) plus manifest.csv into
/// `dir` and returns the manifest path.
inline std::filesystem::path write_separable_corpus(const std::filesystem::path& dir,
                                                    int count, int size, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  std::vector<ManifestEntry> entries;
  for (int i = 0; i < count; ++i) {
    const bool fake = i % 2 == 1;
    const std::string id = (fake ? "fake_" : "real_") + std::to_string(i);
    RngStream rng = derive_rng(seed, id, "synthetic");
    const Image img = fake ? fake_sample(size, rng) : real_sample(size, rng);
    save_image(img, dir / (id + ".png"), ImageFormat::png);
    entries.push_back({id + ".png", fake ? Label::fake : Label::real, id});
  }
  const auto manifest = dir / "manifest.csv";
  save_manifest(entries, manifest);
  return manifest;
}

}  // namespace rdeg::synth
