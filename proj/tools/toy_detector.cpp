// Reference detector for the NDJSON scoring protocol.
//
// Score = E / (E + 1000), where E is the mean squared 4-neighbour Laplacian of
// the image's luma over interior pixels. Fine texture scores high, smooth
// content scores low, so smoothing operators push scores down.

#include <cstdio>
#include <iostream>
#include <string>

#include <json.hpp>

#include "rdeg/codec.hpp"
#include "rdeg/image.hpp"

namespace {

double high_frequency_energy(const rdeg::Image& img) {
  const int w = img.width();
  const int h = img.height();
  if (w < 3 || h < 3) return 0.0;
  auto luma = [&](int x, int y) {
    return 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
  };
  double sum = 0.0;
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      const double lap = 4 * luma(x, y) - luma(x - 1, y) - luma(x + 1, y) - luma(x, y - 1) -
                         luma(x, y + 1);
      sum += lap * lap;
    }
  }
  return sum / (static_cast<double>(w - 2) * (h - 2));
}

}  // namespace

int main() {
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    try {
      const auto req = nlohmann::json::parse(line);
      const auto id = req.at("id").get<std::string>();
      const double e = high_frequency_energy(rdeg::load_image(req.at("path").get<std::string>()));
      std::cout << nlohmann::json{{"id", id}, {"score", e / (e + 1000.0)}}.dump() << std::endl;
    } catch (const std::exception& ex) {
      std::fprintf(stderr, "toy_detector: %s\n", ex.what());
      return 1;
    }
  }
  return 0;
}
