// Writes the synthetic separable corpus used by the examples and tests.

#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic real/fake image corpus with a manifest"};
  std::string out;
  int count = 20;
  int size = 64;
  std::uint64_t seed = 1;
  app.add_option("out", out, "Output directory")->required();
  app.add_option("-n,--count", count, "Number of images")->check(CLI::PositiveNumber);
  app.add_option("--size", size, "Image side length")->check(CLI::Range(16, 4096));
  app.add_option("--seed", seed, "Seed");
  CLI11_PARSE(app, argc, argv);
  try {
    const auto manifest = rdeg::synth::write_separable_corpus(out, count, size, seed);
    std::printf("%s\n", manifest.string().c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "make_corpus: %s\n", e.what());
    return 1;
  }
  return 0;
}
