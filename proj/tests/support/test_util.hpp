#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rdeg/image.hpp"
#include "rdeg/rng.hpp"

namespace rdeg::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "rdeg") {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct CommandResult {
  int status = -1;
  std::string out;
  std::string err;
};

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Runs argv through /bin/sh and captures exit status, stdout and stderr.
inline CommandResult run(const std::vector<std::string>& argv) {
  TempDir io("rdeg-cmd");
  std::string cmd;
  for (const auto& a : argv) cmd += shell_quote(a) + " ";
  cmd += "> " + shell_quote((io / "out").string()) + " 2> " + shell_quote((io / "err").string());
  const int raw = std::system(cmd.c_str());
  CommandResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(io / "out");
  r.err = slurp(io / "err");
  return r;
}

inline Image random_image(int w, int h, std::uint64_t seed) {
  RngStream rng = derive_rng(seed, "random-image", std::to_string(w) + "x" + std::to_string(h));
  Image img(w, h);
  for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return img;
}

/// Sample mean and (population) standard deviation of out - in.
struct DiffStats {
  double mean = 0.0;
  double stddev = 0.0;
};

inline DiffStats diff_stats(const Image& in, const Image& out) {
  const auto a = in.pixels();
  const auto b = out.pixels();
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(b[i]) - a[i];
    sum += d;
    sq += d * d;
  }
  const double n = static_cast<double>(a.size());
  const double mean = sum / n;
  return {mean, std::sqrt(sq / n - mean * mean)};
}

}  // namespace rdeg::testing
