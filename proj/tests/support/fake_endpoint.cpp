// Scriptable protocol peer used by the endpoint and harness tests.
//
//   fake_endpoint constant <v>         score v for every request
//   fake_endpoint die-after <k>        answer k requests, then exit
//   fake_endpoint score <v> <id>       score 0.5, except v for <id>
//   fake_endpoint hang-on <id>         score 0.5, never answer <id>
//   fake_endpoint pairs                answer requests two at a time, reversed
//   fake_endpoint copy <dir>           transform: copy input to <dir>/<id>.<ext>
//   fake_endpoint median <dir> <k>     transform: median blur to <dir>/<id>.png
//   fake_endpoint missing-output       transform: name a file that does not exist

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rdeg/codec.hpp"
#include "rdeg/corrupt.hpp"
#include "rdeg/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reply(const std::string& id, const json& extra) {
  json j = {{"id", id}};
  j.update(extra);
  std::cout << j.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) return 64;
  const std::string mode = argv[1];
  std::string line;
  int answered = 0;
  std::vector<json> pending;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    const json req = json::parse(line);
    const std::string id = req.at("id");
    const fs::path path = req.at("path").get<std::string>();
    if (mode == "constant") {
      reply(id, {{"score", std::stod(argv[2])}});
    } else if (mode == "die-after") {
      if (answered == std::atoi(argv[2])) return 0;
      reply(id, {{"score", 0.5}});
    } else if (mode == "score") {
      reply(id, {{"score", id == argv[3] ? std::stod(argv[2]) : 0.5}});
    } else if (mode == "hang-on") {
      if (id == argv[2]) {
        std::this_thread::sleep_for(std::chrono::seconds(30));
        return 0;
      }
      reply(id, {{"score", 0.5}});
    } else if (mode == "pairs") {
      pending.push_back(req);
      if (pending.size() == 2) {
        reply(pending[1].at("id"), {{"score", 0.25}});
        reply(pending[0].at("id"), {{"score", 0.75}});
        pending.clear();
      }
    } else if (mode == "copy") {
      const fs::path out = fs::path(argv[2]) / (rdeg::safe_name(id) + path.extension().string());
      fs::copy_file(path, out, fs::copy_options::overwrite_existing);
      reply(id, {{"path", fs::absolute(out).string()}});
    } else if (mode == "median") {
      const fs::path out = fs::path(argv[2]) / (rdeg::safe_name(id) + ".png");
      const auto img = rdeg::blur(rdeg::load_image(path), rdeg::BlurFilter::median, std::atoi(argv[3]));
      rdeg::save_image(img, out, rdeg::ImageFormat::png);
      reply(id, {{"path", fs::absolute(out).string()}});
    } else if (mode == "missing-output") {
      reply(id, {{"path", "/nonexistent/rdeg/" + id + ".png"}});
    } else {
      return 64;
    }
    ++answered;
  }
  for (auto it = pending.rbegin(); it != pending.rend(); ++it) reply(it->at("id"), {{"score", 0.5}});
  return 0;
}
