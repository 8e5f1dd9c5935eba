#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <sys/types.h>
#include <utility>
#include <vector>

// Out-of-process detectors and image transforms.
//
// Wire protocol: newline-delimited JSON over the child's stdin/stdout.
//   request             {"id":"<item>","path":"<absolute path>"}
//   detector response   {"id":"<item>","score":<number in [0,1]>}
//   transform response  {"id":"<item>","path":"<absolute output path>"}
// One response per request, in any order. The child exits when its stdin
// closes. Anything the child writes to stderr passes through untouched.
namespace rdeg {

struct DetectorEndpoint {
  std::vector<std::string> command;  ///< argv; command[0] is looked up in PATH
  double timeout_s = 60.0;           ///< per-response wait
  std::size_t batch_size = 16;       ///< requests in flight per round trip
  std::string name;                  ///< report label; defaults to command[0]'s stem

  std::string display_name() const;
};

/// Throws ParameterError if the command is empty, timeout <= 0 or batch 0.
void validate(const DetectorEndpoint& endpoint);

/// A child process whose stdin/stdout are pipes owned by this object.
class ChildProcess {
 public:
  /// Throws DetectorError if the program cannot be launched.
  explicit ChildProcess(const std::vector<std::string>& argv);
  ~ChildProcess();

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  /// Appends '\n'. Returns false once the child's stdin is gone.
  bool write_line(const std::string& line);

  enum class ReadStatus { line, eof, timeout };
  ReadStatus read_line(std::string& line, std::chrono::milliseconds timeout);

  /// Closes stdin and waits briefly for a clean exit, then kills.
  void close();
  void kill();

 private:
  pid_t pid_ = -1;
  int in_fd_ = -1;   // child's stdin (we write)
  int out_fd_ = -1;  // child's stdout (we read)
  std::string buffer_;
};

struct ScoreResult {
  std::vector<std::pair<std::string, double>> scores;  ///< input order
  std::vector<std::string> failed;                     ///< timed-out ids
};

struct TransformResult {
  std::vector<std::pair<std::string, std::filesystem::path>> outputs;  ///< input order
  std::vector<std::string> failed;
};

using ImageRequest = std::pair<std::string, std::filesystem::path>;  // (id, path)

/// Scores every image with a freshly launched detector process.
/// Items whose response does not arrive within the timeout are reported in
/// `failed` (the process is restarted for the rest). Throws DetectorError when
/// the process exits early or cannot start, and ProtocolError for malformed
/// responses, unknown ids, or scores outside [0,1].
ScoreResult score_images(const DetectorEndpoint& endpoint,
                         const std::vector<ImageRequest>& images);

/// Same protocol shape as score_images; each response names an output file,
/// which must exist (ProtocolError otherwise).
TransformResult transform_images(const DetectorEndpoint& endpoint,
                                 const std::vector<ImageRequest>& images);

}  // namespace rdeg
