#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "camcond/io_formats.hpp"
#include "camcond/pipeline.hpp"
#include "camcond/trajectory.hpp"

namespace httplib {
class Server;
}

namespace camcond::preview {

enum class FrameMode { Pose, Depth, Composite };

std::string_view to_string(FrameMode mode) noexcept;
/// Throws InvalidArgument for anything but pose, depth or composite.
FrameMode frame_mode_from_string(std::string_view s);

struct Frame {
  std::shared_ptr<const std::vector<std::uint8_t>> png;
  std::uint64_t revision = 0;
  std::string sha256;  // hex digest of the PNG bytes
};

struct SessionState {
  trajectory::TrajectorySpec spec;
  std::uint64_t revision = 0;
  int frames = 0;
  int width = 0;
  int height = 0;
};

/// Trajectory state over immutable scene assets. Each accepted update
/// installs a fresh snapshot; readers hold whichever snapshot was current
/// when they arrived, so no response mixes two revisions.
class Session {
 public:
  Session(pipeline::Scene scene, trajectory::TrajectorySpec initial, int threads = 1);

  [[nodiscard]] SessionState state() const;
  [[nodiscard]] io::Json state_json() const;

  /// Throws SchemaViolation, leaving state and revision unchanged, when the
  /// spec is invalid or its frame count differs from the motion's.
  std::uint64_t put_trajectory(const trajectory::TrajectorySpec& spec);

  /// `scale` in (0, 1] selects nearest-neighbor reduced output. Throws
  /// IndexOutOfRange or InvalidArgument.
  Frame frame(int index, FrameMode mode, double scale = 1.0);

  [[nodiscard]] const pipeline::Scene& scene() const { return scene_; }

 private:
  struct Snapshot;

  [[nodiscard]] std::shared_ptr<Snapshot> current() const;
  void ensure_rendered(Snapshot& snap) const;

  pipeline::Scene scene_;
  int threads_;
  mutable std::mutex snapshot_mutex_;
  std::mutex writer_mutex_;
  std::shared_ptr<Snapshot> snapshot_;
};

/// Nearest-neighbor reduction to w = max(1, round(W * scale)) by
/// h = max(1, round(H * scale)); output (x, y) takes source
/// (floor(x * W / w), floor(y * H / h)).
Image downscale(const Image& image, double scale);

/// HTTP front end: GET /state, PUT /trajectory, GET /frame/{index}?mode=&scale=.
class Server {
 public:
  explicit Server(Session& session);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts serving on a background thread; port 0 picks a free
  /// port. Throws PortInUse when the address cannot be bound.
  void start(const std::string& host, int port);
  void stop();
  [[nodiscard]] int port() const { return port_; }

 private:
  Session& session_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace camcond::preview
