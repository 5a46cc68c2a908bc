#include "camcond/preview_service.hpp"

#include <httplib.h>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <string>

#include "camcond/error.hpp"

namespace camcond::preview {

std::string_view to_string(FrameMode mode) noexcept {
  switch (mode) {
    case FrameMode::Pose: return "pose";
    case FrameMode::Depth: return "depth";
    case FrameMode::Composite: return "composite";
  }
  return "unknown";
}

FrameMode frame_mode_from_string(std::string_view s) {
  if (s == "pose") return FrameMode::Pose;
  if (s == "depth") return FrameMode::Depth;
  if (s == "composite") return FrameMode::Composite;
  throw Error(ErrorCode::InvalidArgument, "mode must be pose, depth or composite");
}

struct Session::Snapshot {
  trajectory::TrajectorySpec spec;
  std::uint64_t revision = 0;
  int frames = 0;
  int width = 0;
  int height = 0;

  std::once_flag rendered_flag;
  raster::RenderedSequence rendered;

  std::mutex cache_mutex;
  std::map<std::tuple<int, FrameMode, double>, Frame> cache;
};

Session::Session(pipeline::Scene scene, trajectory::TrajectorySpec initial, int threads)
    : scene_(std::move(scene)), threads_(threads) {
  auto snap = std::make_shared<Snapshot>();
  const auto cameras = trajectory::expand(initial);
  if (static_cast<int>(cameras.size()) != scene_.motion.num_frames()) {
    throw Error(ErrorCode::LengthMismatch, "trajectory and motion frame counts differ");
  }
  snap->spec = std::move(initial);
  snap->frames = static_cast<int>(cameras.size());
  snap->width = cameras.front().width;
  snap->height = cameras.front().height;
  snapshot_ = std::move(snap);
}

std::shared_ptr<Session::Snapshot> Session::current() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

SessionState Session::state() const {
  const auto snap = current();
  return {snap->spec, snap->revision, snap->frames, snap->width, snap->height};
}

io::Json Session::state_json() const {
  const SessionState s = state();
  const auto& p = scene_.parameters;
  return io::Json{{"version", io::kSchemaVersion},
                  {"revision", s.revision},
                  {"frames", s.frames},
                  {"width", s.width},
                  {"height", s.height},
                  {"trajectory", io::trajectory_to_json(s.spec)},
                  {"parameters",
                   {{"decay_length", p.decay_length},
                    {"discontinuity_ratio", p.discontinuity_ratio},
                    {"depth_fraction", p.depth_fraction},
                    {"num_steps", p.num_steps},
                    {"fill_holes", p.fill_holes},
                    {"depth_polarity", p.polarity == raster::DepthPolarity::NearBright ? "near_bright" : "far_bright"}}}};
}

std::uint64_t Session::put_trajectory(const trajectory::TrajectorySpec& spec) {
  std::vector<geom::CameraFrame> cameras;
  try {
    cameras = trajectory::expand(spec);
  } catch (const Error& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("trajectory rejected: ") + e.detail());
  }
  if (static_cast<int>(cameras.size()) != scene_.motion.num_frames()) {
    throw Error(ErrorCode::SchemaViolation, "trajectory has " + std::to_string(cameras.size()) +
                                                " frames but the motion has " +
                                                std::to_string(scene_.motion.num_frames()));
  }
  auto snap = std::make_shared<Snapshot>();
  snap->spec = spec;
  snap->frames = static_cast<int>(cameras.size());
  snap->width = cameras.front().width;
  snap->height = cameras.front().height;

  std::lock_guard writer(writer_mutex_);
  snap->revision = current()->revision + 1;
  {
    std::lock_guard lock(snapshot_mutex_);
    snapshot_ = snap;
  }
  spdlog::info("trajectory revision {}", snap->revision);
  return snap->revision;
}

void Session::ensure_rendered(Snapshot& snap) const {
  std::call_once(snap.rendered_flag, [&] { snap.rendered = pipeline::render(scene_, snap.spec, threads_); });
}

Image downscale(const Image& image, double scale) {
  if (!(scale > 0.0 && scale <= 1.0)) throw Error(ErrorCode::InvalidArgument, "scale must lie in (0, 1]");
  if (scale == 1.0) return image;
  const int w = std::max(1, static_cast<int>(std::lround(image.width * scale)));
  const int h = std::max(1, static_cast<int>(std::lround(image.height * scale)));
  Image out(w, h, image.channels);
  for (int y = 0; y < h; ++y) {
    const int sy = static_cast<int>(static_cast<long long>(y) * image.height / h);
    for (int x = 0; x < w; ++x) {
      const int sx = static_cast<int>(static_cast<long long>(x) * image.width / w);
      std::copy_n(image.at(sx, sy), image.channels, out.at(x, y));
    }
  }
  return out;
}

Frame Session::frame(int index, FrameMode mode, double scale) {
  if (!(scale > 0.0 && scale <= 1.0)) throw Error(ErrorCode::InvalidArgument, "scale must lie in (0, 1]");
  const auto snap = current();
  if (index < 0 || index >= snap->frames) {
    throw Error(ErrorCode::IndexOutOfRange,
                "frame " + std::to_string(index) + " outside [0, " + std::to_string(snap->frames) + ")");
  }
  const auto key = std::make_tuple(index, mode, scale);
  {
    std::lock_guard lock(snap->cache_mutex);
    if (const auto it = snap->cache.find(key); it != snap->cache.end()) return it->second;
  }
  ensure_rendered(*snap);
  const auto idx = static_cast<std::size_t>(index);
  const Image& full = mode == FrameMode::Pose    ? snap->rendered.pose[idx]
                      : mode == FrameMode::Depth ? snap->rendered.depth[idx]
                                                 : snap->rendered.pose_depth[idx];
  auto bytes = std::make_shared<const std::vector<std::uint8_t>>(io::encode_png(downscale(full, scale)));
  Frame f{bytes, snap->revision, io::sha256_hex(*bytes)};
  std::lock_guard lock(snap->cache_mutex);
  return snap->cache.emplace(key, std::move(f)).first->second;
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

std::string content_digest(const std::vector<std::uint8_t>& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::string b64(4 * ((len + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(b64.data()), digest, static_cast<int>(len));
  b64.resize(static_cast<std::size_t>(n));
  return "sha-256=:" + b64 + ":";
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::IndexOutOfRange: return 404;
    case ErrorCode::SchemaViolation:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidSpec: return 400;
    default: return 500;
  }
}

void send_error(httplib::Response& res, int status, ErrorCode code, const std::string& message) {
  res.status = status;
  res.set_content(io::dump_json({{"error", std::string(to_string(code))}, {"message", message}}),
                  "application/json");
}

bool etag_matches(const std::string& header, const std::string& etag) {
  std::size_t pos = 0;
  while (pos <= header.size()) {
    const std::size_t comma = std::min(header.find(',', pos), header.size());
    std::string tok = header.substr(pos, comma - pos);
    const auto b = tok.find_first_not_of(" \t");
    const auto e = tok.find_last_not_of(" \t");
    tok = b == std::string::npos ? std::string() : tok.substr(b, e - b + 1);
    if (tok.starts_with("W/")) tok = tok.substr(2);
    if (tok == "*" || tok == etag) return true;
    pos = comma + 1;
  }
  return false;
}

}  // namespace

Server::Server(Session& session) : session_(session), http_(std::make_unique<httplib::Server>()) {
  http_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  http_->Get("/state", [this](const httplib::Request&, httplib::Response& res) {
    const io::Json state = session_.state_json();
    res.set_header("X-Revision", std::to_string(state["revision"].get<std::uint64_t>()));
    res.set_content(io::dump_json(state), "application/json");
  });

  http_->Put("/trajectory", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto spec = io::trajectory_from_json(io::parse_json(req.body, "request body"));
      const auto revision = session_.put_trajectory(spec);
      res.set_header("X-Revision", std::to_string(revision));
      res.set_content(io::dump_json({{"revision", revision}}), "application/json");
    } catch (const Error& e) {
      res.set_header("X-Revision", std::to_string(session_.state().revision));
      send_error(res, e.code() == ErrorCode::IoFailure ? 500 : 422, e.code(), e.detail());
    }
  });

  http_->Get(R"(/frame/(-?\d+))", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      int index = 0;
      try {
        index = std::stoi(req.matches[1].str());
      } catch (const std::exception&) {
        throw Error(ErrorCode::IndexOutOfRange, "frame index out of range");
      }
      const FrameMode mode =
          req.has_param("mode") ? frame_mode_from_string(req.get_param_value("mode")) : FrameMode::Composite;
      double scale = 1.0;
      if (req.has_param("scale")) {
        try {
          std::size_t used = 0;
          const std::string s = req.get_param_value("scale");
          scale = std::stod(s, &used);
          if (used != s.size()) throw std::invalid_argument(s);
        } catch (const std::exception&) {
          throw Error(ErrorCode::InvalidArgument, "scale must be a number in (0, 1]");
        }
      }
      const Frame f = session_.frame(index, mode, scale);
      const std::string etag = "\"" + f.sha256 + "\"";
      res.set_header("X-Revision", std::to_string(f.revision));
      res.set_header("ETag", etag);
      res.set_header("Content-Digest", content_digest(*f.png));
      res.set_header("Cache-Control", "no-cache");
      if (req.has_header("If-None-Match") && etag_matches(req.get_header_value("If-None-Match"), etag)) {
        res.status = 304;
        return;
      }
      res.set_content(reinterpret_cast<const char*>(f.png->data()), f.png->size(), "image/png");
    } catch (const Error& e) {
      send_error(res, http_status(e.code()), e.code(), e.detail());
    }
  });

  http_->set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send_error(res, 500, ErrorCode::IoFailure, e.what());
    }
  });
}

Server::~Server() { stop(); }

void Server::start(const std::string& host, int port) {
  if (port < 0 || port > 65535) throw Error(ErrorCode::PortInUse, "invalid port " + std::to_string(port));
  if (port == 0) {
    port_ = http_->bind_to_any_port(host);
    if (port_ <= 0) throw Error(ErrorCode::PortInUse, "cannot bind " + host);
  } else {
    if (!http_->bind_to_port(host, port)) {
      throw Error(ErrorCode::PortInUse, "cannot bind " + host + ":" + std::to_string(port));
    }
    port_ = port;
  }
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  spdlog::info("preview service listening on {}:{}", host, port_);
}

void Server::stop() {
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace camcond::preview
