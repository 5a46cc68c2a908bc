#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <initializer_list>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "camcond/cli.hpp"
#include "camcond/geom.hpp"
#include "camcond/io_formats.hpp"
#include "camcond/trajectory.hpp"
#include "support/fixtures.hpp"

using namespace camcond;
namespace fs = std::filesystem;

namespace {

/// Runs the tool in-process with stdout captured.
struct Run {
  int code = -1;
  std::string out;
};

Run run(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"camcond"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  std::ostringstream captured;
  auto* old = std::cout.rdbuf(captured.rdbuf());
  Run r;
  try {
    r.code = cli::run(static_cast<int>(argv.size()), argv.data());
  } catch (...) {
    std::cout.rdbuf(old);
    throw;
  }
  std::cout.rdbuf(old);
  r.out = captured.str();
  return r;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("no arguments is a usage error") {
    CHECK(run({}).code == cli::kUsage);
    CHECK(run({"frobnicate"}).code == cli::kUsage);
  }

  TEST_CASE("compile from a bundle") {
    const auto dir = fixtures::temp_dir("cli_compile");
    const auto bundle = fixtures::write_scene(fixtures::golden_scene(), dir);
    const auto r = run({"compile", "--bundle", bundle.string(), "--threads", "2"});
    REQUIRE(r.code == cli::kOk);
    CHECK(fs::is_regular_file(dir / "out" / "manifest.json"));
    const auto manifest = io::read_manifest(dir / "out" / "manifest.json");
    CHECK(manifest.depth_steps == 2);
    fs::remove_all(dir);
  }

  TEST_CASE("missing input file is an input error") {
    const auto dir = fixtures::temp_dir("cli_missing");
    const auto bundle = fixtures::write_scene(fixtures::golden_scene(), dir);
    fs::remove(dir / "mask.png");
    CHECK(run({"compile", "--bundle", bundle.string()}).code == cli::kInputError);
    CHECK_FALSE(fs::exists(dir / "out" / "manifest.json"));
    fs::remove_all(dir);
  }

  TEST_CASE("missing paths without a bundle is a usage error") {
    CHECK(run({"compile", "--mask", "m.png"}).code == cli::kUsage);
    CHECK(run({"compile", "--bundle", "b.json", "--depth-polarity", "sideways"}).code == cli::kUsage);
  }

  TEST_CASE("eval mpjpe") {
    const auto dir = fixtures::temp_dir("cli_mpjpe");
    auto a = fixtures::walking_motion(5);
    auto b = a;
    for (auto& f : b.frames) {
      for (auto& p : f) p += geom::Vec3(0.3, 0.0, 0.4);
    }
    io::write_motion(a, dir / "a.json");
    io::write_motion(b, dir / "b.json");

    REQUIRE(run({"eval", "mpjpe", (dir / "a.json").string(), (dir / "a.json").string(), "--report",
                 (dir / "same.json").string()})
                .code == cli::kOk);
    CHECK(io::read_json(dir / "same.json")["value"].get<double>() == 0.0);

    const auto r = run({"eval", "mpjpe", (dir / "a.json").string(), (dir / "b.json").string()});
    REQUIRE(r.code == cli::kOk);
    CHECK(io::parse_json(r.out, "stdout")["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));

    const auto aligned = run({"eval", "mpjpe", (dir / "a.json").string(), (dir / "b.json").string(), "--align-root"});
    REQUIRE(aligned.code == cli::kOk);
    CHECK(io::parse_json(aligned.out, "stdout")["value"].get<double>() < 1e-12);

    auto short_b = b;
    short_b.frames.pop_back();
    io::write_motion(short_b, dir / "short.json");
    CHECK(run({"eval", "mpjpe", (dir / "a.json").string(), (dir / "short.json").string()}).code ==
          cli::kInputError);
    CHECK(run({"eval", "mpjpe", (dir / "a.json").string(), (dir / "nope.json").string()}).code ==
          cli::kInputError);
    fs::remove_all(dir);
  }

  TEST_CASE("eval sampson on exact correspondences") {
    const auto dir = fixtures::temp_dir("cli_sampson");
    const auto scene = fixtures::golden_scene();
    io::write_trajectory(scene.trajectory, dir / "trajectory.json");
    const auto cams = trajectory::expand(scene.trajectory);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uv(4.0, 60.0);
    std::uniform_real_distribution<double> z(2.0, 6.0);
    io::MatchPair pair;
    pair.frame_a = 0;
    pair.frame_b = 7;
    for (int i = 0; i < 50; ++i) {
      const geom::Point3 w = geom::unproject(cams[0], uv(rng), uv(rng), z(rng));
      const auto p1 = geom::project(cams[0], w);
      const auto p2 = geom::project(cams[7], w);
      pair.matches.push_back({geom::Vec2(p1.u, p1.v), geom::Vec2(p2.u, p2.v)});
    }
    const std::vector<io::MatchPair> pairs{pair};
    io::write_text_atomic(dir / "matches.json", io::dump_json(io::matches_to_json(pairs)));

    const auto r = run({"eval", "sampson", "--matches", (dir / "matches.json").string(), "--trajectory",
                        (dir / "trajectory.json").string()});
    REQUIRE(r.code == cli::kOk);
    CHECK(io::parse_json(r.out, "stdout")["value"].get<double>() < 1e-12);

    pair.frame_b = 8;
    const std::vector<io::MatchPair> bad{pair};
    io::write_text_atomic(dir / "bad.json", io::dump_json(io::matches_to_json(bad)));
    CHECK(run({"eval", "sampson", "--matches", (dir / "bad.json").string(), "--trajectory",
               (dir / "trajectory.json").string()})
              .code == cli::kInputError);
    CHECK(run({"eval", "sampson", "--matches", (dir / "matches.json").string()}).code == cli::kUsage);
    fs::remove_all(dir);
  }

  TEST_CASE("inspect reports validity") {
    const auto dir = fixtures::temp_dir("cli_inspect");
    const auto bundle = fixtures::write_scene(fixtures::golden_scene(), dir);
    const auto ok = run({"inspect", "--bundle", bundle.string()});
    CHECK(ok.code == cli::kOk);
    const auto j = io::parse_json(ok.out, "stdout");
    CHECK(j["valid"].get<bool>());
    CHECK(j["trajectory_frames"].get<int>() == 8);

    fs::remove(dir / "reference.pfm");
    const auto bad = run({"inspect", "--bundle", bundle.string()});
    CHECK(bad.code == cli::kInputError);
    const auto jb = io::parse_json(bad.out, "stdout");
    CHECK_FALSE(jb["valid"].get<bool>());
    CHECK(jb["diagnostic"].get<std::string>().find("reference.pfm") != std::string::npos);
    fs::remove_all(dir);
  }

  TEST_CASE("preset writes a loadable trajectory") {
    const auto dir = fixtures::temp_dir("cli_preset");
    const auto out = dir / "orbit.json";
    REQUIRE(run({"preset", "--kind", "orbit", "--magnitude", "90", "--frames", "5", "--width", "64", "--height", "48",
                 "--focal", "50", "--eye", "0,0,-4", "--target", "0,0,0", "--out", out.string()})
                .code == cli::kOk);
    const auto spec = io::read_trajectory(out);
    const auto cams = trajectory::expand(spec);
    REQUIRE(cams.size() == 5);
    CHECK(cams.front().width == 64);
    CHECK(cams.front().height == 48);
    CHECK((cams.back().extrinsics.center() - geom::Vec3(-4.0, 0.0, 0.0)).norm() < 1e-9);

    REQUIRE(run({"preset", "--kind", "dolly", "--magnitude", "1", "--frames", "3", "--from", out.string(), "--out",
                 (dir / "dolly.json").string()})
                .code == cli::kOk);
    CHECK(trajectory::expand(io::read_trajectory(dir / "dolly.json")).size() == 3);

    CHECK(run({"preset", "--kind", "dolly", "--magnitude", "1", "--frames", "3"}).code == cli::kUsage);
    CHECK(run({"preset", "--kind", "spiral", "--magnitude", "1", "--frames", "3", "--from", out.string()}).code ==
          cli::kUsage);
    fs::remove_all(dir);
  }

  TEST_CASE("serve fails fast on an unusable port") {
    const auto dir = fixtures::temp_dir("cli_serve");
    const auto bundle = fixtures::write_scene(fixtures::golden_scene(), dir);
    CHECK(run({"serve", "--bundle", bundle.string(), "--port", "70000"}).code == cli::kInputError);

    const int blocker = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(blocker >= 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    REQUIRE(::bind(blocker, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
    REQUIRE(::listen(blocker, 1) == 0);
    socklen_t len = sizeof(addr);
    REQUIRE(::getsockname(blocker, reinterpret_cast<sockaddr*>(&addr), &len) == 0);
    const int port = ntohs(addr.sin_port);
    CHECK(run({"serve", "--bundle", bundle.string(), "--port", std::to_string(port)}).code == cli::kInputError);
    ::close(blocker);
    fs::remove_all(dir);
  }
}
