#include "camcond/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <iostream>
#include <sstream>
#include <optional>
#include <pthread.h>
#include <string>

#include "camcond/error.hpp"
#include "camcond/io_formats.hpp"
#include "camcond/log.hpp"
#include "camcond/metrics.hpp"
#include "camcond/parallel.hpp"
#include "camcond/pipeline.hpp"
#include "camcond/preview_service.hpp"
#include "camcond/simd/kernels.hpp"
#include "camcond/trajectory.hpp"

namespace camcond::cli {

namespace fs = std::filesystem;

namespace {

/// Flags mirroring ProjectBundle one-to-one; any given flag overrides the
/// bundle file.
struct BundleFlags {
  std::string bundle;
  std::string background_depth, reference_depth, mask, motion, trajectory, output, reference_keypoints;
  std::optional<double> decay_length, discontinuity_ratio, depth_fraction;
  std::optional<int> num_steps;
  bool fill_holes = false;
  std::string depth_polarity;
  std::optional<double> limb_thickness, joint_radius;
  bool no_joints = false;
  int threads = 0;

  void attach(CLI::App* app) {
    app->add_option("--bundle", bundle, "Project bundle file (JSON); relative paths resolve against its directory");
    app->add_option("--background-depth", background_depth, "Background-only depth raster (PFM)");
    app->add_option("--reference-depth", reference_depth, "Reference depth raster (PFM)");
    app->add_option("--mask", mask, "Character mask (8-bit PNG or PGM, >127 = character)");
    app->add_option("--motion", motion, "Motion sequence (JSON)");
    app->add_option("--trajectory", trajectory, "Trajectory (JSON)");
    app->add_option("--output", output, "Output directory");
    app->add_option("--reference-keypoints", reference_keypoints, "Reference keypoints for the motion fit (JSON)");
    app->add_option("--decay-length", decay_length, "Importance-weight decay length, pixels");
    app->add_option("--discontinuity-ratio", discontinuity_ratio, "Relative depth jump that culls a mesh triangle");
    app->add_option("--depth-fraction", depth_fraction, "Fraction of denoising steps with pose+depth");
    app->add_option("--num-steps", num_steps, "Number of denoising steps");
    app->add_flag("--fill-holes", fill_holes, "Fill the masked region of the background depth");
    app->add_option("--depth-polarity", depth_polarity, "near_bright or far_bright")
        ->check(CLI::IsMember({"near_bright", "far_bright"}));
    app->add_option("--limb-thickness", limb_thickness, "Skeleton limb thickness, pixels");
    app->add_option("--joint-radius", joint_radius, "Skeleton joint radius, pixels");
    app->add_flag("--no-joints", no_joints, "Draw limbs only");
    app->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
  }

  [[nodiscard]] io::ProjectBundle resolve() const {
    io::ProjectBundle b;
    bool have_paths = false;
    if (!bundle.empty()) {
      b = io::read_bundle(bundle);
      have_paths = true;
    }
    auto set = [](fs::path& dst, const std::string& v) {
      if (!v.empty()) dst = v;
    };
    set(b.background_depth, background_depth);
    set(b.reference_depth, reference_depth);
    set(b.mask, mask);
    set(b.motion, motion);
    set(b.trajectory, trajectory);
    set(b.output, output);
    if (!reference_keypoints.empty()) b.reference_keypoints = fs::path(reference_keypoints);
    if (!have_paths) {
      for (const auto& [name, value] :
           {std::pair{"--background-depth", background_depth}, {"--reference-depth", reference_depth},
            {"--mask", mask}, {"--motion", motion}, {"--trajectory", trajectory}, {"--output", output}}) {
        if (value.empty()) throw CLI::ValidationError(std::string(name) + " is required without --bundle");
      }
    }
    auto& p = b.parameters;
    if (decay_length) p.decay_length = *decay_length;
    if (discontinuity_ratio) p.discontinuity_ratio = *discontinuity_ratio;
    if (depth_fraction) p.depth_fraction = *depth_fraction;
    if (num_steps) p.num_steps = *num_steps;
    if (fill_holes) p.fill_holes = true;
    if (depth_polarity == "near_bright") p.polarity = raster::DepthPolarity::NearBright;
    if (depth_polarity == "far_bright") p.polarity = raster::DepthPolarity::FarBright;
    if (limb_thickness) b.style.limb_thickness = *limb_thickness;
    if (joint_radius) b.style.joint_radius = *joint_radius;
    if (no_joints) b.style.draw_joints = false;
    return b;
  }

  [[nodiscard]] int thread_count() const { return threads > 0 ? threads : default_thread_count(); }
};

geom::Vec3 parse_vec3(const std::string& s, const char* flag) {
  geom::Vec3 v;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> v.x() >> c1 >> v.y() >> c2 >> v.z()) || c1 != ',' || c2 != ',' || !in.eof()) {
    throw CLI::ValidationError(std::string(flag) + " expects x,y,z");
  }
  return v;
}

void write_or_print(const std::string& path, const io::Json& j) {
  if (path.empty() || path == "-") {
    std::cout << io::dump_json(j);
  } else {
    io::write_text_atomic(path, io::dump_json(j));
  }
}

int cmd_compile(const BundleFlags& flags) {
  const io::ProjectBundle bundle = flags.resolve();
  const auto result = pipeline::compile(bundle, flags.thread_count());
  spdlog::info("outputs manifest={} pose_frames={} pose_depth_frames={} depth_steps={}",
               result.manifest_path.string(), result.pose.files.size(), result.pose_depth.files.size(),
               result.manifest.depth_steps);
  std::cout << result.manifest_path.string() << "\n";
  return kOk;
}

struct EvalFlags {
  std::string a, b, matches, trajectory, report;
  bool align_root = false;
};

int cmd_eval_mpjpe(const EvalFlags& f) {
  const auto a = io::read_motion(f.a);
  const auto b = io::read_motion(f.b);
  const auto rep = metrics::mpjpe_report(a, b, f.align_root);
  const io::Json j{{"version", io::kSchemaVersion}, {"metric", "mpjpe"}, {"value", rep.value},
                   {"align_root", f.align_root}, {"per_frame", rep.per_frame}};
  write_or_print(f.report, j);
  return kOk;
}

int cmd_eval_sampson(const EvalFlags& f) {
  const auto pairs = io::read_matches(f.matches);
  const auto cameras = trajectory::expand(io::read_trajectory(f.trajectory));
  io::Json per_pair = io::Json::array();
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& p : pairs) {
    for (int idx : {p.frame_a, p.frame_b}) {
      if (idx < 0 || idx >= static_cast<int>(cameras.size())) {
        throw Error(ErrorCode::IndexOutOfRange, "match pair references frame " + std::to_string(idx));
      }
    }
    const auto fm = metrics::fundamental_from_cameras(cameras[static_cast<std::size_t>(p.frame_a)],
                                                      cameras[static_cast<std::size_t>(p.frame_b)]);
    const double se = metrics::sampson_error(fm, p.matches);
    per_pair.push_back({{"frames", {p.frame_a, p.frame_b}}, {"value", se}, {"matches", p.matches.size()}});
    sum += se * static_cast<double>(p.matches.size());
    count += p.matches.size();
  }
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "no correspondences");
  const io::Json j{{"version", io::kSchemaVersion},
                   {"metric", "sampson"},
                   {"value", sum / static_cast<double>(count)},
                   {"pairs", per_pair}};
  write_or_print(f.report, j);
  return kOk;
}

int cmd_serve(const BundleFlags& flags, const std::string& host, int port) {
  const io::ProjectBundle bundle = flags.resolve();
  io::validate(bundle);
  const auto traj = io::read_trajectory(bundle.trajectory);
  preview::Session session(pipeline::prepare_scene(bundle, traj, flags.thread_count()), traj,
                           flags.thread_count());

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  preview::Server server(session);
  server.start(host, port);
  std::cout << "listening on http://" << host << ":" << server.port() << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  spdlog::info("signal {} received; shutting down", sig);
  server.stop();
  return kOk;
}

int cmd_inspect(const BundleFlags& flags) {
  const io::ProjectBundle bundle = flags.resolve();
  io::Json j = io::bundle_to_json(bundle);
  try {
    io::validate(bundle);
    j["valid"] = true;
  } catch (const Error& e) {
    j["valid"] = false;
    j["diagnostic"] = e.what();
  }
  std::error_code ec;
  if (fs::is_regular_file(bundle.trajectory, ec)) {
    const auto traj = io::read_trajectory(bundle.trajectory);
    j["trajectory_frames"] = trajectory::frame_count(traj);
  }
  j["simd"] = std::string(simd::to_string(simd::active_isa()));
  std::cout << io::dump_json(j);
  return j["valid"].get<bool>() ? kOk : kInputError;
}

struct PresetFlags {
  std::string kind = "dolly";
  double magnitude = 0.0;
  int frames = 0;
  std::string anchor = "0,0,0";
  std::string up = "0,1,0";
  std::string from;
  int width = 0, height = 0;
  double focal = 0.0;
  std::string eye, target;
  std::string out;
};

int cmd_preset(const PresetFlags& f) {
  trajectory::TrajectorySpec spec;
  spec.mode = trajectory::TrajectorySpec::Mode::Preset;
  if (!f.from.empty()) {
    spec.base = trajectory::expand(io::read_trajectory(f.from)).front();
  } else {
    if (f.width < 1 || f.height < 1 || !(f.focal > 0.0) || f.eye.empty() || f.target.empty()) {
      throw CLI::ValidationError("either --from or all of --width --height --focal --eye --target are required");
    }
    spec.base.width = f.width;
    spec.base.height = f.height;
    spec.base.intrinsics = {f.focal, f.focal, f.width / 2.0, f.height / 2.0};
    spec.base.extrinsics = geom::look_at(parse_vec3(f.eye, "--eye"), parse_vec3(f.target, "--target"));
  }
  spec.preset.kind = trajectory::preset_kind_from_string(f.kind);
  spec.preset.magnitude = f.magnitude;
  spec.preset.frames = f.frames;
  spec.preset.anchor = parse_vec3(f.anchor, "--anchor");
  spec.preset.up = parse_vec3(f.up, "--up");
  trajectory::validate(spec);
  write_or_print(f.out, io::trajectory_to_json(spec));
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  log::init();
  CLI::App app{"Camera-aligned conditioning signal compiler"};
  app.require_subcommand(1);
  std::string simd_choice;
  app.add_option("--simd", simd_choice, "Kernel set: scalar or avx2 (default: best available)")
      ->check(CLI::IsMember({"scalar", "avx2"}));

  BundleFlags compile_flags;
  auto* compile = app.add_subcommand("compile", "Render both condition sequences and the schedule manifest");
  compile_flags.attach(compile);

  EvalFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "Compute a geometric metric");
  eval->require_subcommand(1);
  auto* mpjpe = eval->add_subcommand("mpjpe", "Mean per-joint position error between two motion files");
  mpjpe->add_option("a", eval_flags.a, "First motion file")->required();
  mpjpe->add_option("b", eval_flags.b, "Second motion file")->required();
  mpjpe->add_flag("--align-root", eval_flags.align_root, "Translate each frame so the root joints coincide");
  mpjpe->add_option("--report", eval_flags.report, "Report file (default: stdout)");
  auto* sampson = eval->add_subcommand("sampson", "Mean Sampson error of correspondences under a trajectory");
  sampson->add_option("--matches", eval_flags.matches, "Correspondence file")->required();
  sampson->add_option("--trajectory", eval_flags.trajectory, "Trajectory the frames were rendered under")->required();
  sampson->add_option("--report", eval_flags.report, "Report file (default: stdout)");

  BundleFlags serve_flags;
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the preview service for a bundle");
  serve_flags.attach(serve);
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks a free port)");

  BundleFlags inspect_flags;
  auto* inspect = app.add_subcommand("inspect", "Print the parsed bundle");
  inspect_flags.attach(inspect);

  PresetFlags preset_flags;
  auto* preset = app.add_subcommand("preset", "Write a preset trajectory file");
  preset->add_option("--kind", preset_flags.kind, "orbit, dolly, truck or zoom")
      ->check(CLI::IsMember({"orbit", "dolly", "truck", "zoom"}));
  preset->add_option("--magnitude", preset_flags.magnitude,
                     "Degrees (orbit), meters (dolly, truck) or focal multiplier (zoom)")
      ->required();
  preset->add_option("--frames", preset_flags.frames, "Number of frames")->required();
  preset->add_option("--anchor", preset_flags.anchor, "Orbit center x,y,z");
  preset->add_option("--up", preset_flags.up, "Orbit axis x,y,z");
  preset->add_option("--from", preset_flags.from, "Take the base camera from frame 0 of this trajectory");
  preset->add_option("--width", preset_flags.width, "Base camera width");
  preset->add_option("--height", preset_flags.height, "Base camera height");
  preset->add_option("--focal", preset_flags.focal, "Base camera focal length, pixels");
  preset->add_option("--eye", preset_flags.eye, "Base camera position x,y,z");
  preset->add_option("--target", preset_flags.target, "Point the base camera looks at x,y,z");
  preset->add_option("--out", preset_flags.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (simd_choice == "scalar") simd::set_active_isa(simd::Isa::Scalar);
    if (simd_choice == "avx2") simd::set_active_isa(simd::Isa::Avx2);
    if (*compile) return cmd_compile(compile_flags);
    if (*mpjpe) return cmd_eval_mpjpe(eval_flags);
    if (*sampson) return cmd_eval_sampson(eval_flags);
    if (*serve) return cmd_serve(serve_flags, host, port);
    if (*inspect) return cmd_inspect(inspect_flags);
    if (*preset) return cmd_preset(preset_flags);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return kInternal;
  }
  return kUsage;
}

}  // namespace camcond::cli
