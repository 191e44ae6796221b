#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "grid_file.hpp"
#include "json.hpp"
#include "sogs/bundle.hpp"
#include "sogs/error.hpp"
#include "sogs/metrics.hpp"
#include "sogs/plas.hpp"
#include "sogs/ply.hpp"

namespace sogs::cli {
namespace fs = std::filesystem;
namespace {

struct CommonFlags {
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  bool threads_set = false;
  double threshold = SortConfig{}.improvement_threshold;
  double decay = SortConfig{}.radius_decay;
  std::size_t min_block = SortConfig{}.min_block_size;
};

struct CompressFlags {
  fs::path input;
  fs::path output;
  std::string codec = "png";
  std::string dc_codec;
  int quality = 100;
  bool no_sh = false;
  bool no_sort = false;
  std::string weights;
};

struct SortFlags {
  fs::path input;
  fs::path output;
  fs::path report;
};

struct BenchFlags {
  std::vector<std::size_t> sides{64, 128, 256};
  std::size_t channels = 3;
  std::vector<std::uint64_t> seeds{0, 1, 2};
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kDecodeError:
      return kExitCorrupt;
    default:
      return kExitUsage;
  }
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void require_input(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kIoError, "input file not found: " + path.string());
  }
}

SortConfig sort_config(const CommonFlags& f) {
  SortConfig c;
  c.seed = f.seed;
  c.threads = f.threads;
  c.improvement_threshold = f.threshold;
  c.radius_decay = f.decay;
  c.min_block_size = f.min_block;
  c.validate();
  return c;
}

// "position=1,sh_dc=0.5" applied over the defaults.
AttributeWeights parse_weights(const std::string& text) {
  AttributeWeights w = kDefaultSortWeights;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidInput, "weight must be attr=value: " + item);
    }
    const std::optional<Attribute> a = parse_attribute(item.substr(0, eq));
    if (!a) throw Error(ErrorCode::kInvalidInput, "unknown attribute in weights: " + item);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kInvalidInput, "bad weight value: " + item);
    }
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidInput, "weights must be finite and non-negative: " + item);
    }
    w[*a] = v;
  }
  return w;
}

int cmd_compress(const CommonFlags& common, const CompressFlags& f, std::ostream& out,
                 std::ostream& err) {
  require_input(f.input);
  const std::vector<std::uint8_t> ply = read_bytes(f.input);
  SplatCloud cloud = read_ply(ply);

  CompressOptions options;
  options.sort = sort_config(common);
  options.sort_enabled = !f.no_sort;
  options.keep_sh_rest = !f.no_sh;
  if (!f.weights.empty()) options.sort_weights = parse_weights(f.weights);
  for (Attribute a : kAllAttributes) {
    options.quant.attributes[a].codec = f.codec;
    options.quant.attributes[a].quality = f.quality;
  }
  if (!f.dc_codec.empty()) options.quant.attributes[Attribute::kShDc].codec = f.dc_codec;

  const CompressedBundle bundle = compress(cloud, options);
  write_file_atomic(f.output, bundle.bytes);

  const double ratio = static_cast<double>(ply.size()) / static_cast<double>(bundle.bytes.size());
  out << "input_bytes=" << ply.size() << '\n'
      << "bundle_bytes=" << bundle.bytes.size() << '\n'
      << "ratio=" << std::fixed << std::setprecision(3) << ratio << std::defaultfloat << '\n'
      << "gaussians=" << cloud.size() << '\n'
      << "kept=" << bundle.manifest.side * bundle.manifest.side << '\n'
      << "side=" << bundle.manifest.side << '\n'
      << "sorted=" << (bundle.manifest.sorted ? 1 : 0) << '\n'
      << "reorders=" << bundle.sort_report.reorders << '\n'
      << "sort_seconds=" << bundle.sort_report.seconds << '\n';
  for (const BundleEntryInfo& e : bundle.entries) {
    out << "plane." << e.name << '=' << e.bytes << '\n';
  }
  err << "compressed " << cloud.size() << " Gaussians into " << f.output.string() << '\n';
  return kExitOk;
}

int cmd_decompress(const fs::path& input, const fs::path& output, std::ostream& out,
                   std::ostream& err) {
  require_input(input);
  const SplatCloud cloud = decompress(read_bytes(input));
  const std::vector<std::uint8_t> ply = write_ply(cloud);
  write_file_atomic(output, ply);
  out << "gaussians=" << cloud.size() << '\n'
      << "sh_degree=" << cloud.sh_degree() << '\n'
      << "output_bytes=" << ply.size() << '\n';
  err << "wrote " << output.string() << '\n';
  return kExitOk;
}

int cmd_sort(const CommonFlags& common, const SortFlags& f, std::ostream& out,
             std::ostream& err) {
  require_input(f.input);
  const GridFile grid = read_grid_file(f.input);
  const FeatureGrid features = to_feature_grid(grid);
  const SortResult result = sort_grid(features, sort_config(common));
  const GridFile sorted = permute_pixels(grid, result.permutation);

  const double vad_initial = vad(features);
  const double vad_final = vad(apply_permutation(features, result.permutation));

  nlohmann::json report = {
      {"side", features.side},
      {"channels", features.channels},
      {"seed", common.seed},
      {"reorders", result.report.reorders},
      {"time_s", result.report.seconds},
      {"vad_initial", vad_initial},
      {"vad_final", vad_final},
  };
  nlohmann::json levels = nlohmann::json::array();
  for (const LevelTrace& l : result.report.levels) {
    levels.push_back({{"radius", l.radius},
                      {"block_size", l.block_size},
                      {"passes", l.passes},
                      {"distance_start", l.distance_start},
                      {"distance_end", l.distance_end}});
  }
  report["levels"] = std::move(levels);

  fs::path report_path = f.report;
  if (report_path.empty()) report_path = fs::path(f.output).concat(".json");
  const std::string text = report.dump(1) + "\n";

  write_file_atomic(f.output, encode_grid_file(sorted));
  write_file_atomic(report_path,
                    std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));

  out << "side=" << features.side << '\n'
      << "channels=" << features.channels << '\n'
      << "reorders=" << result.report.reorders << '\n'
      << "time_s=" << result.report.seconds << '\n'
      << "vad_initial=" << vad_initial << '\n'
      << "vad_final=" << vad_final << '\n'
      << "report=" << report_path.string() << '\n';
  err << "sorted " << f.input.string() << " -> " << f.output.string() << '\n';
  return kExitOk;
}

int cmd_bench(const CommonFlags& common, const BenchFlags& f, std::ostream& out) {
  if (f.channels == 0) throw Error(ErrorCode::kInvalidInput, "channels must be positive");
  for (std::size_t s : f.sides) {
    if (s < 2) throw Error(ErrorCode::kInvalidInput, "sides must be at least 2");
  }
  const std::vector<BenchRow> rows = bench_sort(f.sides, f.channels, f.seeds, sort_config(common));
  write_bench_csv(out, rows);
  return kExitOk;
}

void add_sort_flags(CLI::App& cmd, CommonFlags& c) {
  cmd.add_option("--seed", c.seed, "Random seed");
  cmd.add_option("--threads", c.threads, "Worker threads (default: SOGS_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--threshold", c.threshold, "Relative improvement below which a pass stalls");
  cmd.add_option("--decay", c.decay, "Radius decay factor per level");
  cmd.add_option("--min-block", c.min_block, "Smallest block side");
}

std::size_t threads_from_env() {
  const char* env = std::getenv("SOGS_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const long long v = std::strtoll(env, &end, 10);
  if (*end != '\0' || v <= 0) {
    throw Error(ErrorCode::kInvalidInput, std::string("SOGS_THREADS must be a positive integer: ") + env);
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIoError, "output directory does not exist: " + dir.string());
  }
  std::random_device rd;
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    f.close();
    if (!f) {
      fs::remove(tmp, ec);
      throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sort, compress and decompress Gaussian splat scenes", "sogs"};
  app.require_subcommand(1);

  CommonFlags common;
  CompressFlags cflags;
  SortFlags sflags;
  BenchFlags bflags;
  fs::path dec_in, dec_out;

  auto* compress_cmd = app.add_subcommand("compress", "PLY scene -> bundle");
  compress_cmd->add_option("input", cflags.input, "Input PLY")->required();
  compress_cmd->add_option("output", cflags.output, "Output bundle")->required();
  add_sort_flags(*compress_cmd, common);
  compress_cmd->add_option("--codec", cflags.codec, "Image codec for every plane");
  compress_cmd->add_option("--dc-codec", cflags.dc_codec, "Codec override for sh_dc (may be lossy)");
  compress_cmd->add_option("--quality", cflags.quality, "Quality for lossy codecs")
      ->check(CLI::Range(1, 100));
  compress_cmd->add_flag("--no-sh", cflags.no_sh, "Drop higher-order SH coefficients");
  compress_cmd->add_flag("--no-sort", cflags.no_sort, "Use a seeded random layout");
  compress_cmd->add_option("--weights", cflags.weights, "Sort weights, e.g. position=1,sh_dc=1");

  auto* decompress_cmd = app.add_subcommand("decompress", "Bundle -> PLY scene");
  decompress_cmd->add_option("input", dec_in, "Input bundle")->required();
  decompress_cmd->add_option("output", dec_out, "Output PLY")->required();

  auto* sort_cmd = app.add_subcommand("sort", "Sort the pixels of a square .png or .npy grid");
  sort_cmd->add_option("input", sflags.input, "Input grid")->required();
  sort_cmd->add_option("output", sflags.output, "Output grid, same format")->required();
  sort_cmd->add_option("--report", sflags.report, "Report JSON (default: <output>.json)");
  add_sort_flags(*sort_cmd, common);

  auto* bench_cmd = app.add_subcommand("bench", "Sort random grids, CSV to stdout");
  bench_cmd->add_option("--sides", bflags.sides, "Grid sides")->delimiter(',');
  bench_cmd->add_option("--channels", bflags.channels, "Channels per cell");
  bench_cmd->add_option("--seeds", bflags.seeds, "Trial seeds")->delimiter(',');
  add_sort_flags(*bench_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    for (CLI::App* sub : app.get_subcommands()) {
      const CLI::Option* opt = sub->get_option_no_throw("--threads");
      if (opt != nullptr && opt->count() > 0) common.threads_set = true;
    }
    if (!common.threads_set) common.threads = threads_from_env();

    if (compress_cmd->parsed()) return cmd_compress(common, cflags, out, err);
    if (decompress_cmd->parsed()) return cmd_decompress(dec_in, dec_out, out, err);
    if (sort_cmd->parsed()) return cmd_sort(common, sflags, out, err);
    if (bench_cmd->parsed()) return cmd_bench(common, bflags, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace sogs::cli
