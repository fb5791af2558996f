// SPDX-License-Identifier: Apache-2.0

#include "plcbench/bench/cli.hpp"

#include <atomic>
#include <csignal>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "plcbench/bench/report.hpp"
#include "plcbench/bench/trials.hpp"
#include "plcbench/common/error.hpp"
#include "plcbench/net/udp_network.hpp"

namespace plcbench::bench {

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_interrupt(int) { g_interrupted = true; }

plcsim::EmulatorSettings settings_from(const std::string& path) {
  if (path.empty()) {
    return plcsim::EmulatorSettings{};
  }
  return plcsim::load_settings(KeyValueConfig::load(path));
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw ConfigError("cannot open '" + path + "' for writing");
  }
  f << content;
  if (!f) {
    throw Error("failed writing '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw ConfigError("cannot open '" + path + "'");
  }
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Format format_for(const std::string& flag, const std::string& path) {
  if (!flag.empty()) {
    return parse_format(flag);
  }
  const auto dot = path.rfind('.');
  if (dot != std::string::npos) {
    const auto ext = path.substr(dot + 1);
    if (ext == "csv" || ext == "json") {
      return parse_format(ext);
    }
  }
  return Format::Markdown;
}

struct ServeArgs {
  std::string config;
  bool verbose = false;
  double duration_s = 0.0;
};

int serve(const ServeArgs& args, std::ostream& out) {
  const auto settings = settings_from(args.config);
  net::UdpNetwork network(net::Address::parse(settings.host, 0));
  auto options = plcsim::emulator_options(settings);
  if (args.verbose) {
    options.log = &out;
  }
  plcsim::Emulator emulator(settings.variables, settings.scan, network, options);
  out << "serving fins=" << emulator.fins_address().to_string() << " cip=" << emulator.cip_address().to_string()
      << " echo=" << emulator.echo_address().to_string() << std::endl;
  g_interrupted = false;
  auto previous = std::signal(SIGINT, on_interrupt);
  emulator.start();
  const auto until = network.now() + std::chrono::duration_cast<Duration>(std::chrono::duration<double>(args.duration_s));
  while (!g_interrupted && (args.duration_s <= 0 || network.now() < until)) {
    std::this_thread::sleep_for(std::chrono::milliseconds{20});
  }
  emulator.stop();
  std::signal(SIGINT, previous);
  out << "served scans=" << emulator.scans() << " fins=" << emulator.served(plcsim::ServedProtocol::Fins)
      << " cip=" << emulator.served(plcsim::ServedProtocol::Cip)
      << " udp=" << emulator.served(plcsim::ServedProtocol::RawUdp) << std::endl;
  return kExitOk;
}

struct BenchArgs {
  std::string protocol = "fins";
  std::string kind = "read";
  std::uint64_t trials = 100'000;
  std::uint64_t warmup = 1'000;
  std::string mode = "sim";
  bool pipelined = false;
  std::string samples;
  std::string stats;
  std::string config;
  std::optional<std::uint64_t> seed;
};

int bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  BenchConfig config;
  config.protocol = parse_protocol(args.protocol);
  config.kind = parse_kind(args.kind);
  config.trials = args.trials;
  config.warmup = args.warmup;
  config.mode = parse_mode(args.mode);
  config.pipelined = args.pipelined;
  config.settings = settings_from(args.config);
  if (args.seed) {
    config.seed = *args.seed;
    config.settings.channel.seed = *args.seed;
  }
  config.validate();

  const TrialRun run = run_trials(config);
  if (!args.samples.empty()) {
    write_file(args.samples, format_samples_csv(run.samples));
  }
  if (run.aborted) {
    err << "plcbench: run aborted: " << run.diagnostic << "\n";
    return kExitFailure;
  }
  const auto stats = compute_stats(run.samples);
  if (!args.stats.empty()) {
    write_file(args.stats, format_stats_json(stats));
  } else {
    out << format_stats_json(stats);
  }
  return kExitOk;
}

struct CompareArgs {
  std::string mode = "sim";
  std::uint64_t trials = 100'000;
  std::uint64_t warmup = 1'000;
  std::string out;
  std::string format;
  std::string config;
  std::optional<std::uint64_t> seed;
};

int compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  CompareConfig config;
  config.mode = parse_mode(args.mode);
  config.trials = args.trials;
  config.warmup = args.warmup;
  config.settings = settings_from(args.config);
  if (args.seed) {
    config.seed = *args.seed;
    config.settings.channel.seed = *args.seed;
  }
  if (config.trials < 1) {
    throw ConfigError("trials must be at least 1");
  }
  const Format format = format_for(args.format, args.out);
  const Report report = run_compare(config);
  const std::string text = format_report(report, format);
  if (args.out.empty()) {
    out << text;
  } else {
    write_file(args.out, text);
  }
  int failed = 0;
  for (const auto& c : report.cells) {
    if (!c.stats) {
      ++failed;
      err << "plcbench: " << to_string(c.protocol) << ' ' << to_string(c.kind) << " failed: " << c.failure << "\n";
    }
  }
  return failed == 0 ? kExitOk : kExitFailure;
}

int replay(const std::string& path, std::ostream& out) {
  const auto samples = parse_samples_csv(read_file(path));
  out << format_stats_json(compute_stats(samples));
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Controller communication latency bench"};
  app.require_subcommand(1);

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the emulator on loopback UDP");
  serve_cmd->add_option("--config", serve_args.config, "key = value config file");
  serve_cmd->add_flag("-v,--verbose", serve_args.verbose, "Log one line per scan");
  serve_cmd->add_option("--duration-s", serve_args.duration_s, "Stop after this many seconds (0 = until SIGINT)");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Run one protocol/kind and report stats");
  bench_cmd->add_option("--protocol", bench_args.protocol, "fins, cip, cip-linked, udp, opc")->capture_default_str();
  bench_cmd->add_option("--kind", bench_args.kind, "read, write, cycle")->capture_default_str();
  bench_cmd->add_option("--trials", bench_args.trials)->capture_default_str();
  bench_cmd->add_option("--warmup", bench_args.warmup)->capture_default_str();
  bench_cmd->add_option("--mode", bench_args.mode, "sim, loopback, external")->capture_default_str();
  bench_cmd->add_flag("--pipelined", bench_args.pipelined, "FINS cycle: send write and read back to back");
  bench_cmd->add_option("--samples", bench_args.samples, "Write samples CSV here");
  bench_cmd->add_option("--stats", bench_args.stats, "Write stats JSON here instead of stdout");
  bench_cmd->add_option("--config", bench_args.config, "key = value config file");
  bench_cmd->add_option("--seed", bench_args.seed);

  CompareArgs compare_args;
  auto* compare_cmd = app.add_subcommand("compare", "Run the 4 x 3 protocol matrix");
  compare_cmd->add_option("--mode", compare_args.mode, "sim, loopback, external")->capture_default_str();
  compare_cmd->add_option("--trials", compare_args.trials)->capture_default_str();
  compare_cmd->add_option("--warmup", compare_args.warmup)->capture_default_str();
  compare_cmd->add_option("--out", compare_args.out, "Report path; format from extension unless --format");
  compare_cmd->add_option("--format", compare_args.format, "markdown, csv, json");
  compare_cmd->add_option("--config", compare_args.config, "key = value config file");
  compare_cmd->add_option("--seed", compare_args.seed);

  std::string replay_path;
  auto* replay_cmd = app.add_subcommand("replay", "Recompute stats from a samples CSV");
  replay_cmd->add_option("samples", replay_path, "Samples CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*serve_cmd) return serve(serve_args, out);
    if (*bench_cmd) return bench(bench_args, out, err);
    if (*compare_cmd) return compare(compare_args, out, err);
    if (*replay_cmd) return replay(replay_path, out);
  } catch (const ConfigError& e) {
    err << "plcbench: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "plcbench: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace plcbench::bench
