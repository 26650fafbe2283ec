// Command-line front end: simulate, fit, report, serve, replay.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <gamediag/gamediag.hpp>
#include <gamediag/server.hpp>

namespace {

using namespace gamediag;

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::BadRequest, path + ": " + e.what());
  }
}

std::vector<TrialRecord> read_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path);
  return read_log(in);
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

ServiceConfig load_config(const std::string& path) {
  if (path.empty()) return ServiceConfig{};
  return config_from_json(read_json_file(path));
}

struct SimulateArgs {
  std::string profile;
  std::string onset_profile;
  int onset_session = 0;
  int trials = 600;
  int sessions = 1;
  std::uint64_t seed = 1;
  std::string out = "-";
  std::string child = "sim-child";
  std::string config;
};

int run_simulate(const SimulateArgs& a) {
  const ServiceConfig config = load_config(a.config);
  const ImpairmentProfile base = profile_from_json(read_json_file(a.profile));
  std::vector<ImpairmentProfile> per_session(static_cast<std::size_t>(a.sessions), base);
  if (!a.onset_profile.empty()) {
    if (a.onset_session < 1 || a.onset_session > a.sessions) {
      throw Error(ErrorCode::BadRequest, "--onset-session must be within 1.." + std::to_string(a.sessions));
    }
    const ImpairmentProfile later = profile_from_json(read_json_file(a.onset_profile));
    for (int i = a.onset_session - 1; i < a.sessions; ++i) per_session[static_cast<std::size_t>(i)] = later;
  }
  SimulationOptions options;
  options.child_id = a.child;
  options.session = config.session;
  const ScreenProfile screen = !config.children.empty() && !config.children.front().screens.empty()
                                   ? config.children.front().screens.front()
                                   : reference_screen();
  const auto log = run_study(per_session, screen, a.trials, AmbientSchedule{}, a.seed, options);
  write_text(a.out, to_jsonl(log));
  std::fprintf(stderr, "simulated %zu trials in %d session(s)\n", log.size(), a.sessions);
  return 0;
}

int run_fit(const std::string& in, const std::string& out, const std::string& child, const std::string& config_path) {
  const ServiceConfig config = load_config(config_path);
  const Json report = replay_report(child, read_log_file(in), config);
  write_text(out, report.dump(2) + "\n");
  return 0;
}

int run_report(const std::string& child, const std::string& format, const std::string& config_path) {
  if (format != "json") throw Error(ErrorCode::BadRequest, "unsupported format '" + format + "'");
  const Service service(load_config(config_path));
  std::cout << service.get_report(child).dump(2) << "\n";
  return 0;
}

httplib::Server* g_server = nullptr;

void stop_server(int) {
  if (g_server) g_server->stop();
}

int run_serve(const std::string& config_path) {
  const ServiceConfig config = load_config(config_path);
  Service service(config);
  httplib::Server server;
  register_routes(server, service);
  g_server = &server;
  std::signal(SIGINT, stop_server);
  std::signal(SIGTERM, stop_server);
  std::fprintf(stderr, "listening on %s:%d\n", config.host.c_str(), config.port);
  if (!server.listen(config.host, config.port)) {
    std::fprintf(stderr, "error: cannot bind %s:%d\n", config.host.c_str(), config.port);
    return 1;
  }
  return 0;
}

int run_replay(const std::string& in, bool check, const std::string& out, const std::string& child,
               const std::string& config_path) {
  const ServiceConfig config = load_config(config_path);
  const auto log = read_log_file(in);
  const std::string batch = replay_report(child, log, config).dump();
  if (!check) {
    write_text(out, Json::parse(batch).dump(2) + "\n");
    return 0;
  }
  ChildState state(child, config);
  std::size_t duplicates = 0;
  for (const auto& t : log) {
    if (!state.apply(t)) ++duplicates;
  }
  const std::string incremental = state.report().dump();
  if (batch != incremental) {
    std::fprintf(stderr, "replay mismatch: batch and incremental reports differ\n");
    return 1;
  }
  std::printf("ok: %zu records, %zu duplicate(s), report identical (%zu bytes)\n", log.size(), duplicates,
              batch.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covert vision screening: simulation, fitting and service"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Play simulated sessions and write a JSON Lines log");
  simulate->add_option("--profile", sim.profile, "Impairment profile (JSON)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--trials", sim.trials, "Trials per session")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--out", sim.out, "Output log, '-' for stdout");
  simulate->add_option("--sessions", sim.sessions, "Number of daily sessions")->check(CLI::PositiveNumber);
  simulate->add_option("--onset-profile", sim.onset_profile, "Profile used from --onset-session on")
      ->check(CLI::ExistingFile);
  simulate->add_option("--onset-session", sim.onset_session, "First session (1-based) with the onset profile");
  simulate->add_option("--child", sim.child, "Child id");
  simulate->add_option("--config", sim.config, "Service config for session and screen settings");

  std::string fit_in, fit_out = "-", fit_child = "sim-child", fit_config;
  auto* fit = app.add_subcommand("fit", "Fit a log and write the report");
  fit->add_option("--in", fit_in, "Input log (JSON Lines)")->required()->check(CLI::ExistingFile);
  fit->add_option("--out", fit_out, "Output report, '-' for stdout");
  fit->add_option("--child", fit_child, "Child id written into the report");
  fit->add_option("--config", fit_config, "Service config");

  std::string report_child, report_format = "json", report_config;
  auto* report = app.add_subcommand("report", "Print the report of a child from the service data directory");
  report->add_option("--child", report_child, "Child id")->required();
  report->add_option("--format", report_format, "Output format")->check(CLI::IsMember({"json"}));
  report->add_option("--config", report_config, "Service config");

  std::string serve_config;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", serve_config, "Service config")->required()->check(CLI::ExistingFile);

  std::string replay_in, replay_out = "-", replay_child = "sim-child", replay_config;
  bool replay_check = false;
  auto* replay = app.add_subcommand("replay", "Rebuild a report from a log");
  replay->add_option("--in", replay_in, "Input log (JSON Lines)")->required()->check(CLI::ExistingFile);
  replay->add_flag("--check", replay_check, "Compare batch and incremental reports byte for byte");
  replay->add_option("--out", replay_out, "Output report when not checking");
  replay->add_option("--child", replay_child, "Child id");
  replay->add_option("--config", replay_config, "Service config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return run_simulate(sim);
    if (*fit) return run_fit(fit_in, fit_out, fit_child, fit_config);
    if (*report) return run_report(report_child, report_format, report_config);
    if (*serve) return run_serve(serve_config);
    if (*replay) return run_replay(replay_in, replay_check, replay_out, replay_child, replay_config);
  } catch (const ReplayError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
