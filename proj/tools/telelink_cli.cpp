// Copyright 2026 The telelink Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// telelink command line.
//
//   telelink run <config> --trace <file> [--report <out>] [--seed N]
//   telelink bandwidth-report <config>
//   telelink serve <config> [--port P] [--host H] [--seed N] [--record F] [--duration S]
//
// Failures print one line to stderr:  error<TAB><kind><TAB><message>
// Exit codes are listed in README.md.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "telelink/telelink.h"

namespace {

enum Exit : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitNotFound = 3,
  kExitConfig = 4,
  kExitInput = 5,
  kExitIo = 6,
  kExitWaypointsMissed = 7,
};

int exit_for(tl_status status) {
  switch (status) {
    case TL_OK: return kExitOk;
    case TL_ERR_NOT_FOUND: return kExitNotFound;
    case TL_ERR_CONFIG:
    case TL_ERR_ROUTING: return kExitConfig;
    case TL_ERR_IO: return kExitIo;
    case TL_ERR_INVALID_ARGUMENT:
    case TL_ERR_VALIDATION:
    case TL_ERR_DIMENSION:
    case TL_ERR_CORRUPT_FRAME:
    case TL_ERR_TRUNCATED:
    case TL_ERR_UNSUPPORTED_TYPE: return kExitInput;
    default: return kExitInternal;
  }
}

int report_error(const char* kind, const std::string& message, int code) {
  std::fprintf(stderr, "error\t%s\t%s\n", kind, message.c_str());
  return code;
}

int report_status(tl_status status) {
  return report_error(tl_status_name(status), tl_last_error(), exit_for(status));
}

struct ConfigHandle {
  tl_config* ptr = nullptr;
  ~ConfigHandle() { tl_config_destroy(ptr); }
};

int cmd_run(const std::string& config_path, const std::string& trace, const std::string& report,
            uint64_t seed, bool verbose) {
  ConfigHandle config;
  if (tl_status s = tl_config_load(config_path.c_str(), &config.ptr)) return report_status(s);
  if (trace.empty()) return report_error("usage", "run requires --trace <file>", kExitUsage);

  char* json = nullptr;
  int success = 0;
  const tl_status s = tl_run_scenario(config.ptr, trace.c_str(), seed,
                                      report.empty() ? nullptr : report.c_str(),
                                      report.empty() ? &json : nullptr, &success);
  if (s != TL_OK) return report_status(s);
  if (json != nullptr) {
    std::fputs(json, stdout);
    tl_string_free(json);
  }
  if (verbose) {
    std::fprintf(stderr, "scenario %s: waypoints %s\n", tl_config_name(config.ptr),
                 success ? "reached" : "missed");
  }
  return success ? kExitOk : kExitWaypointsMissed;
}

int cmd_bandwidth(const std::string& config_path) {
  ConfigHandle config;
  if (tl_status s = tl_config_load(config_path.c_str(), &config.ptr)) return report_status(s);
  char* text = nullptr;
  if (tl_status s = tl_bandwidth_report(config.ptr, &text, nullptr)) return report_status(s);
  std::fputs(text, stdout);
  tl_string_free(text);
  return kExitOk;
}

int cmd_serve(const std::string& config_path, const std::string& host, uint16_t port,
              uint64_t seed, const std::string& record, double duration_s, bool verbose) {
  ConfigHandle config;
  if (tl_status s = tl_config_load(config_path.c_str(), &config.ptr)) return report_status(s);
  tl_server_options options;
  tl_server_options_default(&options);
  options.host = host.c_str();
  options.port = port;
  options.seed = seed;
  options.record_path = record.empty() ? nullptr : record.c_str();
  options.duration_ms = static_cast<int64_t>(duration_s * 1000.0);

  tl_server* server = nullptr;
  if (tl_status s = tl_server_create(config.ptr, &options, &server)) return report_status(s);
  if (verbose) {
    std::fprintf(stderr, "serving %s on ws://%s:%u\n", tl_config_name(config.ptr), host.c_str(),
                 static_cast<unsigned>(port));
  }
  const tl_status s = tl_server_run(server);
  tl_server_destroy(server);
  return s == TL_OK ? kExitOk : report_status(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"telelink: teleoperation link emulation, retargeting and locomotion", "telelink"};
  app.set_version_flag("--version", std::string(tl_version()));
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Progress notes on stderr");

  std::string config_path, trace, report, record, host = "127.0.0.1";
  uint64_t seed = 1;
  uint16_t port = 8765;
  double duration_s = 0.0;

  auto* run = app.add_subcommand("run", "Play an operator trace through a scenario");
  run->add_option("config", config_path, "Scenario config (.json optional)")->required();
  run->add_option("--trace", trace, "Operator trace file (required)");
  run->add_option("--report", report, "Write the JSON report here instead of stdout");
  run->add_option("--seed", seed, "Seed for link randomness")->capture_default_str();

  auto* bw = app.add_subcommand("bandwidth-report", "Print the stream budget of a config");
  bw->add_option("config", config_path, "Config (.json optional)")->required();

  auto* serve = app.add_subcommand("serve", "Serve the operator console websocket");
  serve->add_option("config", config_path, "Scenario config (.json optional)")->required();
  serve->add_option("--port", port, "TCP port, 0 for any")->capture_default_str();
  serve->add_option("--host", host, "Listen address")->capture_default_str();
  serve->add_option("--seed", seed, "Seed for link randomness")->capture_default_str();
  serve->add_option("--record", record, "Save the last session's inputs as a trace");
  serve->add_option("--duration", duration_s, "Stop after this many seconds (0: never)");

  app.require_subcommand(1);

  if (argc <= 1) {
    std::fputs(app.help().c_str(), stderr);
    return report_error("usage", "no command given", kExitUsage);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), kExitUsage);
  }

  if (run->parsed()) return cmd_run(config_path, trace, report, seed, verbose);
  if (bw->parsed()) return cmd_bandwidth(config_path);
  if (serve->parsed()) {
    return cmd_serve(config_path, host, port, seed, record, duration_s, verbose);
  }
  return report_error("usage", "no command given", kExitUsage);
}
