#pragma once

#include <map>
#include <string>

#include "bergman/io.hpp"

namespace bergman {

enum ExitStatus { kExitOk = 0, kExitInternal = 1, kExitSchema = 2, kExitAccuracy = 3 };

struct Outputs {
  json report;                               // always written as <stem>.json
  std::map<std::string, std::string> tables; // suffix -> CSV text, written as <stem><suffix>.csv
};

// Validates the whole config, then computes. Throws ConfigError on schema
// problems (before any computation) and lets AccuracyError through; in that
// case `out` holds whatever was finished.
void run_experiment(const std::string& command, const json& config, Outputs& out);

// run_experiment plus file output and exit-status mapping
int run(const std::string& command, const json& config, const std::string& out_dir, std::ostream& log);

// bergman-lab <command> --config <file> [--out <dir>] [--threads N]
int run_cli(int argc, char** argv);

}  // namespace bergman
