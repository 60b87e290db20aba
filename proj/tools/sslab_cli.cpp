// Copyright 2026 The sslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// sslab: command-line front end. Every subcommand takes --config FILE plus
// one --KEY VALUE flag per config key; flags override the file.

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sslab/harness.hpp"

namespace {

using Command = std::function<int(const sslab::Config&, std::ostream&)>;

struct Subcommand {
  const char* name;
  const char* help;
  Command run;
};

const std::vector<Subcommand>& Subcommands() {
  namespace h = sslab::harness;
  static const std::vector<Subcommand> all = {
      {"gen", "write a synthetic host signal", h::CmdGen},
      {"embed", "embed a random message with alpha* from the game", h::CmdEmbed},
      {"attack", "apply an attack to an embedded signal", h::CmdAttack},
      {"extract", "MAP-decode a signal file", h::CmdExtract},
      {"optimize", "solve or calibrate the game on the profile model", h::CmdOptimize},
      {"sweep-domains", "attack regimes and costs over an (alpha, sigma_X) grid", h::CmdSweepDomains},
      {"sweep-alpha", "alpha* with and without post-filter over sigma_X", h::CmdSweepAlpha},
      {"sweep-attack", "Eb/N0 of three schemes over attack strength", h::CmdSweepAttack},
      {"image-embed", "embed into the Haar detail coefficients of a PGM", h::CmdImageEmbed},
      {"image-extract", "decode a message from a PGM", h::CmdImageExtract},
      {"oracle-check", "compare closed forms with brute-force oracles", h::CmdOracleCheck},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sslab: spread-spectrum watermarking game lab"};
  app.require_subcommand(1);
  const auto schema = sslab::harness::Schema();

  struct Bound {
    CLI::App* app;
    std::string config_path;
    std::map<std::string, std::string> flags;
  };
  std::vector<Bound> bound(Subcommands().size());
  for (std::size_t k = 0; k < Subcommands().size(); ++k) {
    const auto& sc = Subcommands()[k];
    Bound& b = bound[k];
    b.app = app.add_subcommand(sc.name, sc.help);
    b.app->add_option("--config", b.config_path, "key=value config file");
    for (const auto& key : schema) {
      std::string help = key.help;
      if (!key.default_value.empty()) help += " (default " + key.default_value + ")";
      b.app->add_option("--" + key.name, b.flags[key.name], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  for (std::size_t k = 0; k < bound.size(); ++k) {
    Bound& b = bound[k];
    if (!b.app->parsed()) continue;
    try {
      sslab::Config cfg = sslab::harness::DefaultConfig();
      if (!b.config_path.empty()) cfg.ParseFile(b.config_path);
      for (const auto& key : schema) {
        if (b.app->count("--" + key.name) > 0) cfg.Set(key.name, b.flags[key.name]);
      }
      const std::string out_path = cfg.GetString("output");
      if (out_path.empty() || out_path == "-") return Subcommands()[k].run(cfg, std::cout);
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
      return Subcommands()[k].run(cfg, out);
    } catch (const std::exception& e) {
      std::cerr << "sslab " << Subcommands()[k].name << ": error: " << e.what() << '\n';
      return 3;
    }
  }
  return 3;
}
