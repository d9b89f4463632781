// Batch front end: floqflow <command> [--config FILE] [--out DIR] [--threads N]
//                                     [--override KEY=VALUE]...
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "floqflow/config.hpp"
#include "floqflow/errors.hpp"
#include "floqflow/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config;
  std::string out;
  int threads = 0;
  std::vector<std::string> overrides;
  bool quiet = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet flow-renormalization experiments"};
  app.set_version_flag("--version", std::string(floqflow::version()) + " (" +
                                        std::string(floqflow::git_hash()) + ")");
  app.require_subcommand(1);

  const std::map<std::string, std::string> about = {
      {"oscillator", "driven oscillator flow: freezing scan of |B0| over A/Omega"},
      {"scan-freezing", "spin-chain P(lambda_c) scan over A/Omega with refined minima"},
      {"frequency-scaling", "P, Q and Magnus distance at FP1 over a list of Omega"},
      {"thermalize", "long flows: lambda_min, ||H1|| peaks and instanton fits"},
      {"dynamics", "Floquet unitary: quasienergy errors and entropy series"}};

  Options opt;
  for (const auto& name : floqflow::known_commands()) {
    auto* sub = app.add_subcommand(name, about.count(name) ? about.at(name) : "");
    sub->add_option("--config", opt.config, "JSON config merged over the defaults")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (default: out/<command>)");
    sub->add_option("--threads", opt.threads, "worker threads (overrides config 'threads')")
        ->check(CLI::PositiveNumber);
    sub->add_option("--override", opt.overrides, "KEY=VALUE with a dotted key, repeatable");
    sub->add_flag("--quiet", opt.quiet, "suppress progress lines");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    auto cfg = floqflow::ExperimentConfig::defaults(command);
    if (!opt.config.empty()) cfg.merge_file(opt.config);
    for (const auto& o : opt.overrides) cfg.apply_override(o);

    floqflow::RunContext ctx;
    ctx.out_dir = opt.out.empty() ? std::filesystem::path("out") / command
                                  : std::filesystem::path(opt.out);
    ctx.threads = opt.threads > 0 ? opt.threads : cfg.integer("threads");
    if (ctx.threads < 1) throw floqflow::ConfigError("threads must be >= 1");
    ctx.log = opt.quiet ? nullptr : &std::cerr;

    const auto manifest = floqflow::run_command(cfg, ctx);
    std::cout << manifest.at("results").dump(2) << '\n';
    return 0;
  } catch (const floqflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const floqflow::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
