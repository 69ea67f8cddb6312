#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <optional>
#include <ostream>

#include "commands.hpp"
#include "qkd3/errors.hpp"

namespace qkd3::cli {

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> rounds;
  std::string out_dir;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Config file of `key = value` lines");
  cmd->add_option("--seed", flags.seed, "Random seed (overrides the config file)");
  cmd->add_option("--rounds", flags.rounds, "Number of rounds (overrides the config file)");
  cmd->add_option("--out", flags.out_dir, "Directory for transcripts and key files");
  cmd->add_option("--set", flags.overrides, "Extra `key=value` override, repeatable");
}

RunConfig effective_config(const CommonFlags& flags) {
  RunConfig config;
  if (!flags.config_path.empty()) config = load_config(flags.config_path);
  for (const auto& kv : flags.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + kv + "'");
    apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (flags.seed) config.seed = *flags.seed;
  if (flags.rounds) config.n_rounds = *flags.rounds;
  config.validate();
  return config;
}

std::optional<std::filesystem::path> out_dir(const CommonFlags& flags) {
  if (flags.out_dir.empty()) return std::nullopt;
  return std::filesystem::path(flags.out_dir);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Qutrit entanglement key distribution toolkit", "qkd3"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string text;
  std::string key_file;
  std::string path_a;
  std::string path_b;

  auto* bell = app.add_subcommand("bell", "Exact and optimized S3 for the configured state");
  add_common(bell, flags);
  auto* optimize = app.add_subcommand("optimize", "Joint state and settings search for the largest S3");
  add_common(optimize, flags);
  auto* simulate = app.add_subcommand("simulate", "Run a full key distribution session");
  add_common(simulate, flags);
  auto* sift_cmd = app.add_subcommand("sift", "Post-process a recorded round transcript");
  add_common(sift_cmd, flags);
  sift_cmd->add_option("transcript", path_a, "Transcript file")->required();
  auto* reconcile = app.add_subcommand("reconcile", "Parity-block reconciliation of two key files");
  add_common(reconcile, flags);
  reconcile->add_option("key_a", path_a, "Key file of A")->required();
  reconcile->add_option("key_b", path_b, "Key file of B")->required();
  auto* enc = app.add_subcommand("encrypt", "Encode and encrypt a message with a trit key");
  add_common(enc, flags);
  enc->add_option("text", text, "Message (A-Z and space)")->required();
  enc->add_option("--key", key_file, "Key file")->required();
  auto* dec = app.add_subcommand("decrypt", "Decrypt and decode a trit cipher");
  add_common(dec, flags);
  dec->add_option("cipher", text, "Cipher trits; spaces between groups are ignored")->required();
  dec->add_option("--key", key_file, "Key file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  try {
    const auto dir = out_dir(flags);
    std::optional<Report> report;
    if (bell->parsed()) {
      report = cmd_bell(effective_config(flags));
    } else if (optimize->parsed()) {
      report = cmd_optimize(effective_config(flags));
    } else if (simulate->parsed()) {
      report = cmd_simulate(effective_config(flags), dir);
    } else if (sift_cmd->parsed()) {
      report = cmd_sift(path_a, dir);
    } else if (reconcile->parsed()) {
      report = cmd_reconcile(path_a, path_b, dir);
    } else if (enc->parsed()) {
      report = cmd_encrypt(text, key_file);
    } else if (dec->parsed()) {
      report = cmd_decrypt(text, key_file);
    }
    report->print(out);
    return kExitOk;
  } catch (const InsufficientDataError& e) {
    err << "insufficient data: " << e.what() << '\n';
    return kExitInsufficientData;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace qkd3::cli
