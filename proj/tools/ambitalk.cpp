#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "ambitalk/cli.hpp"

namespace {

using namespace ambitalk::cli;

// Writes to --out when given, else to the configured path, else stdout.
int emit(const std::optional<std::string> &path, const std::function<int(std::ostream &)> &body) {
  if (!path) return body(std::cout);
  std::ofstream file(*path);
  if (!file) throw ConfigError("/output/path", "cannot write '" + *path + "'");
  return body(file);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Cheap talk under ambiguous noise: equilibria, sweeps, channels, checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_path;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  int jobs = 1;

  auto common = [&](CLI::App *sub, bool config_required) {
    auto *opt = sub->add_option("--config", config_path, "JSON configuration file");
    if (config_required) opt->required();
    sub->add_option("--out", out_path, "Output path (default: output.path or stdout)");
    sub->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    sub->add_option("--seed", seed, "Overrides solver.seed");
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  };

  auto *solve = app.add_subcommand(
      "solve",
      "Efficient equilibrium report, one row per word. Columns: word,name,cell,mass,centroid,"
      "lambda_exante,lambda_interim,action_exante,action_interim,distance_exante,"
      "distance_interim,ratio,regular,regular_sufficient,kappa_hi,as_if_p,cutpoints,"
      "exante_loss,babbling_loss,interim_is_equilibrium,iterations");
  common(solve, true);

  SweepOptions sweep_opts;
  auto *sweep = app.add_subcommand(
      "sweep",
      "Equilibrium actions over a grid of error probabilities. Columns: p,exante_<word>...,"
      "interim_<word>...,exante_loss,babbling_loss,as_if_p");
  common(sweep, true);
  sweep->add_option("--from", sweep_opts.from, "First p")->capture_default_str();
  sweep->add_option("--to", sweep_opts.to, "Last p")->capture_default_str();
  sweep->add_option("--steps", sweep_opts.steps, "Number of grid points")->capture_default_str();
  sweep->add_option("--width", sweep_opts.width,
                    "Error interval width: p_lo = max(0, p - width), p_hi = p")
      ->capture_default_str();

  ChannelOptions channel_opts;
  auto *channel = app.add_subcommand(
      "channel",
      "Decomposes the q-ary symmetric channel into noisy-talk form. --out names a directory "
      "receiving shannon.csv and noisy_talk.csv (columns: sent,received,probability)");
  channel->add_option("--m", channel_opts.m, "Alphabet size minus one")->required();
  channel->add_option("--n", channel_opts.n, "Word length")->required();
  channel->add_option("--q", channel_opts.q, "Symbol error probability")->required();
  channel->add_option("--out", out_path, "Export directory");

  VerifyOptions verify_opts;
  auto *verify = app.add_subcommand(
      "verify",
      "Oracle agreement and invariant suites. Columns: suite,passed,cases,failures,worst,note");
  common(verify, false);
  verify->add_option("--instances", verify_opts.instances, "Seeded random instances")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  return guarded(
      [&]() -> int {
        if (*channel) {
          channel_opts.export_dir = out_path;
          return cmd_channel(channel_opts, std::cout);
        }
        std::optional<RunConfig> cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (cfg) {
          if (format) cfg->format = parse_format(*format);
          if (seed) cfg->search.seed = *seed;
        }
        const auto path = out_path ? out_path : (cfg ? cfg->out_path : std::nullopt);
        if (*solve) return emit(path, [&](std::ostream &os) { return cmd_solve(*cfg, os); });
        if (*sweep) {
          sweep_opts.jobs = jobs;
          return emit(path, [&](std::ostream &os) { return cmd_sweep(*cfg, sweep_opts, os); });
        }
        if (format) verify_opts.format = parse_format(*format);
        else if (cfg) verify_opts.format = cfg->format;
        if (seed) verify_opts.seed = *seed;
        else if (cfg) verify_opts.seed = cfg->search.seed;
        return emit(out_path, [&](std::ostream &os) { return cmd_verify(cfg, verify_opts, os); });
      },
      std::cerr);
}
