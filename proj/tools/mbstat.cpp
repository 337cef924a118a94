// mbstat: market-based price statistics over trade tapes.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using mbstat::cli::RunConfig;

void add_tape_options(CLI::App& cmd, RunConfig& cfg) {
  static const std::map<std::string, mbstat::CsvFormat> formats{
      {"tick-value-volume", mbstat::CsvFormat::tick_value_volume},
      {"tick-price-volume", mbstat::CsvFormat::tick_price_volume}};
  cmd.add_option("--input", cfg.input, "Input CSV ('-' for stdin)")->capture_default_str();
  cmd.add_option("--output", cfg.output, "Output path ('-' for stdout)")->capture_default_str();
  cmd.add_option("--format", cfg.format, "Input column layout")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
      ->default_str("tick-value-volume");
  cmd.add_option("--epsilon", cfg.epsilon, "Seconds per grid tick")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_window_options(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--window-n", cfg.window.n, "Window width in ticks (odd)")->required();
  cmd.add_option("--lag-step", cfg.window.lag_step, "Stride between window centers in ticks")->capture_default_str();
  cmd.add_option("--min-trades", cfg.window.min_trades, "Minimum trades for a valid window")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Market-based price moments and autocorrelation over trade tapes"};
  app.set_config("--config", "", "Config file (flags on the command line win)");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::optional<unsigned> threads;
  app.add_option("--threads", threads, "Worker threads (fallback: MBSTAT_THREADS)")->check(CLI::PositiveNumber);

  auto* stats = app.add_subcommand("stats", "Per-window moment reports as JSON lines");
  add_tape_options(*stats, cfg);
  add_window_options(*stats, cfg);
  stats->add_option("--max-order", cfg.max_order, "Highest moment order (cap 8)")->capture_default_str();

  auto* compare = app.add_subcommand("compare", "Frequency vs market-based price moments per window");
  add_tape_options(*compare, cfg);
  add_window_options(*compare, cfg);
  compare->add_option("--max-order", cfg.max_order, "Highest moment order (cap 8)")->capture_default_str();

  static const std::map<std::string, mbstat::Aggregate> aggregates{{"per-center", mbstat::Aggregate::per_center},
                                                                   {"mean", mbstat::Aggregate::mean}};
  auto* acf = app.add_subcommand("acf", "Autocorrelation curves B_C, B_U, B_p");
  add_tape_options(*acf, cfg);
  add_window_options(*acf, cfg);
  acf->add_option("--max-lag", cfg.max_lag, "Largest lag in ticks (multiple of --lag-step)")->required();
  acf->add_option("--aggregate", cfg.aggregate, "per-center or mean")
      ->transform(CLI::CheckedTransformer(aggregates, CLI::ignore_case))
      ->default_str("per-center");
  acf->add_option("--threshold", cfg.threshold, "Relative threshold for scale detection")->capture_default_str();
  acf->add_option("--csv-output", cfg.csv_output, "Flat CSV path (default <output>.csv)");

  static const std::map<std::string, mbstat::SynthMode> modes{{"pv", mbstat::SynthMode::price_volume},
                                                              {"vv", mbstat::SynthMode::value_volume}};
  auto* synth = app.add_subcommand("synth", "Generate a synthetic tape");
  synth->add_option("--output", cfg.output, "Output path ('-' for stdout)")->capture_default_str();
  synth->add_option("--mode", cfg.synth.mode, "pv: price & volume, vv: value & volume")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case))
      ->default_str("pv");
  synth->add_option("--len", cfg.synth.length_ticks, "Length in ticks")->capture_default_str();
  synth->add_option("--tau-a", cfg.synth.persistence_a, "E-folding scale of process a")->capture_default_str();
  synth->add_option("--tau-b", cfg.synth.persistence_b, "E-folding scale of process b")->capture_default_str();
  synth->add_option("--sigma-a", cfg.synth.sigma_a, "Stationary std-dev of log a")->capture_default_str();
  synth->add_option("--sigma-b", cfg.synth.sigma_b, "Stationary std-dev of log b")->capture_default_str();
  synth->add_option("--mean-a", cfg.synth.mean_a, "Mean of log a")->capture_default_str();
  synth->add_option("--mean-b", cfg.synth.mean_b, "Mean of log b")->capture_default_str();
  synth->add_option("--seed", cfg.synth.seed, "PRNG seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  cfg.threads = mbstat::cli::resolve_threads(threads);

  try {
    if (synth->parsed()) return mbstat::cli::run_synth(cfg, std::cout, std::cerr);
    const mbstat::TradeTape tape = mbstat::cli::load_tape(cfg);
    if (stats->parsed()) return mbstat::cli::run_stats(cfg, tape, std::cout, std::cerr);
    if (compare->parsed()) return mbstat::cli::run_compare(cfg, tape, std::cout, std::cerr);
    if (acf->parsed()) return mbstat::cli::run_acf(cfg, tape, std::cout, std::cerr);
  } catch (const mbstat::NoDataError& e) {
    std::cerr << "mbstat: no data: " << e.what() << '\n';
    return 3;
  } catch (const mbstat::ParseError& e) {
    std::cerr << "mbstat: parse error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mbstat: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
