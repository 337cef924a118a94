#pragma once

// Subcommand bodies for the mbstat tool, kept separate from argument parsing
// so tests can drive them with in-memory streams.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>

#include "mbstat/io.hpp"
#include "mbstat/lagstats.hpp"
#include "mbstat/moments.hpp"
#include "mbstat/parallel.hpp"
#include "mbstat/synth.hpp"
#include "mbstat/tape.hpp"
#include "mbstat/windows.hpp"

namespace mbstat::cli {

struct RunConfig {
  std::string input = "-";
  std::string output = "-";
  std::string csv_output;  // acf only; defaults to <output>.csv when output is a file
  CsvFormat format = CsvFormat::tick_value_volume;
  double epsilon = 1.0;
  WindowSpec window;
  int max_order = 4;
  Tick max_lag = 0;
  Aggregate aggregate = Aggregate::per_center;
  double threshold = 0.05;
  unsigned threads = 1;
  SynthParams synth;
};

/// --threads wins; otherwise MBSTAT_THREADS; otherwise 1.
inline unsigned resolve_threads(std::optional<unsigned> flag) {
  if (flag) return std::max(1u, *flag);
  if (const char* env = std::getenv("MBSTAT_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

inline TradeTape load_tape(const RunConfig& cfg) {
  if (cfg.input == "-") return parse_csv(std::cin, cfg.format, cfg.epsilon);
  std::ifstream in(cfg.input);
  if (!in) throw Error("cannot open input '" + cfg.input + "'");
  return parse_csv(in, cfg.format, cfg.epsilon);
}

/// Writes `text` to `path`, or to `fallback` when path is "-".
inline void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path == "-" || path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

inline std::vector<MomentReport> window_reports(const TradeTape& tape, const RunConfig& cfg, Json& summary) {
  if (cfg.max_order < 1 || cfg.max_order > kDefaultMaxOrder) {
    throw DomainError("--max-order must lie in [1, " + std::to_string(kDefaultMaxOrder) + "]");
  }
  if (tape.empty()) throw NoDataError("tape has no trades");
  const auto planned = plan_windows(tape, cfg.window);
  std::vector<Window> valid;
  Json invalid = Json::array();
  for (const auto& w : planned) {
    if (w.valid) {
      valid.push_back(w);
    } else {
      invalid.push_back(w.center);
    }
  }
  if (valid.empty()) throw NoDataError("no valid windows (tape span shorter than the window or below min-trades)");
  std::vector<MomentReport> reports(valid.size());
  parallel_for(valid.size(), cfg.threads, [&](std::size_t i) {
    reports[i] = make_report(valid[i], members(valid[i], tape), cfg.max_order);
  });
  std::size_t negative = 0;
  for (const auto& r : reports) negative += r.volatility_negative() ? 1 : 0;
  summary = Json{{"windows_planned", planned.size()},
                 {"windows_reported", reports.size()},
                 {"invalid_centers", std::move(invalid)},
                 {"negative_volatility_windows", negative}};
  return reports;
}

inline void emit_summary(std::ostream& err, const std::string& command, Json summary) {
  Json doc{{"summary", command}};
  for (auto& [k, v] : summary.items()) doc[k] = v;
  err << doc.dump() << '\n';
}

inline int run_stats(const RunConfig& cfg, const TradeTape& tape, std::ostream& out, std::ostream& err) {
  Json summary;
  const auto reports = window_reports(tape, cfg, summary);
  std::string text;
  for (const auto& r : reports) {
    text += to_json(r).dump();
    text += '\n';
  }
  write_text(cfg.output, text, out);
  emit_summary(err, "stats", std::move(summary));
  return 0;
}

inline int run_compare(const RunConfig& cfg, const TradeTape& tape, std::ostream& out, std::ostream& err) {
  Json summary;
  const auto reports = window_reports(tape, cfg, summary);
  std::string text = kCompareHeader;
  for (const auto& r : reports) text += compare_rows(r);
  write_text(cfg.output, text, out);
  emit_summary(err, "compare", std::move(summary));
  return 0;
}

inline int run_acf(const RunConfig& cfg, const TradeTape& tape, std::ostream& out, std::ostream& err) {
  if (tape.empty()) throw NoDataError("tape has no trades");
  AcfOptions opts;
  opts.max_lag = cfg.max_lag;
  opts.aggregate = cfg.aggregate;
  opts.threshold = cfg.threshold;
  opts.threads = cfg.threads;
  const AcfCurve curve = acf_curve(tape, cfg.window, opts);

  write_text(cfg.output, to_json(curve).dump(1) + "\n", out);
  std::string csv_path = cfg.csv_output;
  if (csv_path.empty() && cfg.output != "-" && !cfg.output.empty()) csv_path = cfg.output + ".csv";
  if (!csv_path.empty()) write_text(csv_path, to_csv(curve), out);

  std::size_t empty_points = 0;
  for (const auto& c : curve.curves) {
    for (const auto& p : c.points) empty_points += p.has_data() ? 0 : 1;
  }
  emit_summary(err, "acf",
               Json{{"windows_planned", curve.windows_planned},
                    {"invalid_centers", curve.invalid_centers},
                    {"curves", curve.curves.size()},
                    {"points_without_pairs", empty_points}});
  return 0;
}

inline int run_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const TradeTape tape = gen_tape(cfg.synth);
  write_text(cfg.output, emit_csv(tape), out);
  emit_summary(err, "synth", Json{{"ticks", tape.size()}, {"seed", cfg.synth.seed}});
  return 0;
}

}  // namespace mbstat::cli
