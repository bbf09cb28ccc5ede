#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "simmatch/analysis.hpp"
#include "simmatch/csv.hpp"
#include "simmatch/errors.hpp"
#include "simmatch/experiment.hpp"
#include "simmatch/offline.hpp"
#include "simmatch/svg.hpp"

namespace simmatch::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::string field;
  std::istringstream in(text);
  while (std::getline(in, field, ',')) {
    try {
      values.push_back(csv::parse_double(field));
    } catch (const std::exception&) {
      throw UsageError("malformed number '" + field + "' in list '" + text + "'");
    }
  }
  if (values.empty()) throw UsageError("empty list");
  return values;
}

RegularizerKind parse_kind(const std::string& name) {
  try {
    return parse_regularizer(name);
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
}

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string config;
  std::string scenario = "stationary";
  std::optional<std::int64_t> iterations;
};

void add_scenario_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Experiment config (JSON)");
  cmd->add_option("--scenario", c.scenario, "Built-in protocol when no config is given")
      ->check(CLI::IsMember({"stationary", "nonstationary"}));
  cmd->add_option("--seed", c.seed, "Override the stream seed (network init uses seed + 1)");
  cmd->add_option("--iterations", c.iterations, "Override the number of samples");
  cmd->add_option("--out-dir", c.out_dir, "Output directory");
}

ExperimentConfig resolve_config(const Common& c) {
  ExperimentConfig cfg = !c.config.empty()                ? load_config(c.config)
                         : c.scenario == "nonstationary" ? nonstationary_config()
                                                         : stationary_config();
  if (c.seed) {
    cfg.stream.seed = *c.seed;
    for (auto& n : cfg.networks) n.init_seed = *c.seed + 1;
  }
  if (c.iterations) cfg.iterations = *c.iterations;
  if (!c.out_dir.empty()) cfg.output_dir = c.out_dir;
  cfg.validate();
  return cfg;
}

int cmd_offline(const std::string& kind, const std::string& spectrum, double alpha, int k, std::int64_t samples,
                std::ostream& out) {
  std::vector<double> values = parse_list(spectrum);
  std::sort(values.begin(), values.end(), std::greater<>());
  OfflineProblem p;
  p.input_eigenvalues = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  p.k = k;
  p.alpha = alpha;
  p.kind = parse_kind(kind);
  p.samples = samples;
  try {
    p.validate();
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  const OfflineSolution s = solve(p);
  for (Eigen::Index i = 0; i < s.output_eigenvalues.size(); ++i) out << csv::format(s.output_eigenvalues(i)) << ' ';
  out << "(rank " << s.rank << ")\n";
  return 0;
}

int cmd_stream(const Common& c, std::ostream& out) {
  const ExperimentConfig cfg = resolve_config(c);
  StreamGenerator gen(cfg.stream);
  const std::vector<Sample> samples = gen.take(cfg.iterations);
  if (c.out_dir.empty()) {
    write_stream_csv(out, samples);
  } else {
    fs::create_directories(c.out_dir);
    std::ofstream f(fs::path(c.out_dir) / "stream.csv", std::ios::binary);
    write_stream_csv(f, samples);
    out << "wrote " << (fs::path(c.out_dir) / "stream.csv").string() << "\n";
  }
  return 0;
}

int cmd_experiment(const Common& c, const std::string& replay_path, bool svg, std::ostream& out,
                   std::ostream& err) {
  const ExperimentConfig cfg = resolve_config(c);
  std::vector<Sample> replay;
  if (!replay_path.empty()) {
    std::ifstream f(replay_path);
    if (!f) throw UsageError("cannot open replay file '" + replay_path + "'");
    replay = read_stream_csv(f);
  }
  const ExperimentResult result = run_experiment(cfg, replay_path.empty() ? nullptr : &replay);
  write_experiment_outputs(result, cfg.output_dir, svg);
  for (const auto& run : result.runs) {
    out << to_string(run.config.kind) << " alpha=" << csv::format(run.config.alpha);
    if (run.failure) {
      out << " FAILED at iteration " << run.failure_iteration << "\n";
      err << "error: " << to_string(run.config.kind) << " network failed at iteration " << run.failure_iteration
          << ": " << *run.failure << "\n";
      continue;
    }
    const MetricsRecord& last = run.result.log.records.back();
    out << " t=" << last.t << " rank=" << last.rank << " spectrum=";
    for (Eigen::Index i = 0; i < last.output_spectrum.size(); ++i) {
      out << (i ? "," : "") << csv::format(last.output_spectrum(i));
    }
    out << " eigenvalue_error=" << csv::format(last.eigenvalue_error)
        << " subspace_error=" << csv::format(last.subspace_error) << "\n";
  }
  out << "outputs in " << cfg.output_dir << "\n";
  return result.ok() ? 0 : 1;
}

struct PhaseArgs {
  std::vector<std::string> kinds;
  double step = 0.01;
  int n1 = 1;
  int n2 = 1;
  int points_per_decade = 50;
  std::string out_dir = "results/phase";
  bool svg = false;
};

int cmd_phase(const PhaseArgs& a, std::ostream& out) {
  std::vector<RegularizerKind> kinds;
  for (const auto& k : a.kinds) kinds.push_back(parse_kind(k));
  if (kinds.empty()) kinds.assign(kAllRegularizers.begin(), kAllRegularizers.end());
  if (!(a.step > 0.0 && a.step <= 1.0)) throw UsageError("--step must be in (0, 1]");
  if (a.n1 < 1 || a.n2 < 1) throw UsageError("--n1 and --n2 must be >= 1");
  if (a.points_per_decade < 1) throw UsageError("--points-per-decade must be >= 1");

  const std::vector<SignalNoisePair> grid = signal_noise_grid(a.step);
  const std::vector<SignalNoisePair> pairs = gapped_pairs(grid);
  if (pairs.empty()) throw UsageError("grid step leaves no pair with a > b");

  std::vector<double> ratios;
  for (int i = 1; i <= 99; ++i) ratios.push_back(i / 100.0);

  fs::create_directories(a.out_dir);
  std::ofstream curves(fs::path(a.out_dir) / "fraction_curves.csv", std::ios::binary);
  std::ofstream diagram(fs::path(a.out_dir) / "phase_diagram.csv", std::ios::binary);
  curves << "kind,alpha,signal_fraction,noise_fraction,separates\n";
  diagram << "kind,ratio,alpha_low,alpha_high\n";

  out << "grid: " << grid.size() << " pairs, " << pairs.size() << " with a > b\n";
  for (RegularizerKind kind : kinds) {
    const std::string name(to_string(kind));
    const std::vector<double> alphas = sweep_alphas(kind, pairs, a.n1, a.n2, 1e-3, 1e3, a.points_per_decade);
    const std::vector<FractionPoint> curve = fraction_curve(kind, pairs, a.n1, a.n2, alphas);
    std::size_t separating = 0;
    double first = 0.0, last = 0.0;
    for (const auto& p : curve) {
      curves << csv::join({name, csv::format(p.alpha), csv::format(p.signal_fraction), csv::format(p.noise_fraction),
                           p.separates() ? "1" : "0"})
             << "\n";
      if (p.separates()) {
        if (separating++ == 0) first = p.alpha;
        last = p.alpha;
      }
    }
    const std::vector<PhasePoint> phase = phase_diagram(kind, ratios, a.n1, a.n2);
    for (const auto& p : phase) {
      diagram << csv::join({name, csv::format(p.ratio), csv::format(p.range.low), csv::format(p.range.high)}) << "\n";
    }
    out << name << ": " << separating << " of " << curve.size() << " alphas separate";
    if (separating) out << " (from " << csv::format(first) << " to " << csv::format(last) << ")";
    out << "\n";

    if (a.svg) {
      svg::LinePlot plot;
      plot.title = name + ": fraction of (a, b) pairs";
      plot.x_label = "alpha";
      plot.y_label = "fraction";
      plot.log_x = true;
      plot.series = {{"all signal", {}}, {"all noise", {}}};
      for (const auto& p : curve) {
        if (p.alpha <= 0.0) continue;
        plot.x.push_back(p.alpha);
        plot.series[0].y.push_back(p.signal_fraction);
        plot.series[1].y.push_back(p.noise_fraction);
      }
      std::ofstream f(fs::path(a.out_dir) / (name + ".svg"), std::ios::binary);
      svg::write_line_plot(f, plot);
    }
  }
  out << "outputs in " << a.out_dir << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Similarity-matching networks: offline solvers, streams, experiments, phase sweeps", "simmatch"};
  app.require_subcommand(1);

  std::string kind, spectrum;
  double alpha = 0.0;
  int k = 1;
  std::int64_t samples = 1;
  auto* offline = app.add_subcommand("offline", "Solve the offline problem on an input spectrum");
  offline->add_option("--kind", kind, "scale-dependent | input-output | squared-output")->required();
  offline->add_option("--spectrum", spectrum, "Comma-separated input eigenvalues")->required();
  offline->add_option("--alpha", alpha, "Regularization coefficient")->required();
  offline->add_option("--k", k, "Output dimension")->required();
  offline->add_option("--samples", samples, "Sample count T");

  Common stream_args;
  auto* stream = app.add_subcommand("stream", "Write a generated input stream as CSV");
  add_scenario_flags(stream, stream_args);

  Common exp_args;
  std::string replay;
  bool exp_svg = false;
  auto* experiment = app.add_subcommand("experiment", "Run the online networks on a stream");
  add_scenario_flags(experiment, exp_args);
  experiment->add_option("--replay", replay, "Stream CSV to replay instead of generating");
  experiment->add_flag("--svg", exp_svg, "Also write SVG plots");

  PhaseArgs phase_args;
  auto* phase = app.add_subcommand("phase", "Sweep alpha over the signal/noise grid");
  phase->add_option("--kind", phase_args.kinds, "Regularizers to sweep (repeatable; default all)");
  phase->add_option("--step", phase_args.step, "Grid step for a and b");
  phase->add_option("--n1", phase_args.n1, "Signal multiplicity");
  phase->add_option("--n2", phase_args.n2, "Noise multiplicity");
  phase->add_option("--points-per-decade", phase_args.points_per_decade, "Log-grid density");
  phase->add_option("--out-dir", phase_args.out_dir, "Output directory");
  phase->add_flag("--svg", phase_args.svg, "Also write SVG plots");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << "run 'simmatch --help' for usage\n";
    return 2;
  }

  try {
    if (*offline) return cmd_offline(kind, spectrum, alpha, k, samples, out);
    if (*stream) return cmd_stream(stream_args, out);
    if (*experiment) return cmd_experiment(exp_args, replay, exp_svg, out, err);
    if (*phase) return cmd_phase(phase_args, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace simmatch::cli
