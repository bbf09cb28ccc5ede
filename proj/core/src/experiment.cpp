#include "simmatch/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <future>

#include <nlohmann/json.hpp>

#include "simmatch/csv.hpp"
#include "simmatch/errors.hpp"
#include "simmatch/svg.hpp"

namespace simmatch {

namespace fs = std::filesystem;

bool ExperimentResult::ok() const {
  for (const auto& r : runs) {
    if (r.failure) return false;
  }
  return true;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::vector<Sample>* replay) {
  cfg.validate();
  StreamGenerator gen(cfg.stream);
  const StreamReference reference = StreamReference::from(gen);

  std::vector<Sample> recorded;
  if (replay) {
    if (static_cast<std::int64_t>(replay->size()) != cfg.iterations) {
      throw InvalidInput("experiment: replay has " + std::to_string(replay->size()) + " samples, config expects " +
                         std::to_string(cfg.iterations));
    }
    for (std::size_t i = 0; i < replay->size(); ++i) {
      if ((*replay)[i].t != static_cast<std::int64_t>(i) || (*replay)[i].x.size() != cfg.stream.dim) {
        throw InvalidInput("experiment: replay row " + std::to_string(i) + " does not match the schedule");
      }
    }
  } else {
    recorded = gen.take(cfg.iterations);
  }
  const std::vector<Sample>& stream = replay ? *replay : recorded;
  const std::vector<Eigen::VectorXd> track = input_spectrum_track(stream, cfg.window, cfg.snapshot_period);

  ExperimentResult out;
  out.config = cfg;
  out.truth = reference.truth();
  for (const auto& spec : cfg.networks) {
    NetworkRun run;
    const ResolvedAlpha a = resolve_alpha(spec, reference.truth().eigenvalues);
    run.config.n = cfg.stream.dim;
    run.config.k = spec.k;
    run.config.alpha = a.alpha;
    run.config.eta = spec.eta;
    run.config.beta = spec.beta;
    run.config.kind = spec.kind;
    run.config.dynamics_tol = spec.tol;
    run.config.dynamics_max_iters = spec.max_iters;
    run.config.init_seed = spec.init_seed;
    run.alpha_derivation = a.derivation;
    out.runs.push_back(std::move(run));
  }

  RunOptions options;
  options.snapshot_period = cfg.snapshot_period;
  options.window = cfg.window;
  options.reference = &reference;
  options.input_track = &track;
  options.keep_outputs = false;

  std::vector<std::future<void>> jobs;
  for (auto& run : out.runs) {
    jobs.push_back(std::async(std::launch::async, [&run, &stream, &options] {
      try {
        run.result = run_stream(run.config, stream, options);
      } catch (const RunFailure& e) {
        run.failure = e.what();
        run.failure_iteration = e.iteration();
        run.result.log = e.partial_log();
      }
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

namespace {

nlohmann::json provenance(const ExperimentResult& result) {
  nlohmann::json doc;
  doc["config"] = nlohmann::json::parse(to_canonical_json(result.config));
  nlohmann::json truth = nlohmann::json::array();
  for (Eigen::Index i = 0; i < result.truth.eigenvalues.size(); ++i) truth.push_back(result.truth.eigenvalues(i));
  doc["ground_truth_eigenvalues"] = truth;
  nlohmann::json nets = nlohmann::json::array();
  for (const auto& run : result.runs) {
    nlohmann::json n = {{"kind", std::string(to_string(run.config.kind))},
                        {"alpha", run.config.alpha},
                        {"alpha_derivation", run.alpha_derivation},
                        {"k", run.config.k},
                        {"eta", run.config.eta},
                        {"beta", run.config.beta},
                        {"nonconverged_steps", run.result.nonconverged_steps},
                        {"snapshots", run.result.log.records.size()},
                        {"status", run.failure ? "failed" : "ok"}};
    if (run.failure) {
      n["failure"] = *run.failure;
      n["failure_iteration"] = run.failure_iteration;
    }
    nets.push_back(std::move(n));
  }
  doc["networks"] = nets;
  return doc;
}

}  // namespace

std::vector<std::string> write_experiment_outputs(const ExperimentResult& result, const std::string& dir, bool svg) {
  fs::create_directories(dir);
  std::vector<std::string> written;
  auto open = [&](const std::string& name) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot write '" + path + "'");
    written.push_back(path);
    return f;
  };

  for (const auto& run : result.runs) {
    const std::string kind(to_string(run.config.kind));
    {
      std::ofstream f = open(kind + ".csv");
      write_metrics_csv(f, run.result.log);
    }
    if (svg && !run.result.log.empty()) {
      svg::LinePlot plot;
      plot.title = kind + " (alpha = " + csv::format(run.config.alpha) + ")";
      plot.x_label = "iteration";
      plot.y_label = "windowed output eigenvalue";
      for (int c = 0; c < run.config.k; ++c) plot.series.push_back({"y" + std::to_string(c + 1), {}});
      for (const auto& rec : run.result.log.records) {
        plot.x.push_back(static_cast<double>(rec.t));
        for (int c = 0; c < run.config.k; ++c) {
          plot.series[c].y.push_back(c < rec.output_spectrum.size() ? rec.output_spectrum(c) : 0.0);
        }
      }
      std::ofstream f = open(kind + ".svg");
      svg::write_line_plot(f, plot);
    }
  }
  std::ofstream f = open("provenance.json");
  f << provenance(result).dump(2) << "\n";
  return written;
}

}  // namespace simmatch
