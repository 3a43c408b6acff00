#include "freqsde/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "freqsde/errors.hpp"

namespace freqsde {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class StageTimer {
 public:
  explicit StageTimer(std::map<std::string, double>& sink) : sink_(sink) {}
  template <typename F>
  auto time(const std::string& name, F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      sink_[name] = seconds_since(t0);
    } else {
      auto result = f();
      sink_[name] = seconds_since(t0);
      return result;
    }
  }

 private:
  static double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
  }
  std::map<std::string, double>& sink_;
};

// Deterministic "samples" of the analytic mixture for W1 against an
// empirical set: quantiles at mid-uniform levels.
std::vector<double> mixture_quantile_samples(const FrequencyMixture& mix,
                                             double t, std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double alpha = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    out.push_back(mixture_quantile(mix, t, alpha));
  }
  return out;
}

void append_distribution_metrics(std::vector<MetricRow>& rows,
                                 const std::string& prefix,
                                 const FrequencyMixture& mix,
                                 const McsResult& mcs,
                                 const std::vector<double>& times,
                                 const std::vector<double>& alphas) {
  for (double t : times) {
    std::size_t ci = mcs.capture_index(t);
    const auto& samples = mcs.samples[ci];

    double analytic_sd = mix.mixture_stddev(mix.time_index(t));
    double empirical_sd = mcs.sample_stddev(ci);
    rows.push_back({prefix + "stddev_analytic", t, std::nullopt,
                    analytic_sd});
    rows.push_back({prefix + "stddev_mcs", t, std::nullopt, empirical_sd});
    rows.push_back({prefix + "stddev_rel_err", t, std::nullopt,
                    empirical_sd != 0.0
                        ? std::abs(analytic_sd - empirical_sd) / empirical_sd
                        : std::abs(analytic_sd)});

    PdCurve pd = proportion_deviation(
        samples, [&](double a) { return mixture_quantile(mix, t, a); },
        alphas);
    for (std::size_t i = 0; i < pd.alphas.size(); ++i) {
      rows.push_back({prefix + "pd", t, pd.alphas[i], pd.deviations[i]});
    }
    rows.push_back({prefix + "max_pd", t, std::nullopt,
                    pd.max_abs_deviation()});

    std::vector<double> analytic_samples =
        mixture_quantile_samples(mix, t, samples.size());
    rows.push_back({prefix + "w1", t, std::nullopt,
                    wasserstein_1d(analytic_samples, samples)});
    rows.push_back({prefix + "ks", t, std::nullopt,
                    kolmogorov_distance(mix, mcs, t)});
  }
}

}  // namespace

RunResult run_pipeline(const Scenario& scenario,
                       const RunOverrides& overrides) {
  RunResult result;
  StageTimer timer(result.stage_seconds);

  Scenario sc = scenario;
  if (overrides.seed) {
    sc.gmm.seed = *overrides.seed;
    sc.mcs.seed = *overrides.seed;
  }
  if (overrides.threads) {
    sc.solver.threads = *overrides.threads;
  }
  if (overrides.disable_mcs) sc.mcs.enabled = false;

  // Step 1+2: ingest and fit (or take the mixture as given).
  if (sc.quantile_input) {
    QuantileSeries series = timer.time("ingest", [&] {
      return load_quantile_series(*sc.quantile_input);
    });
    result.quantile_count = series.size();
    result.fitted = timer.time("fit", [&] {
      std::vector<double> samples =
          sample(series, sc.gmm.sample_count, sc.gmm.seed, sc.p_max);
      EmOptions opts;
      opts.tol = sc.gmm.tol;
      opts.max_iter = sc.gmm.max_iter;
      opts.seed = sc.gmm.seed;
      return em_fit(samples, sc.gmm.n, opts).first;
    });
  } else {
    result.fitted = *sc.inline_gmm;
  }

  if (sc.baseline_dsm) {
    // Moment-matched single Gaussian through the identical pipeline.
    Gmm dsm;
    dsm.components.push_back(
        {1.0, result.fitted.mean(), result.fitted.variance()});
    result.dsm = dsm;
  }

  // Step 3: decompose into the generalized process.
  result.process = from_gmm(result.fitted, sc.lambda_w);

  // Step 4: build the per-component linear systems.
  result.aggregated = aggregate(sc.sfr);
  result.system = build_sde_system(result.aggregated, sc.sfr, result.process,
                                   sc.init_override);

  // Step 5+6: closed-form solve and mixture assembly.
  SolverOptions solver_opts;
  solver_opts.threads = sc.solver.threads;
  std::vector<double> grid = sc.solver.grid();
  result.mixture = timer.time("solve", [&] {
    return solve_mixture(result.system, grid, solver_opts);
  });

  if (result.dsm) {
    GeneralizedItoProcess dsm_proc = from_gmm(*result.dsm, sc.lambda_w);
    LinearSdeSystem dsm_sys = build_sde_system(result.aggregated, sc.sfr,
                                               dsm_proc, sc.init_override);
    result.dsm_mixture = solve_mixture(dsm_sys, grid, solver_opts);
  }

  // Validation against the Monte Carlo reference.
  if (sc.mcs.enabled) {
    McsConfig cfg;
    cfg.n_paths = sc.mcs.n_paths;
    cfg.dt = sc.mcs.dt;
    cfg.t_end = sc.mcs.t_end;
    cfg.master_seed = sc.mcs.seed;
    result.mcs = timer.time("mcs", [&] {
      return simulate(result.system, cfg, sc.mcs.capture_times);
    });

    std::vector<double> times =
        sc.metrics.times.empty() ? sc.mcs.capture_times : sc.metrics.times;
    std::vector<double> alphas = sc.metrics.alphas.empty()
                                     ? default_pd_alphas()
                                     : sc.metrics.alphas;
    timer.time("metrics", [&] {
      append_distribution_metrics(result.metrics, "", result.mixture,
                                  *result.mcs, times, alphas);
      if (result.dsm_mixture) {
        append_distribution_metrics(result.metrics, "dsm_",
                                    *result.dsm_mixture, *result.mcs, times,
                                    alphas);
      }
    });
  }
  return result;
}

namespace {

void write_mixture_csvs(const FrequencyMixture& mix,
                        const std::filesystem::path& components_file,
                        const std::filesystem::path& summary_file) {
  std::ofstream comp(components_file);
  comp << "time,component,weight,mean_df,var_df\n";
  for (std::size_t ti = 0; ti < mix.times.size(); ++ti) {
    for (std::size_t i = 0; i < mix.weights.size(); ++i) {
      comp << fmt(mix.times[ti]) << ',' << i << ',' << fmt(mix.weights[i])
           << ',' << fmt(mix.means[ti][i]) << ',' << fmt(mix.vars[ti][i])
           << '\n';
    }
  }

  std::ofstream summary(summary_file);
  summary << "time,mix_mean,mix_std,q05,q50,q95\n";
  for (std::size_t ti = 0; ti < mix.times.size(); ++ti) {
    double t = mix.times[ti];
    summary << fmt(t) << ',' << fmt(mix.mixture_mean(ti)) << ','
            << fmt(mix.mixture_stddev(ti)) << ','
            << fmt(mixture_quantile(mix, t, 0.05)) << ','
            << fmt(mixture_quantile(mix, t, 0.50)) << ','
            << fmt(mixture_quantile(mix, t, 0.95)) << '\n';
  }
}

std::string time_tag(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

}  // namespace

void write_artifacts(const RunResult& result, const Scenario& scenario,
                     const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error::io("OutputDirUnwritable",
                    dir.string() + ": " + ec.message());
  }
  const std::filesystem::path marker = dir / "INCOMPLETE";
  { std::ofstream(marker) << "run in progress\n"; }

  save_gmm(result.fitted, dir / "gmm.json");
  if (result.dsm) save_gmm(*result.dsm, dir / "dsm_gmm.json");

  {
    json comps = json::array();
    for (const auto& c : result.process.components) {
      comps.push_back({{"drift_rate", c.drift_rate},
                       {"drift_target", c.drift_target},
                       {"diffusion", c.diffusion},
                       {"weight", c.weight}});
    }
    std::ofstream out(dir / "ito.json");
    out << json{{"components", comps},
                {"initial_value", result.process.initial_value}}
               .dump(2)
        << "\n";
  }

  {
    std::ofstream out(dir / "state_matrix.csv");
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        out << fmt(result.system.state_matrix(r, c))
            << (c < 2 ? "," : "\n");
      }
    }
  }

  write_mixture_csvs(result.mixture, dir / "mixture_components.csv",
                     dir / "mixture_summary.csv");
  if (result.dsm_mixture) {
    write_mixture_csvs(*result.dsm_mixture,
                       dir / "dsm_mixture_components.csv",
                       dir / "dsm_mixture_summary.csv");
  }

  if (result.mcs) {
    for (std::size_t ci = 0; ci < result.mcs->capture_times.size(); ++ci) {
      std::ofstream out(
          dir / ("mcs_t" + time_tag(result.mcs->capture_times[ci]) + ".csv"));
      out << "path,component,df\n";
      const auto& s = result.mcs->samples[ci];
      for (std::size_t p = 0; p < s.size(); ++p) {
        out << p << ',' << result.mcs->component_of_path[p] << ','
            << fmt(s[p]) << '\n';
      }
    }
  }

  {
    std::ofstream out(dir / "metrics.csv");
    out << "metric,time,alpha_or_blank,value\n";
    for (const auto& row : result.metrics) {
      out << row.metric << ',' << fmt(row.time) << ','
          << (row.alpha ? fmt(*row.alpha) : "") << ',' << fmt(row.value)
          << '\n';
    }
  }

  {
    json manifest;
    manifest["version"] = "0.1.0";
    manifest["seeds"] = {{"gmm", scenario.gmm.seed},
                         {"mcs", scenario.mcs.seed}};
    manifest["n_components"] = result.fitted.components.size();
    manifest["lambda_w"] = scenario.lambda_w;
    manifest["solver_dt"] = scenario.solver.dt;
    manifest["mcs_enabled"] = result.mcs.has_value();
    manifest["mcs_dt"] = scenario.mcs.dt;
    manifest["mcs_n_paths"] = scenario.mcs.n_paths;
    manifest["quantile_count"] = result.quantile_count;
    manifest["baseline_dsm"] = scenario.baseline_dsm;
    json timings;
    for (const auto& [stage, sec] : result.stage_seconds) {
      timings[stage] = sec;
    }
    manifest["stage_seconds"] = timings;
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << "\n";
  }

  std::filesystem::remove(marker);
}

namespace {

std::vector<std::vector<std::string>> read_csv(
    const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw Error::io("FileNotFound", "cannot open " + file.string());
  }
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(std::move(cells));
  }
  return rows;
}

FrequencyMixture mixture_from_csv(const std::filesystem::path& file) {
  auto rows = read_csv(file);
  FrequencyMixture mix;
  std::map<double, std::vector<std::pair<double, double>>> by_time;
  std::vector<double> weights;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() < 5) continue;
    double t = std::stod(row[0]);
    std::size_t comp = std::stoul(row[1]);
    if (comp >= weights.size()) weights.resize(comp + 1);
    weights[comp] = std::stod(row[2]);
    auto& slot = by_time[t];
    if (slot.size() <= comp) slot.resize(comp + 1);
    slot[comp] = {std::stod(row[3]), std::stod(row[4])};
  }
  mix.weights = weights;
  for (const auto& [t, comps] : by_time) {
    mix.times.push_back(t);
    std::vector<double> means, vars;
    for (const auto& [m, v] : comps) {
      means.push_back(m);
      vars.push_back(v);
    }
    mix.means.push_back(std::move(means));
    mix.vars.push_back(std::move(vars));
  }
  return mix;
}

}  // namespace

void emit_plot_data(const std::filesystem::path& run_dir) {
  if (std::filesystem::exists(run_dir / "INCOMPLETE") ||
      !std::filesystem::exists(run_dir / "mixture_components.csv")) {
    throw Error::io("IncompleteRun",
                    run_dir.string() + " does not hold a completed run");
  }
  FrequencyMixture mix =
      mixture_from_csv(run_dir / "mixture_components.csv");

  // Collect MCS captures present in the run directory.
  std::map<double, std::vector<double>> mcs_samples;
  for (const auto& entry : std::filesystem::directory_iterator(run_dir)) {
    std::string name = entry.path().filename().string();
    if (name.rfind("mcs_t", 0) != 0 || entry.path().extension() != ".csv") {
      continue;
    }
    double t = std::stod(name.substr(5, name.size() - 5 - 4));
    auto rows = read_csv(entry.path());
    std::vector<double> samples;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r].size() >= 3) samples.push_back(std::stod(rows[r][2]));
    }
    mcs_samples[t] = std::move(samples);
  }

  {
    std::ofstream out(run_dir / "stddev_vs_time.dat");
    out << "# time analytic mcs\n";
    for (std::size_t ti = 0; ti < mix.times.size(); ++ti) {
      double t = mix.times[ti];
      out << fmt(t) << ' ' << fmt(mix.mixture_stddev(ti)) << ' ';
      auto it = mcs_samples.find(t);
      if (it == mcs_samples.end()) {
        out << "nan\n";
      } else {
        const auto& s = it->second;
        double mu = 0.0;
        for (double x : s) mu += x;
        mu /= static_cast<double>(s.size());
        double var = 0.0;
        for (double x : s) var += (x - mu) * (x - mu);
        out << fmt(std::sqrt(var / static_cast<double>(s.size()))) << '\n';
      }
    }
  }

  // Distribution grids at the captured times, or at the last grid time
  // when the run had no MCS.
  std::vector<double> plot_times;
  for (const auto& [t, _] : mcs_samples) plot_times.push_back(t);
  if (plot_times.empty() && !mix.times.empty()) {
    plot_times.push_back(mix.times.back());
  }

  bool skipped_comparison = false;
  for (double t : plot_times) {
    std::size_t ti;
    try {
      ti = mix.time_index(t);
    } catch (const Error&) {
      continue;  // capture time off the solver grid
    }
    double sd = std::max(mix.mixture_stddev(ti), 1e-12);
    double mu = mix.mixture_mean(ti);
    double lo = mu - 6.0 * sd, hi = mu + 6.0 * sd;
    const int n = 600;

    std::ofstream pdf_out(run_dir / ("pdf_t" + time_tag(t) + ".dat"));
    std::ofstream cdf_out(run_dir / ("cdf_t" + time_tag(t) + ".dat"));
    pdf_out << "# x pdf\n";
    cdf_out << "# x cdf\n";
    for (int i = 0; i <= n; ++i) {
      double x = lo + (hi - lo) * i / n;
      pdf_out << fmt(x) << ' ' << fmt(mixture_pdf(mix, t, x)) << '\n';
      cdf_out << fmt(x) << ' ' << fmt(mixture_cdf(mix, t, x)) << '\n';
    }

    auto it = mcs_samples.find(t);
    if (it == mcs_samples.end()) {
      skipped_comparison = true;
      continue;
    }
    PdCurve pd = proportion_deviation(
        it->second, [&](double a) { return mixture_quantile(mix, t, a); },
        default_pd_alphas());
    std::ofstream pd_out(run_dir / ("pd_t" + time_tag(t) + ".dat"));
    pd_out << "# alpha pd\n";
    for (std::size_t i = 0; i < pd.alphas.size(); ++i) {
      pd_out << fmt(pd.alphas[i]) << ' ' << fmt(pd.deviations[i]) << '\n';
    }
  }
  if (skipped_comparison || mcs_samples.empty()) {
    std::ofstream note(run_dir / "plot_data_notes.txt");
    note << "comparison files skipped: no MCS samples in this run\n";
  }
}

}  // namespace freqsde
