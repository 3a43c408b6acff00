#include "freqsde/scenario.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "freqsde/errors.hpp"

namespace freqsde {

using nlohmann::json;

namespace {

json read_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw Error::io("FileNotFound", "cannot open " + file.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error::config("MalformedInput",
                        file.string() + ": " + e.what());
  }
}

const json& require(const json& j, const std::string& key,
                    const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error::config("MissingKey",
                        "missing key `" + context + key + "`");
  }
  return *it;
}

double require_number(const json& j, const std::string& key,
                      const std::string& context) {
  const json& v = require(j, key, context);
  if (!v.is_number()) {
    throw Error::config("MalformedInput",
                        "key `" + context + key + "` must be a number");
  }
  return v.get<double>();
}

}  // namespace

std::vector<double> SolverSettings::grid() const {
  std::vector<double> g;
  long n = std::lround((t_end - t_start) / dt);
  for (long i = 0; i <= n; ++i) g.push_back(t_start + i * dt);
  return g;
}

QuantileSeries load_quantile_series(const std::filesystem::path& file) {
  json j = read_json(file);
  auto props = require(j, "proportions", "").get<std::vector<double>>();
  auto vals = require(j, "values", "").get<std::vector<double>>();
  std::string horizon = require(j, "horizon_id", "").get<std::string>();
  return QuantileSeries(std::move(props), std::move(vals),
                        std::move(horizon));
}

Gmm load_gmm(const std::filesystem::path& file) {
  json j = read_json(file);
  Gmm model;
  for (const auto& c : require(j, "components", "")) {
    model.components.push_back({require_number(c, "weight", "components."),
                                require_number(c, "mean", "components."),
                                require_number(c, "variance",
                                               "components.")});
  }
  if (model.components.empty()) {
    throw Error::config("MalformedInput", "gmm has no components");
  }
  double wsum = 0.0;
  for (const auto& c : model.components) wsum += c.weight;
  if (std::abs(wsum - 1.0) > 1e-9) {
    throw Error::config("MalformedInput", "gmm weights must sum to 1");
  }
  return model;
}

void save_gmm(const Gmm& model, const std::filesystem::path& file) {
  json comps = json::array();
  for (const auto& c : model.components) {
    comps.push_back({{"weight", c.weight},
                     {"mean", c.mean},
                     {"variance", c.variance}});
  }
  std::ofstream out(file);
  if (!out) {
    throw Error::io("WriteFailure", "cannot write " + file.string());
  }
  out << json{{"components", comps}}.dump(2) << "\n";
}

Scenario load_scenario(const std::filesystem::path& file) {
  json j = read_json(file);
  Scenario sc;

  bool has_quantiles = j.contains("quantile_input");
  bool has_inline = j.contains("gmm_inline");
  if (has_quantiles == has_inline) {
    throw Error::config(
        "MalformedInput",
        "scenario needs exactly one of `quantile_input` / `gmm_inline`");
  }
  if (has_quantiles) {
    std::filesystem::path p = j["quantile_input"].get<std::string>();
    if (p.is_relative()) p = file.parent_path() / p;
    sc.quantile_input = p;
  } else {
    Gmm model;
    for (const auto& c : require(j["gmm_inline"], "components",
                                 "gmm_inline.")) {
      model.components.push_back(
          {require_number(c, "weight", "gmm_inline.components."),
           require_number(c, "mean", "gmm_inline.components."),
           require_number(c, "variance", "gmm_inline.components.")});
    }
    sc.inline_gmm = std::move(model);
  }

  if (j.contains("p_max")) sc.p_max = j["p_max"].get<double>();

  if (j.contains("gmm")) {
    const json& g = j["gmm"];
    if (g.contains("n")) sc.gmm.n = g["n"].get<int>();
    if (g.contains("tol")) sc.gmm.tol = g["tol"].get<double>();
    if (g.contains("max_iter")) sc.gmm.max_iter = g["max_iter"].get<int>();
    if (g.contains("seed")) sc.gmm.seed = g["seed"].get<std::uint64_t>();
    if (g.contains("sample_count")) {
      sc.gmm.sample_count = g["sample_count"].get<std::size_t>();
    }
  }

  const json& sfr = require(j, "sfr", "");
  sc.sfr.governor_gain_inv = require_number(sfr, "inv_R", "sfr.");
  sc.sfr.inertia = require_number(sfr, "H", "sfr.");
  sc.sfr.turbine_coeff = require_number(sfr, "a", "sfr.");
  sc.sfr.turbine_time = require_number(sfr, "T", "sfr.");
  sc.sfr.damping = require_number(sfr, "D", "sfr.");
  sc.sfr.vsg_droop = require_number(sfr, "delta_w", "sfr.");
  sc.sfr.vsg_inertia = require_number(sfr, "H_w", "sfr.");
  sc.sfr.sync_share = require_number(sfr, "K", "sfr.");
  sc.sfr.vsg_share = require_number(sfr, "K1", "sfr.");
  sc.sfr.nonvsg_share = require_number(sfr, "K2", "sfr.");
  sc.sfr.gen_power = require_number(sfr, "P_G", "sfr.");
  sc.sfr.load_power = require_number(sfr, "P_L", "sfr.");
  sc.sfr.ref_freq = require_number(sfr, "f0", "sfr.");
  if (sfr.contains("D_s")) {
    sc.sfr.damping_override = sfr["D_s"].get<double>();
  }
  sc.sfr.validate();

  if (j.contains("ito")) {
    sc.lambda_w = require_number(j["ito"], "lambda_w", "ito.");
  }

  if (j.contains("init")) {
    const json& init = j["init"];
    sc.init_override = Eigen::Vector3d(require_number(init, "tg", "init."),
                                       require_number(init, "df", "init."),
                                       require_number(init, "pw", "init."));
  }

  if (j.contains("solver")) {
    const json& s = j["solver"];
    if (s.contains("t_start")) sc.solver.t_start = s["t_start"].get<double>();
    if (s.contains("t_end")) sc.solver.t_end = s["t_end"].get<double>();
    if (s.contains("dt")) sc.solver.dt = s["dt"].get<double>();
    if (s.contains("threads")) sc.solver.threads = s["threads"].get<int>();
    if (!(sc.solver.dt > 0.0) || sc.solver.t_end < sc.solver.t_start) {
      throw Error::config("MalformedInput", "invalid solver time grid");
    }
  }

  if (j.contains("mcs")) {
    const json& m = j["mcs"];
    if (m.contains("enabled")) sc.mcs.enabled = m["enabled"].get<bool>();
    if (m.contains("n_paths")) {
      sc.mcs.n_paths = m["n_paths"].get<std::size_t>();
    }
    if (m.contains("dt")) sc.mcs.dt = m["dt"].get<double>();
    if (m.contains("t_end")) sc.mcs.t_end = m["t_end"].get<double>();
    if (m.contains("seed")) sc.mcs.seed = m["seed"].get<std::uint64_t>();
    if (m.contains("capture_times")) {
      sc.mcs.capture_times =
          m["capture_times"].get<std::vector<double>>();
    }
  }

  if (j.contains("metrics")) {
    const json& m = j["metrics"];
    if (m.contains("alphas")) {
      sc.metrics.alphas = m["alphas"].get<std::vector<double>>();
    }
    if (m.contains("times")) {
      sc.metrics.times = m["times"].get<std::vector<double>>();
    }
  }

  if (j.contains("baseline_dsm")) {
    sc.baseline_dsm = j["baseline_dsm"].get<bool>();
  }
  if (j.contains("output_dir")) {
    sc.output_dir = std::filesystem::path(j["output_dir"].get<std::string>());
  }
  return sc;
}

}  // namespace freqsde
