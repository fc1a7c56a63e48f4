// Command-line front end for the switching-volatility structural VAR
// library: simulate, estimate, identify, sddr, mdd, compare.
//
// Every command is a thin wrapper over the library; numbers written to the
// CSV/JSON artifacts are bit-identical to direct library calls.  Display
// rounding happens only on stdout.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <svarmsh/svarmsh.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace svarmsh;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int parse_label(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InputError("bad " + what + " '" + text + "': expected an integer");
  }
}

std::vector<int> parse_label_list(const std::string& text,
                                  const std::string& what) {
  std::vector<int> out;
  for (const std::string& piece : split(text, ','))
    out.push_back(parse_label(piece, what));
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw InputError(what + ": expected an array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols)
      throw InputError(what + ": ragged rows");
    for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// shared flags: config file plus per-flag overrides (a flag given on the
// command line wins over the config file)
// ---------------------------------------------------------------------------
struct CommonFlags {
  std::string config_path, data_path, out_dir, scheme, rows;
  std::uint64_t seed = 0;
  int chains = 0, draws = 0, burn = 0, lags = 0, regimes = 0;
  CLI::Option *o_data = nullptr, *o_out = nullptr, *o_seed = nullptr,
              *o_chains = nullptr, *o_draws = nullptr, *o_burn = nullptr,
              *o_scheme = nullptr, *o_rows = nullptr, *o_lags = nullptr,
              *o_regimes = nullptr;

  void attach(CLI::App* cmd, bool sampler_flags) {
    cmd->add_option("--config", config_path, "run configuration file");
    o_out = cmd->add_option("--out", out_dir, "output directory");
    o_seed = cmd->add_option("--seed", seed, "random seed");
    if (sampler_flags) {
      o_data = cmd->add_option("--data", data_path, "data CSV (header row)");
      o_chains = cmd->add_option("--chains", chains, "number of chains");
      o_draws = cmd->add_option("--draws", draws, "retained draws per chain");
      o_burn = cmd->add_option("--burn", burn, "burn-in sweeps");
      o_scheme = cmd->add_option("--scheme", scheme,
                                 "restriction preset (unrestricted, "
                                 "recursive, taylor_money, taylor_no_money, "
                                 "money_interest)");
      o_rows = cmd->add_option("--restricted-rows", rows,
                               "rows the preset applies to: 'all' or a "
                               "comma list of 1-based rows");
      o_lags = cmd->add_option("--lags", lags, "lag order");
      o_regimes = cmd->add_option("--regimes", regimes, "number of regimes");
    }
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = parse_config(config_path);
    if (o_data && o_data->count()) cfg.data_path = data_path;
    if (o_out && o_out->count()) cfg.output_dir = out_dir;
    if (o_seed && o_seed->count()) cfg.sampler.seed = seed;
    if (o_chains && o_chains->count()) cfg.sampler.chains = chains;
    if (o_draws && o_draws->count()) cfg.sampler.draws = draws;
    if (o_burn && o_burn->count()) cfg.sampler.burn = burn;
    if (o_lags && o_lags->count()) cfg.lags = lags;
    if (o_regimes && o_regimes->count()) cfg.regimes = regimes;
    if (o_scheme && o_scheme->count()) {
      cfg.scheme_preset = scheme;
      cfg.q_matrix_path.clear(); // a preset flag displaces custom matrices
      cfg.q_vector_path.clear();
    }
    if (o_rows && o_rows->count()) {
      cfg.restricted_rows.clear();
      if (rows != "all")
        cfg.restricted_rows = parse_label_list(rows, "row label");
    }
    return cfg;
  }
};

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------
ModelParameters default_truth() {
  const RestrictionScheme scheme = make_scheme(SchemePreset::unrestricted, 2);
  ModelParameters truth;
  Eigen::MatrixXd A0(2, 2);
  A0 << 1.0, 0.5, -0.3, 1.0;
  truth.alpha = extract_alpha(scheme, A0);
  truth.A0 = A0;
  truth.A.resize(2, 3);
  truth.A << 0.1, 0.4, 0.1, -0.1, 0.05, 0.35;
  truth.lambda1 = Eigen::VectorXd::Ones(2);
  truth.omega.resize(1, 2);
  truth.omega << 4.0, 9.0;
  truth.P.resize(2, 2);
  truth.P << 0.95, 0.05, 0.05, 0.95;
  return truth;
}

ModelParameters truth_from_json(const json& j) {
  ModelParameters truth;
  for (const char* key : {"A0", "A", "lambda1", "omega", "P"})
    if (!j.contains(key))
      throw InputError(std::string("truth file: missing '") + key + "'");
  truth.A0 = matrix_from_json(j["A0"], "truth A0");
  truth.A = matrix_from_json(j["A"], "truth A");
  const auto l1 = j["lambda1"].get<std::vector<double>>();
  truth.lambda1 =
      Eigen::Map<const Eigen::VectorXd>(l1.data(), static_cast<int>(l1.size()));
  truth.omega = matrix_from_json(j["omega"], "truth omega");
  truth.P = matrix_from_json(j["P"], "truth P");
  const int N = truth.N();
  if (truth.A0.cols() != N || truth.lambda1.size() != N ||
      truth.omega.cols() != N || (truth.A.cols() - 1) % N != 0)
    throw InputError("truth file: inconsistent dimensions");
  if (truth.omega.rows() + 1 != truth.P.rows())
    throw InputError("truth file: omega rows must be regimes - 1");
  // free coefficients relative to the unrestricted pattern, for reports
  truth.alpha = extract_alpha(make_scheme(SchemePreset::unrestricted, N),
                              truth.A0);
  return truth;
}

int cmd_simulate(const RunConfig& cfg, const std::string& truth_path) {
  const ModelParameters truth =
      truth_path.empty() ? default_truth()
                         : truth_from_json(read_json_file(truth_path));
  const int N = truth.N(), p = truth.p(), K = truth.K();
  const int T = cfg.simulate_T;
  // an identified fit needs the sample to dominate the regressor count
  if (T < 2 * K + 1)
    throw InputError("sample length " + std::to_string(T) + " is too short "
                     "for " + std::to_string(N) + " variables with " +
                     std::to_string(p) + " lags: need at least " +
                     std::to_string(2 * K + 1) + " observations");

  RngStream rng(cfg.sampler.seed);
  auto [data, states] = simulate_data(truth, T, rng, cfg.simulate_burn);

  fs::create_directories(cfg.output_dir);
  const std::string data_path = cfg.output_dir + "/data.csv";
  const std::string states_path = cfg.output_dir + "/states.csv";
  const std::string truth_out = cfg.output_dir + "/truth.json";
  save_csv(data_path, data);
  {
    std::ofstream out(states_path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + states_path + "'");
    out << "state\n";
    for (int t = 0; t < states.T(); ++t) out << states.s[t] + 1 << "\n";
  }
  json sidecar;
  sidecar["A0"] = matrix_json(truth.A0);
  sidecar["A"] = matrix_json(truth.A);
  sidecar["lambda1"] = vector_json(truth.lambda1);
  sidecar["omega"] = matrix_json(truth.omega);
  sidecar["P"] = matrix_json(truth.P);
  sidecar["names"] = data.names;
  sidecar["length"] = T;
  sidecar["burn"] = cfg.simulate_burn;
  sidecar["seed"] = cfg.sampler.seed;
  sidecar["states_file"] = "states.csv";
  write_json_file(truth_out, sidecar);

  std::cout << "simulated " << N << " variables, T=" << T << " (+" << p
            << " presample), regimes=" << truth.M() << ", seed="
            << cfg.sampler.seed << "\n"
            << "wrote " << data_path << "\n"
            << "wrote " << states_path << "\n"
            << "wrote " << truth_out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------
struct EstimateArtifacts {
  DrawStore store;
  TimeSeriesData data;
  DesignMatrices design;
};

EstimateArtifacts run_estimate(const RunConfig& cfg) {
  if (cfg.data_path.empty())
    throw InputError("no data file: set [data] path or --data");
  EstimateArtifacts art;
  art.data = with_presample(load_csv(cfg.data_path), cfg.lags);
  art.design = build_design(art.data, cfg.lags);
  const RestrictionScheme scheme = scheme_from_config(cfg, art.data.N());
  const PriorHyperparameters prior =
      prior_from_config(cfg, art.data.N(), cfg.regimes);
  art.store = run_sampler(art.data, art.design, scheme, prior, cfg.regimes,
                          cfg.sampler);
  art.store.data_digest = data_digest(art.data);
  return art;
}

void write_estimate_outputs(const RunConfig& cfg, const EstimateArtifacts& art) {
  const DrawStore& store = art.store;
  fs::create_directories(cfg.output_dir);
  save_draw_store(cfg.output_dir + "/draws", store);
  const auto summary = summarize_posterior(store);
  write_summary_csv(cfg.output_dir + "/summary.csv", summary);
  write_state_probability_csv(cfg.output_dir + "/state_probability.csv",
                              store.state_probability_mean());

  json report;
  report["variables"] = store.variable_names;
  report["N"] = store.N;
  report["regimes"] = store.M;
  report["lags"] = store.p;
  report["free_coefficients"] = store.r;
  report["scheme"] = store.scheme.label;
  report["observations"] = art.data.T();
  report["seed"] = store.config.seed;
  report["chains"] = store.config.chains;
  report["draws_per_chain"] = store.config.draws;
  report["burn"] = store.config.burn;
  json acc = json::array();
  for (const ChainResult& c : store.chains) acc.push_back(c.mh_acceptance_rate);
  report["mh_acceptance_rate"] = acc;
  if (store.M < 2)
    report["identification"] =
        "unavailable: a single regime carries no heteroskedasticity";
  write_json_file(cfg.output_dir + "/estimate.json", report);

  std::cout << "estimated " << store.N << "-variable model, " << store.M
            << " regime(s), " << store.p << " lag(s), scheme "
            << store.scheme.label << "\n";
  std::cout << "chains=" << store.config.chains << " draws="
            << store.config.draws << " burn=" << store.config.burn
            << " seed=" << store.config.seed << "\n";
  for (const ChainResult& c : store.chains)
    std::cout << "chain " << c.chain_id
              << ": coefficient acceptance rate " << fixed4(c.mh_acceptance_rate)
              << "\n";
  std::cout << "\nposterior summary (full table in summary.csv)\n";
  std::printf("%-14s %10s %10s %10s %10s %10s\n", "parameter", "mean", "sd",
              "q05", "median", "q95");
  for (const ParameterSummary& row : summary) {
    const bool core = row.name.rfind("a_", 0) == 0 ||
                      row.name.rfind("lambda_", 0) == 0 ||
                      row.name.rfind("omega_", 0) == 0 ||
                      row.name.rfind("p_", 0) == 0 ||
                      row.name.rfind("gamma_", 0) == 0;
    if (!core) continue;
    std::printf("%-14s %10.4f %10.4f %10.4f %10.4f %10.4f\n",
                row.name.c_str(), row.mean, row.sd, row.q05, row.median,
                row.q95);
  }
  if (store.M < 2)
    std::cout << "\nnote: single regime; no relative variances, "
                 "identification through heteroskedasticity unavailable\n";
  std::cout << "\nwrote " << cfg.output_dir << "/draws\n"
            << "wrote " << cfg.output_dir << "/summary.csv\n"
            << "wrote " << cfg.output_dir << "/state_probability.csv\n"
            << "wrote " << cfg.output_dir << "/estimate.json\n";
}

int cmd_estimate(const RunConfig& cfg) {
  const EstimateArtifacts art = run_estimate(cfg);
  write_estimate_outputs(cfg, art);
  return 0;
}

// ---------------------------------------------------------------------------
// sddr
// ---------------------------------------------------------------------------
std::vector<SddrResult> expand_hypothesis(const DrawStore& store,
                                          const std::string& spec,
                                          int batches) {
  const auto parts = split(spec, ':');
  std::vector<SddrResult> out;
  const auto fail = [&spec]() -> std::vector<SddrResult> {
    throw InputError(
        "unknown hypothesis '" + spec + "'; expected one of "
        "identification:all-pairs, identification:pair:REGIME:I:J, "
        "identification:joint:I:J, homoskedasticity:I, "
        "homoskedasticity:all, homoskedasticity:joint:all, "
        "homoskedasticity:joint:I,J,...");
  };
  if (parts[0] == "identification") {
    if (parts.size() == 2 && parts[1] == "all-pairs") {
      for (int i = 1; i <= store.N; ++i)
        for (int j = i + 1; j <= store.N; ++j)
          out.push_back(sddr_joint_identification(store, i, j, batches));
    } else if (parts.size() == 5 && parts[1] == "pair") {
      out.push_back(sddr_pair_identification(
          store, parse_label(parts[2], "regime label"),
          parse_label(parts[3], "equation label"),
          parse_label(parts[4], "equation label"), batches));
    } else if (parts.size() == 4 && parts[1] == "joint") {
      out.push_back(sddr_joint_identification(
          store, parse_label(parts[2], "equation label"),
          parse_label(parts[3], "equation label"), batches));
    } else {
      return fail();
    }
  } else if (parts[0] == "homoskedasticity") {
    if (parts.size() == 2 && parts[1] == "all") {
      for (int i = 1; i <= store.N; ++i)
        out.push_back(sddr_homoskedasticity(store, i, batches));
    } else if (parts.size() == 2) {
      out.push_back(sddr_homoskedasticity(
          store, parse_label(parts[1], "equation label"), batches));
    } else if (parts.size() == 3 && parts[1] == "joint") {
      std::vector<int> eqs;
      if (parts[2] != "all") eqs = parse_label_list(parts[2], "equation label");
      out.push_back(sddr_joint_homoskedasticity(store, eqs, batches));
    } else {
      return fail();
    }
  } else {
    return fail();
  }
  return out;
}

void write_sddr_outputs(const std::string& dir,
                        const std::vector<SddrResult>& results) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir + "/sddr.csv", std::ios::binary);
    if (!out) throw InputError("cannot write '" + dir + "/sddr.csv'");
    out << "hypothesis,log_sddr,nse,log_numerator,log_denominator,draws\n";
    for (const SddrResult& r : results)
      out << '"' << r.hypothesis << "\"," << fmt(r.log_sddr) << ','
          << fmt(r.nse) << ',' << fmt(r.log_numerator) << ','
          << fmt(r.log_denominator) << ',' << r.draws_used << "\n";
  }
  json rows = json::array();
  for (const SddrResult& r : results) {
    json row;
    row["hypothesis"] = r.hypothesis;
    row["log_sddr"] = r.log_sddr;
    row["nse"] = r.nse;
    row["log_numerator"] = r.log_numerator;
    row["log_denominator"] = r.log_denominator;
    row["draws"] = r.draws_used;
    rows.push_back(std::move(row));
  }
  write_json_file(dir + "/sddr.json", rows);
}

int cmd_sddr(const std::string& store_dir,
             const std::vector<std::string>& specs, int batches,
             const std::string& out_dir) {
  const DrawStore store = load_draw_store(store_dir);
  std::vector<SddrResult> results;
  for (const std::string& spec : specs)
    for (SddrResult& r : expand_hypothesis(store, spec, batches))
      results.push_back(std::move(r));
  write_sddr_outputs(out_dir, results);

  std::size_t width = 10;
  for (const SddrResult& r : results) width = std::max(width, r.hypothesis.size());
  std::printf("%-*s %12s %10s\n", static_cast<int>(width), "hypothesis",
              "log SDDR", "NSE");
  for (const SddrResult& r : results)
    std::printf("%-*s %12.4f %10.4f\n", static_cast<int>(width),
                r.hypothesis.c_str(), r.log_sddr, r.nse);
  std::cout << "\nlegend: log SDDR > 0 favors the restriction; < 0 favors "
               "the unrestricted model\n"
               "(0,1] barely worth mentioning, (1,3] positive, (3,5] strong, "
               ">5 very strong; mirrored for negative values\n";
  std::cout << "\nwrote " << out_dir << "/sddr.csv\n"
            << "wrote " << out_dir << "/sddr.json\n";
  return 0;
}

// ---------------------------------------------------------------------------
// mdd
// ---------------------------------------------------------------------------
struct MddRow {
  std::string store_dir, scheme;
  MddResult result;
};

int cmd_mdd(const std::vector<std::string>& store_dirs,
            const std::string& data_path, MddOptions options,
            const std::string& out_dir) {
  if (data_path.empty())
    throw InputError("no data file: the density estimate needs --data");
  const TimeSeriesData raw = load_csv(data_path);
  std::vector<MddRow> rows;
  for (std::size_t k = 0; k < store_dirs.size(); ++k) {
    DrawStore store = load_draw_store(store_dirs[k]);
    TimeSeriesData data = with_presample(raw, store.p);
    if (store.data_digest != data_digest(data))
      throw InputError("draw store '" + store_dirs[k] + "' was estimated on "
                       "different data than '" + data_path +
                       "' (digest mismatch)");
    MddOptions opt = options;
    opt.seed = options.seed + k; // independent streams per store
    MddRow row;
    row.store_dir = store_dirs[k];
    row.scheme = store.scheme.label;
    row.result = estimate_mdd(store, data, build_design(data, store.p), opt);
    rows.push_back(std::move(row));
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (rows[k].result.log_mdd > rows[best].result.log_mdd) best = k;

  fs::create_directories(out_dir);
  {
    std::ofstream out(out_dir + "/mdd.csv", std::ios::binary);
    if (!out) throw InputError("cannot write '" + out_dir + "/mdd.csv'");
    out << "store,scheme,log_mdd,nse,threshold_log_lik,inside_fraction,"
           "draws,best\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const MddResult& r = rows[k].result;
      out << '"' << rows[k].store_dir << "\",\"" << rows[k].scheme << "\","
          << fmt(r.log_mdd) << ',' << fmt(r.nse) << ','
          << fmt(r.threshold_log_lik) << ',' << fmt(r.inside_fraction) << ','
          << r.draws << ',' << (k == best ? 1 : 0) << "\n";
    }
  }
  json jrows = json::array();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const MddResult& r = rows[k].result;
    json row;
    row["store"] = rows[k].store_dir;
    row["scheme"] = rows[k].scheme;
    row["log_mdd"] = r.log_mdd;
    row["nse"] = r.nse;
    row["threshold_log_lik"] = r.threshold_log_lik;
    row["inside_fraction"] = r.inside_fraction;
    row["draws"] = r.draws;
    row["best"] = (k == best);
    jrows.push_back(std::move(row));
  }
  write_json_file(out_dir + "/mdd.json", jrows);

  std::size_t width = 6;
  for (const MddRow& row : rows) width = std::max(width, row.scheme.size());
  std::printf("%-*s %14s %10s %10s\n", static_cast<int>(width), "scheme",
              "log MDD", "NSE", "inside");
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const MddResult& r = rows[k].result;
    std::printf("%-*s %14.4f %10.4f %10.4f%s\n", static_cast<int>(width),
                rows[k].scheme.c_str(), r.log_mdd, r.nse, r.inside_fraction,
                k == best ? "  *" : "");
  }
  if (rows.size() > 1) std::cout << "* largest marginal data density\n";
  std::cout << "\nwrote " << out_dir << "/mdd.csv\n"
            << "wrote " << out_dir << "/mdd.json\n";
  return 0;
}

// ---------------------------------------------------------------------------
// identify
// ---------------------------------------------------------------------------
int cmd_identify(const std::string& store_dir, const std::string& var_path,
                 double tol, int batches, const std::string& out_dir) {
  if (store_dir.empty() == var_path.empty())
    throw InputError("identify needs exactly one of --store or --variances");

  Eigen::MatrixXd variances;
  std::vector<SddrResult> sddr;
  std::string source;
  if (!var_path.empty()) {
    variances = load_matrix_csv(var_path); // M x N regime variances
    source = var_path;
  } else {
    const DrawStore store = load_draw_store(store_dir);
    source = store_dir;
    variances = Eigen::MatrixXd::Zero(store.M, store.N);
    const int S = store.total_draws();
    for (int s = 0; s < S; ++s) {
      const PosteriorDraw& d = store.draw(s);
      variances.row(0) += d.lambda1.transpose();
      for (int m = 1; m < store.M; ++m)
        variances.row(m) +=
            (d.lambda1.array() * d.omega.row(m - 1).transpose().array())
                .matrix()
                .transpose();
    }
    variances /= static_cast<double>(S);
    if (store.M >= 2)
      for (int i = 1; i <= store.N; ++i)
        for (int j = i + 1; j <= store.N; ++j)
          sddr.push_back(sddr_joint_identification(store, i, j, batches));
  }

  const IdentificationReport report = check_identification(variances, tol);

  json out;
  out["source"] = source;
  out["tolerance"] = tol;
  out["variances"] = matrix_json(variances);
  json rows = json::array();
  for (std::size_t k = 0; k < report.row_unique.size(); ++k) {
    json row;
    row["equation"] = static_cast<int>(k) + 1;
    row["unique"] = static_cast<bool>(report.row_unique[k]);
    rows.push_back(std::move(row));
  }
  out["rows"] = rows;
  out["globally_unique"] = report.globally_unique;
  json pairs = json::array();
  for (const auto& [i, j] : report.colliding_pairs)
    pairs.push_back(json::array({i + 1, j + 1}));
  out["colliding_pairs"] = pairs;
  out["note"] = report.note;
  if (!sddr.empty()) {
    json js = json::array();
    for (const SddrResult& r : sddr) {
      json row;
      row["hypothesis"] = r.hypothesis;
      row["log_sddr"] = r.log_sddr;
      row["nse"] = r.nse;
      js.push_back(std::move(row));
    }
    out["sddr"] = js;
  }
  fs::create_directories(out_dir);
  write_json_file(out_dir + "/identification.json", out);

  std::cout << "relative-variance identification at " << source << "\n";
  for (std::size_t k = 0; k < report.row_unique.size(); ++k)
    std::cout << "row " << k + 1 << ": "
              << (report.row_unique[k] ? "unique" : "not unique") << "\n";
  std::cout << (report.globally_unique
                    ? "all rows uniquely determined\n"
                    : "contemporaneous matrix not fully determined\n");
  for (const auto& [i, j] : report.colliding_pairs)
    std::cout << "equations " << i + 1 << "," << j + 1
              << ": relative-variance profiles collide\n";
  if (!report.note.empty()) std::cout << "note: " << report.note << "\n";
  if (!sddr.empty()) {
    std::cout << "\nposterior evidence (log SDDR of equal relative "
                 "variances; negative favors identification)\n";
    for (const SddrResult& r : sddr)
      std::cout << r.hypothesis << ": " << fixed4(r.log_sddr) << " (NSE "
                << fixed4(r.nse) << ")\n";
  }
  std::cout << "\nwrote " << out_dir << "/identification.json\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compare: estimate + mdd across restriction schemes on one dataset
// ---------------------------------------------------------------------------
int cmd_compare(const RunConfig& base, const std::string& schemes_arg,
                const MddOptions& mdd_options) {
  const auto names = split(schemes_arg, ',');
  if (names.size() < 2)
    throw InputError("compare needs at least two schemes (comma-separated)");
  for (const std::string& name : names)
    if (!scheme_preset_from_name(name))
      throw InputError("unknown scheme preset '" + name + "'");
  if (std::set<std::string>(names.begin(), names.end()).size() != names.size())
    throw InputError("duplicate scheme in compare list");

  std::vector<MddRow> rows;
  for (std::size_t k = 0; k < names.size(); ++k) {
    RunConfig cfg = base;
    cfg.scheme_preset = names[k];
    cfg.q_matrix_path.clear();
    cfg.q_vector_path.clear();
    cfg.output_dir = base.output_dir + "/" + names[k];
    std::cout << "[" << names[k] << "]\n";
    EstimateArtifacts art = run_estimate(cfg);
    write_estimate_outputs(cfg, art);
    MddOptions opt = mdd_options;
    opt.seed = mdd_options.seed + k;
    MddRow row;
    row.store_dir = cfg.output_dir + "/draws";
    row.scheme = art.store.scheme.label;
    row.result = estimate_mdd(art.store, art.data, art.design, opt);
    rows.push_back(std::move(row));
    std::cout << "log MDD " << fixed4(row.result.log_mdd) << " (NSE "
              << fixed4(row.result.nse) << ")\n\n";
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (rows[k].result.log_mdd > rows[best].result.log_mdd) best = k;

  fs::create_directories(base.output_dir);
  {
    const std::string path = base.output_dir + "/compare.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "scheme,log_mdd,nse,store,best\n";
    for (std::size_t k = 0; k < rows.size(); ++k)
      out << '"' << rows[k].scheme << "\"," << fmt(rows[k].result.log_mdd)
          << ',' << fmt(rows[k].result.nse) << ",\"" << rows[k].store_dir
          << "\"," << (k == best ? 1 : 0) << "\n";
  }

  std::size_t width = 6;
  for (const MddRow& row : rows) width = std::max(width, row.scheme.size());
  std::printf("%-*s %14s %10s\n", static_cast<int>(width), "scheme",
              "log MDD", "NSE");
  for (std::size_t k = 0; k < rows.size(); ++k)
    std::printf("%-*s %14.4f %10.4f%s\n", static_cast<int>(width),
                rows[k].scheme.c_str(), rows[k].result.log_mdd,
                rows[k].result.nse, k == best ? "  *" : "");
  std::cout << "* largest marginal data density\n"
            << "\nwrote " << base.output_dir << "/compare.csv\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian structural VAR identified through Markov-switching "
               "heteroskedasticity"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw a dataset from a known "
                                             "parameter point");
  CommonFlags sim_flags;
  sim_flags.attach(sim, false);
  std::string truth_path;
  int sim_length = 0, sim_burn = -1;
  sim->add_option("--truth", truth_path,
                  "JSON parameter file (defaults to a built-in two-variable, "
                  "two-regime point)");
  auto* o_len = sim->add_option("--length", sim_length, "sample length");
  auto* o_sburn =
      sim->add_option("--burn", sim_burn, "discarded initial observations");

  // estimate
  auto* est = app.add_subcommand("estimate", "run the posterior sampler and "
                                             "write reports and a draw store");
  CommonFlags est_flags;
  est_flags.attach(est, true);

  // sddr
  auto* sdd = app.add_subcommand("sddr", "Savage-Dickey density ratios of "
                                         "variance restrictions");
  std::string sddr_store, sddr_out = "out";
  std::vector<std::string> sddr_specs;
  int sddr_batches = 2000;
  sdd->add_option("--store", sddr_store, "draw-store directory")->required();
  sdd->add_option("--hypothesis", sddr_specs,
                  "identification:all-pairs | identification:pair:REGIME:I:J "
                  "| identification:joint:I:J | homoskedasticity:I | "
                  "homoskedasticity:all | homoskedasticity:joint:all | "
                  "homoskedasticity:joint:I,J,...")
      ->required();
  sdd->add_option("--batches", sddr_batches, "batches for the NSE");
  sdd->add_option("--out", sddr_out, "output directory");

  // mdd
  auto* mdd = app.add_subcommand("mdd", "marginal data density by corrected "
                                        "arithmetic-mean importance sampling");
  std::vector<std::string> mdd_stores;
  std::string mdd_data, mdd_out = "out";
  MddOptions mdd_options;
  mdd->add_option("--store", mdd_stores, "draw-store directory (repeatable)")
      ->required();
  mdd->add_option("--data", mdd_data, "data CSV the stores were estimated on")
      ->required();
  mdd->add_option("--draws", mdd_options.draws, "importance draws");
  mdd->add_option("--batches", mdd_options.batches, "batches for the NSE");
  mdd->add_option("--seed", mdd_options.seed, "importance-sampling seed");
  mdd->add_option("--out", mdd_out, "output directory");

  // identify
  auto* idn = app.add_subcommand("identify", "row-uniqueness verdicts from "
                                             "relative variance profiles");
  std::string idn_store, idn_var, idn_out = "out";
  double idn_tol = 1e-2;
  int idn_batches = 2000;
  idn->add_option("--store", idn_store,
                  "draw-store directory (verdicts at the posterior mean)");
  idn->add_option("--variances", idn_var,
                  "CSV of regime shock variances, one row per regime");
  idn->add_option("--tol", idn_tol, "relative tolerance for profile collisions");
  idn->add_option("--batches", idn_batches, "batches for the SDDR NSEs");
  idn->add_option("--out", idn_out, "output directory");

  // compare
  auto* cmp = app.add_subcommand("compare", "estimate under several schemes "
                                            "and rank marginal data densities");
  CommonFlags cmp_flags;
  cmp_flags.attach(cmp, true);
  std::string cmp_schemes;
  int cmp_mdd_draws = 20000;
  cmp->add_option("--schemes", cmp_schemes, "comma list of scheme presets")
      ->required();
  cmp->add_option("--mdd-draws", cmp_mdd_draws, "importance draws per scheme");

  int rc = 0;
  sim->callback([&] {
    RunConfig cfg = sim_flags.resolve();
    if (o_len->count()) cfg.simulate_T = sim_length;
    if (o_sburn->count()) cfg.simulate_burn = sim_burn;
    rc = cmd_simulate(cfg, truth_path);
  });
  est->callback([&] { rc = cmd_estimate(est_flags.resolve()); });
  sdd->callback(
      [&] { rc = cmd_sddr(sddr_store, sddr_specs, sddr_batches, sddr_out); });
  mdd->callback(
      [&] { rc = cmd_mdd(mdd_stores, mdd_data, mdd_options, mdd_out); });
  idn->callback([&] {
    rc = cmd_identify(idn_store, idn_var, idn_tol, idn_batches, idn_out);
  });
  cmp->callback([&] {
    RunConfig cfg = cmp_flags.resolve();
    MddOptions opt;
    opt.draws = cmp_mdd_draws;
    opt.seed = cfg.sampler.seed + 1;
    rc = cmd_compare(cfg, cmp_schemes, opt);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
