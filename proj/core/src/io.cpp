#include "svarmsh/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "svarmsh/errors.hpp"

namespace svarmsh {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& cell, const std::string& where) {
  const std::string t = trim(cell);
  if (t.empty()) throw InputError(where + ": empty value");
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw InputError(where + ": cannot parse '" + t + "' as a number");
  if (!std::isfinite(v))
    throw InputError(where + ": non-finite value '" + t + "'");
  return v;
}

long parse_int(const std::string& cell, const std::string& where) {
  const std::string t = trim(cell);
  if (t.empty()) throw InputError(where + ": empty value");
  long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw InputError(where + ": cannot parse '" + t + "' as an integer");
  return v;
}

bool parse_bool(const std::string& cell, const std::string& where) {
  std::string t = trim(cell);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw InputError(where + ": expected a boolean, got '" + cell + "'");
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void write_le_doubles(std::ofstream& out, const double* values, std::size_t n) {
  std::vector<unsigned char> buf(n * 8);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &values[i], 8);
    for (int b = 0; b < 8; ++b)
      buf[i * 8 + b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
}

std::vector<double> read_le_doubles(const std::string& path,
                                    std::size_t expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() != expected * 8)
    throw InputError("'" + path + "': expected " + std::to_string(expected * 8) +
                     " bytes, found " + std::to_string(buf.size()));
  std::vector<double> values(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(buf[i * 8 + b]) << (8 * b);
    std::memcpy(&values[i], &bits, 8);
  }
  return values;
}

} // namespace

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

TimeSeriesData load_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw InputError("'" + path + "': file is empty");

  const auto header = split(lines[0], ',');
  std::vector<std::string> names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string name = trim(header[j]);
    if (name.empty())
      throw InputError("'" + path + "' line 1: empty name for column " +
                       std::to_string(j + 1));
    names.push_back(name);
  }
  const int N = static_cast<int>(names.size());

  std::vector<std::vector<double>> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto cells = split(lines[li], ',');
    const std::string where = "'" + path + "' line " + std::to_string(li + 1);
    if (static_cast<int>(cells.size()) != N)
      throw InputError(where + ": found " + std::to_string(cells.size()) +
                       " fields, expected " + std::to_string(N));
    std::vector<double> row(N);
    for (int j = 0; j < N; ++j)
      row[j] = parse_double(cells[j], where + ", column '" + names[j] + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw InputError("'" + path + "': no observations after the header row");

  TimeSeriesData data;
  data.names = names;
  data.initial_conditions.resize(N, 0);
  data.Y.resize(N, static_cast<int>(rows.size()));
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (int j = 0; j < N; ++j) data.Y(j, static_cast<int>(t)) = rows[t][j];
  return data;
}

void save_csv(const std::string& path, const TimeSeriesData& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  for (int j = 0; j < data.N(); ++j)
    out << (j ? "," : "") << data.names[static_cast<std::size_t>(j)];
  out << "\n";
  auto emit_col = [&](const Eigen::VectorXd& col) {
    for (int j = 0; j < col.size(); ++j) out << (j ? "," : "") << fmt(col(j));
    out << "\n";
  };
  for (int t = 0; t < data.initial_conditions.cols(); ++t)
    emit_col(data.initial_conditions.col(t));
  for (int t = 0; t < data.T(); ++t) emit_col(data.Y.col(t));
}

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<std::vector<double>> rows;
  int cols = -1;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto cells = split(lines[li], ',');
    const std::string where = "'" + path + "' line " + std::to_string(li + 1);
    if (cols < 0)
      cols = static_cast<int>(cells.size());
    else if (static_cast<int>(cells.size()) != cols)
      throw InputError(where + ": found " + std::to_string(cells.size()) +
                       " fields, expected " + std::to_string(cols));
    std::vector<double> row;
    for (std::size_t j = 0; j < cells.size(); ++j)
      row.push_back(
          parse_double(cells[j], where + ", field " + std::to_string(j + 1)));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("'" + path + "': no numeric rows");
  Eigen::MatrixXd m(static_cast<int>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < cols; ++j) m(static_cast<int>(i), j) = rows[i][j];
  return m;
}

void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                     const std::vector<std::string>& column_names) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  if (!column_names.empty()) {
    if (static_cast<int>(column_names.size()) != m.cols())
      throw InputError("column name count does not match matrix width");
    for (std::size_t j = 0; j < column_names.size(); ++j)
      out << (j ? "," : "") << column_names[j];
    out << "\n";
  }
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out << (j ? "," : "") << fmt(m(i, j));
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

RunConfig parse_config(const std::string& path) {
  const auto lines = read_lines(path);
  RunConfig cfg;
  std::string section;

  for (std::size_t li = 0; li < lines.size(); ++li) {
    std::string line = lines[li];
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "'" + path + "' line " + std::to_string(li + 1);

    if (line.front() == '[') {
      if (line.back() != ']')
        throw InputError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "data" && section != "model" && section != "scheme" &&
          section != "prior" && section != "sampler" && section != "output" &&
          section != "simulate")
        throw InputError(where + ": unknown section [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw InputError(where + ": empty key");
    if (section.empty())
      throw InputError(where + ": key '" + key + "' outside any section");
    const std::string ctx = where + " ('" + key + "')";

    auto unknown = [&]() -> InputError {
      return InputError(where + ": unknown key '" + key + "' in section [" +
                        section + "]");
    };

    if (section == "data") {
      if (key == "path") cfg.data_path = value;
      else throw unknown();
    } else if (section == "model") {
      if (key == "lags") cfg.lags = static_cast<int>(parse_int(value, ctx));
      else if (key == "regimes") cfg.regimes = static_cast<int>(parse_int(value, ctx));
      else throw unknown();
    } else if (section == "scheme") {
      if (key == "preset") cfg.scheme_preset = value;
      else if (key == "rows") {
        cfg.restricted_rows.clear();
        if (trim(value) != "all")
          for (const auto& tok : split(value, ','))
            cfg.restricted_rows.push_back(static_cast<int>(parse_int(tok, ctx)));
      } else if (key == "q_matrix") cfg.q_matrix_path = value;
      else if (key == "q_vector") cfg.q_vector_path = value;
      else throw unknown();
    } else if (section == "prior") {
      if (key == "persistence") {
        cfg.persistence.clear();
        for (const auto& tok : split(value, ','))
          cfg.persistence.push_back(parse_double(tok, ctx));
      } else if (key == "a_lambda" || key == "b_lambda" || key == "a_omega" ||
                 key == "b_omega" || key == "a_shrink" || key == "b_shrink" ||
                 key == "e_diag" || key == "e_offdiag") {
        cfg.prior_scalars[key] = parse_double(value, ctx);
      } else throw unknown();
    } else if (section == "sampler") {
      if (key == "burn") cfg.sampler.burn = static_cast<int>(parse_int(value, ctx));
      else if (key == "draws") cfg.sampler.draws = static_cast<int>(parse_int(value, ctx));
      else if (key == "thin") cfg.sampler.thin = static_cast<int>(parse_int(value, ctx));
      else if (key == "chains") cfg.sampler.chains = static_cast<int>(parse_int(value, ctx));
      else if (key == "mh_dof") cfg.sampler.mh_dof = parse_double(value, ctx);
      else if (key == "mh_scale") cfg.sampler.mh_scale = parse_double(value, ctx);
      else if (key == "relabel") cfg.sampler.relabel = parse_bool(value, ctx);
      else if (key == "seed") cfg.sampler.seed = static_cast<std::uint64_t>(parse_int(value, ctx));
      else throw unknown();
    } else if (section == "output") {
      if (key == "dir") cfg.output_dir = value;
      else throw unknown();
    } else if (section == "simulate") {
      if (key == "length") cfg.simulate_T = static_cast<int>(parse_int(value, ctx));
      else if (key == "burn") cfg.simulate_burn = static_cast<int>(parse_int(value, ctx));
      else throw unknown();
    }
  }
  return cfg;
}

RestrictionScheme scheme_from_config(const RunConfig& config, int N) {
  if (!config.q_matrix_path.empty() || !config.q_vector_path.empty()) {
    if (config.q_matrix_path.empty() || config.q_vector_path.empty())
      throw InputError("custom scheme needs both q_matrix and q_vector");
    const Eigen::MatrixXd Q = load_matrix_csv(config.q_matrix_path);
    const Eigen::MatrixXd qm = load_matrix_csv(config.q_vector_path);
    if (qm.cols() != 1)
      throw InputError("q_vector must be a single column");
    return scheme_from_matrices(Q, qm.col(0), "custom");
  }
  const auto preset_opt = scheme_preset_from_name(config.scheme_preset);
  if (!preset_opt)
    throw InputError("unknown scheme preset '" + config.scheme_preset + "'");
  const SchemePreset preset = *preset_opt;
  if (config.restricted_rows.empty()) return make_scheme(preset, N);
  std::vector<int> rows;
  for (int r1 : config.restricted_rows) {
    if (r1 < 1 || r1 > N)
      throw InputError("restricted row " + std::to_string(r1) +
                       " outside 1.." + std::to_string(N));
    rows.push_back(r1 - 1);
  }
  return make_scheme(preset, N, rows);
}

PriorHyperparameters prior_from_config(const RunConfig& config, int N, int M) {
  PriorHyperparameters prior = PriorHyperparameters::defaults(N, M);
  double e_diag = 10.0, e_offdiag = 1.0;
  for (const auto& [key, value] : config.prior_scalars) {
    if (key == "a_lambda") prior.a_lambda = value;
    else if (key == "b_lambda") prior.b_lambda = value;
    else if (key == "a_omega") prior.a_omega = value;
    else if (key == "b_omega") prior.b_omega = value;
    else if (key == "a_shrink") prior.a_shrink = value;
    else if (key == "b_shrink") prior.b_shrink = value;
    else if (key == "e_diag") e_diag = value;
    else if (key == "e_offdiag") e_offdiag = value;
  }
  prior.e = Eigen::MatrixXd::Constant(M, M, e_offdiag);
  prior.e.diagonal().setConstant(e_diag);
  if (!config.persistence.empty()) {
    if (config.persistence.size() == 1)
      prior.persistence.setConstant(config.persistence[0]);
    else if (static_cast<int>(config.persistence.size()) == N)
      for (int n = 0; n < N; ++n) prior.persistence(n) = config.persistence[static_cast<std::size_t>(n)];
    else
      throw InputError("persistence needs 1 or " + std::to_string(N) +
                       " values, got " + std::to_string(config.persistence.size()));
  }
  return prior;
}

// ---------------------------------------------------------------------------
// Draw store
// ---------------------------------------------------------------------------

std::vector<std::string> draw_store_columns(int N, int M, int p, int K, int r) {
  (void)p;
  std::vector<std::string> cols;
  for (int k = 0; k < r; ++k) cols.push_back("alpha_" + std::to_string(k + 1));
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < K; ++k)
      cols.push_back("A_" + std::to_string(n + 1) + "_" + std::to_string(k + 1));
  for (int n = 0; n < N; ++n) cols.push_back("lambda_" + std::to_string(n + 1));
  for (int m = 2; m <= M; ++m)
    for (int n = 0; n < N; ++n)
      cols.push_back("omega_" + std::to_string(m) + "_" + std::to_string(n + 1));
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j)
      cols.push_back("p_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  cols.push_back("gamma_alpha");
  cols.push_back("gamma_mu");
  cols.push_back("gamma_beta");
  for (int m = 1; m <= M; ++m) cols.push_back("state_count_" + std::to_string(m));
  for (int m = 2; m <= M; ++m)
    for (int n = 0; n < N; ++n)
      cols.push_back("rb_shape_" + std::to_string(m) + "_" + std::to_string(n + 1));
  for (int m = 2; m <= M; ++m)
    for (int n = 0; n < N; ++n)
      cols.push_back("rb_scale_" + std::to_string(m) + "_" + std::to_string(n + 1));
  cols.push_back("log_likelihood");
  cols.push_back("mh_accepted");
  return cols;
}

namespace {

std::vector<double> draw_record(const PosteriorDraw& d, int N, int M, int K,
                                int r) {
  std::vector<double> row;
  row.reserve(static_cast<std::size_t>(r + N * K + N + 3 * (M - 1) * N + M * M + 3 + M + 2));
  for (int k = 0; k < r; ++k) row.push_back(d.alpha(k));
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < K; ++k) row.push_back(d.A(n, k));
  for (int n = 0; n < N; ++n) row.push_back(d.lambda1(n));
  for (int m = 0; m < M - 1; ++m)
    for (int n = 0; n < N; ++n) row.push_back(d.omega(m, n));
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) row.push_back(d.P(i, j));
  row.push_back(d.gamma_alpha);
  row.push_back(d.gamma_mu);
  row.push_back(d.gamma_beta);
  for (int m = 0; m < M; ++m) row.push_back(static_cast<double>(d.state_counts(m)));
  for (int m = 0; m < M - 1; ++m)
    for (int n = 0; n < N; ++n) row.push_back(d.rb_shape(m, n));
  for (int m = 0; m < M - 1; ++m)
    for (int n = 0; n < N; ++n) row.push_back(d.rb_scale(m, n));
  row.push_back(d.log_likelihood);
  row.push_back(d.mh_accepted ? 1.0 : 0.0);
  return row;
}

PosteriorDraw record_to_draw(const double* row, int N, int M, int K, int r) {
  PosteriorDraw d;
  std::size_t o = 0;
  d.alpha.resize(r);
  for (int k = 0; k < r; ++k) d.alpha(k) = row[o++];
  d.A.resize(N, K);
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < K; ++k) d.A(n, k) = row[o++];
  d.lambda1.resize(N);
  for (int n = 0; n < N; ++n) d.lambda1(n) = row[o++];
  d.omega.resize(M - 1, N);
  for (int m = 0; m < M - 1; ++m)
    for (int n = 0; n < N; ++n) d.omega(m, n) = row[o++];
  d.P.resize(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) d.P(i, j) = row[o++];
  d.gamma_alpha = row[o++];
  d.gamma_mu = row[o++];
  d.gamma_beta = row[o++];
  d.state_counts.resize(M);
  for (int m = 0; m < M; ++m) d.state_counts(m) = static_cast<int>(std::lround(row[o++]));
  d.rb_shape.resize(M - 1, N);
  for (int m = 0; m < M - 1; ++m)
    for (int n = 0; n < N; ++n) d.rb_shape(m, n) = row[o++];
  d.rb_scale.resize(M - 1, N);
  for (int m = 0; m < M - 1; ++m)
    for (int n = 0; n < N; ++n) d.rb_scale(m, n) = row[o++];
  d.log_likelihood = row[o++];
  d.mh_accepted = row[o++] > 0.5;
  return d;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  const int nr = static_cast<int>(rows.size());
  if (nr == 0) return Eigen::MatrixXd(0, 0);
  const int nc = static_cast<int>(rows[0].size());
  Eigen::MatrixXd m(nr, nc);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
  return m;
}

std::string digest_hex(std::uint64_t digest) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(digest));
  return buf;
}

} // namespace

void save_draw_store(const std::string& directory, const DrawStore& store) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const auto columns = draw_store_columns(store.N, store.M, store.p, store.K, store.r);
  const std::size_t C = columns.size();

  json meta;
  meta["format"] = "svarmsh-draws";
  meta["version"] = 1;
  meta["model"] = {{"variables", store.N},
                   {"regimes", store.M},
                   {"lags", store.p},
                   {"design_rows", store.K},
                   {"free_coefficients", store.r}};
  meta["variable_names"] = store.variable_names;
  meta["data_digest"] = digest_hex(store.data_digest);
  meta["sampler"] = {{"burn", store.config.burn},     {"draws", store.config.draws},
                     {"thin", store.config.thin},     {"chains", store.config.chains},
                     {"mh_dof", store.config.mh_dof}, {"mh_scale", store.config.mh_scale},
                     {"relabel", store.config.relabel},
                     {"seed", store.config.seed}};
  meta["prior"] = {{"a_lambda", store.prior.a_lambda}, {"b_lambda", store.prior.b_lambda},
                   {"a_omega", store.prior.a_omega},   {"b_omega", store.prior.b_omega},
                   {"a_shrink", store.prior.a_shrink}, {"b_shrink", store.prior.b_shrink},
                   {"e", matrix_to_json(store.prior.e)}};
  meta["prior"]["persistence"] = matrix_to_json(store.prior.persistence);
  json cells = json::array();
  for (const auto& [i, j] : store.scheme.primary_cells)
    cells.push_back(json::array({i, j}));
  meta["scheme"] = {{"label", store.scheme.label},
                    {"Q", matrix_to_json(store.scheme.Q)},
                    {"q", matrix_to_json(store.scheme.q)},
                    {"primary_cells", cells}};
  meta["columns"] = columns;

  json chains = json::array();
  for (std::size_t c = 0; c < store.chains.size(); ++c) {
    const ChainResult& chain = store.chains[c];
    const std::size_t S = chain.draws.size();
    const std::string bin_name = "chain_" + std::to_string(chain.chain_id) + ".bin";
    const std::string probs_name =
        "state_probability_" + std::to_string(chain.chain_id) + ".csv";

    Eigen::MatrixXd table(static_cast<int>(S), static_cast<int>(C));
    for (std::size_t s = 0; s < S; ++s) {
      const auto row = draw_record(chain.draws[s], store.N, store.M, store.K, store.r);
      if (row.size() != C)
        throw ModelError("draw record width mismatch while saving");
      for (std::size_t j = 0; j < C; ++j)
        table(static_cast<int>(s), static_cast<int>(j)) = row[j];
    }
    std::ofstream bin((fs::path(directory) / bin_name).string(), std::ios::binary);
    if (!bin) throw InputError("cannot write '" + bin_name + "'");
    for (std::size_t j = 0; j < C; ++j) {
      const Eigen::VectorXd col = table.col(static_cast<int>(j));
      write_le_doubles(bin, col.data(), S);
    }
    write_state_probability_csv((fs::path(directory) / probs_name).string(),
                                chain.state_probability);
    chains.push_back({{"id", chain.chain_id},
                      {"file", bin_name},
                      {"state_probability_file", probs_name},
                      {"draws", S},
                      {"mh_acceptance_rate", chain.mh_acceptance_rate}});
  }
  meta["chains"] = chains;

  std::ofstream mf((fs::path(directory) / "meta.json").string(), std::ios::binary);
  if (!mf) throw InputError("cannot write meta.json in '" + directory + "'");
  mf << meta.dump(2) << "\n";
}

DrawStore load_draw_store(const std::string& directory) {
  namespace fs = std::filesystem;
  const std::string meta_path = (fs::path(directory) / "meta.json").string();
  std::ifstream mf(meta_path, std::ios::binary);
  if (!mf) throw InputError("cannot open '" + meta_path + "'");
  json meta;
  try {
    mf >> meta;
  } catch (const json::exception& e) {
    throw InputError("'" + meta_path + "': " + e.what());
  }
  if (meta.value("format", "") != "svarmsh-draws")
    throw InputError("'" + meta_path + "': not a draw store");

  DrawStore store;
  store.N = meta["model"]["variables"].get<int>();
  store.M = meta["model"]["regimes"].get<int>();
  store.p = meta["model"]["lags"].get<int>();
  store.K = meta["model"]["design_rows"].get<int>();
  store.r = meta["model"]["free_coefficients"].get<int>();
  store.variable_names = meta["variable_names"].get<std::vector<std::string>>();
  store.data_digest = std::stoull(meta["data_digest"].get<std::string>(), nullptr, 16);

  const json& s = meta["sampler"];
  store.config.burn = s["burn"].get<int>();
  store.config.draws = s["draws"].get<int>();
  store.config.thin = s["thin"].get<int>();
  store.config.chains = s["chains"].get<int>();
  store.config.mh_dof = s["mh_dof"].get<double>();
  store.config.mh_scale = s["mh_scale"].get<double>();
  store.config.relabel = s["relabel"].get<bool>();
  store.config.seed = s["seed"].get<std::uint64_t>();

  const json& pr = meta["prior"];
  store.prior.a_lambda = pr["a_lambda"].get<double>();
  store.prior.b_lambda = pr["b_lambda"].get<double>();
  store.prior.a_omega = pr["a_omega"].get<double>();
  store.prior.b_omega = pr["b_omega"].get<double>();
  store.prior.a_shrink = pr["a_shrink"].get<double>();
  store.prior.b_shrink = pr["b_shrink"].get<double>();
  store.prior.e = matrix_from_json(pr["e"]);
  store.prior.persistence = matrix_from_json(pr["persistence"]);

  const json& sc = meta["scheme"];
  store.scheme.N = store.N;
  store.scheme.label = sc["label"].get<std::string>();
  store.scheme.Q = matrix_from_json(sc["Q"]);
  store.scheme.q = matrix_from_json(sc["q"]);
  store.scheme.r = static_cast<int>(store.scheme.Q.cols());
  for (const auto& cell : sc["primary_cells"])
    store.scheme.primary_cells.emplace_back(cell[0].get<int>(), cell[1].get<int>());

  const auto columns = draw_store_columns(store.N, store.M, store.p, store.K, store.r);
  const std::size_t C = columns.size();
  if (meta["columns"].get<std::vector<std::string>>() != columns)
    throw InputError("'" + meta_path + "': column layout mismatch");

  for (const auto& cj : meta["chains"]) {
    ChainResult chain;
    chain.chain_id = cj["id"].get<int>();
    chain.mh_acceptance_rate = cj["mh_acceptance_rate"].get<double>();
    const std::size_t S = cj["draws"].get<std::size_t>();
    const std::string bin_path =
        (fs::path(directory) / cj["file"].get<std::string>()).string();
    const auto values = read_le_doubles(bin_path, S * C);
    std::vector<double> row(C);
    for (std::size_t i = 0; i < S; ++i) {
      for (std::size_t j = 0; j < C; ++j) row[j] = values[j * S + i];
      chain.draws.push_back(record_to_draw(row.data(), store.N, store.M, store.K, store.r));
    }
    const std::string probs_path =
        (fs::path(directory) / cj["state_probability_file"].get<std::string>()).string();
    // labeled CSV, one column per regime
    chain.state_probability = load_csv(probs_path).Y;
    store.chains.push_back(std::move(chain));
  }
  return store;
}

std::uint64_t fnv1a64(const void* bytes, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t data_digest(const TimeSeriesData& data) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](const void* bytes, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < size; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  const std::int64_t dims[3] = {data.N(), data.initial_conditions.cols(), data.T()};
  mix(dims, sizeof(dims));
  if (data.initial_conditions.size() > 0)
    mix(data.initial_conditions.data(),
        static_cast<std::size_t>(data.initial_conditions.size()) * sizeof(double));
  if (data.Y.size() > 0)
    mix(data.Y.data(), static_cast<std::size_t>(data.Y.size()) * sizeof(double));
  for (const auto& name : data.names) {
    mix(name.data(), name.size());
    mix("\n", 1);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

void write_summary_csv(const std::string& path,
                       const std::vector<ParameterSummary>& summary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << "parameter,mean,sd,q05,median,q95\n";
  for (const auto& row : summary)
    out << row.name << "," << fmt(row.mean) << "," << fmt(row.sd) << ","
        << fmt(row.q05) << "," << fmt(row.median) << "," << fmt(row.q95) << "\n";
}

void write_state_probability_csv(const std::string& path,
                                 const Eigen::MatrixXd& probs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  const int M = static_cast<int>(probs.rows());
  const int T = static_cast<int>(probs.cols());
  for (int m = 0; m < M; ++m)
    out << (m ? "," : "") << "regime_" << (m + 1);
  out << "\n";
  for (int t = 0; t < T; ++t) {
    for (int m = 0; m < M; ++m) out << (m ? "," : "") << fmt(probs(m, t));
    out << "\n";
  }
}

} // namespace svarmsh
