#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "svarmsh/data.hpp"
#include "svarmsh/gibbs.hpp"
#include "svarmsh/inference.hpp"

namespace svarmsh {

// ---------------------------------------------------------------------------
// CSV: header row of variable names, one observation per row, chronological.
// Ragged rows, non-numeric or missing cells raise InputError naming the
// offending row and column.
// ---------------------------------------------------------------------------
TimeSeriesData load_csv(const std::string& path);
void save_csv(const std::string& path, const TimeSeriesData& data);

// Numeric matrix without header (restriction matrices, variance tables).
Eigen::MatrixXd load_matrix_csv(const std::string& path);
void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                     const std::vector<std::string>& column_names = {});

// ---------------------------------------------------------------------------
// Run configuration: flat "key = value" file with [section] headers and
// '#' comments.  Grammar documented in docs/config.md.
// ---------------------------------------------------------------------------
struct RunConfig {
  std::string data_path;              // [data] path
  int lags = 1;                       // [model] lags
  int regimes = 2;                    // [model] regimes
  std::string scheme_preset = "unrestricted"; // [scheme] preset
  std::vector<int> restricted_rows;   // [scheme] rows (1-based; empty = all)
  std::string q_matrix_path;          // [scheme] q_matrix
  std::string q_vector_path;          // [scheme] q_vector
  std::map<std::string, double> prior_scalars; // [prior] a_lambda, ...
  std::vector<double> persistence;    // [prior] persistence
  SamplerConfig sampler;              // [sampler]
  std::string output_dir = "out";     // [output] dir
  // [simulate]
  int simulate_T = 500;
  int simulate_burn = 100;
};

RunConfig parse_config(const std::string& path);

// Resolves the configured restriction scheme for an N-variable system.
RestrictionScheme scheme_from_config(const RunConfig& config, int N);

// Prior hyperparameters from the config's [prior] section.
PriorHyperparameters prior_from_config(const RunConfig& config, int N, int M);

// ---------------------------------------------------------------------------
// Draw-store persistence: one little-endian float64 binary file per chain
// (columnar layout) plus a JSON sidecar with the column order and run
// metadata.  Format documented in docs/draw-store.md.
// ---------------------------------------------------------------------------
void save_draw_store(const std::string& directory, const DrawStore& store);
DrawStore load_draw_store(const std::string& directory);

// Column names of the per-draw record, in file order.
std::vector<std::string> draw_store_columns(int N, int M, int p, int K, int r);

// FNV-1a digest of a raw byte range (data fingerprint in store metadata).
std::uint64_t fnv1a64(const void* bytes, std::size_t size);
std::uint64_t data_digest(const TimeSeriesData& data);

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------
void write_summary_csv(const std::string& path,
                       const std::vector<ParameterSummary>& summary);
void write_state_probability_csv(const std::string& path,
                                 const Eigen::MatrixXd& probs); // M x T

} // namespace svarmsh
