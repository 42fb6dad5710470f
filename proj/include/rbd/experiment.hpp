#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rbd/codec.hpp"

namespace rbd {

enum class ContextStrategy { Random, GreedyEntropy };
const char* to_string(ContextStrategy s);

struct SweepConfig {
  std::vector<int> n_values;
  LabelDistribution dist;
  std::vector<double> g_values;     // threshold sweeps
  std::vector<int> k_values;        // collision / noisy sweeps
  std::vector<double> eps_values;   // noisy sweeps
  std::vector<double> skew_values;  // overhead sweeps (binary real-label prob)
  int depth = 0;                    // 0 = flat descriptions
  int ext_len = 0;                  // redundancy anchors beyond the base K
  int trials = 200;
  int probes = 256;                 // ML probes per trial (noisy sweeps)
  int triples_per_message = 8;      // overhead sweeps
  std::uint64_t seed = kDefaultSeed;
  ContextStrategy strategy = ContextStrategy::Random;
  int jobs = 0;  // 0 = hardware concurrency
};

struct SweepPoint {
  int n = 0;
  double g = 0;
  int k = 0;
  double eps = 0;
  double skew = 0;
  int depth = 0;
  int ext = 0;
  int trials = 0;
  double h_or_m_bits = 0;         // measured H_D (identity) or M_D (noisy)
  double collisions_mean = 0;     // nodes minus distinct description strings
  double collisions_sd = 0;       // per-trial standard deviation
  double unresolved_mean = 0;     // members of duplicate classes (promotions)
  double resolution_rate = 0;     // singleton-decode or ML-correct fraction
  double predicted_c = 0;
  int predicted_k_star = 0;
  double overhead_factor_mean = 0;
  double predicted_overhead_factor = 0;
  // Diagnostics only; printed to stderr, never written to report files.
  double wall_ms = 0;
  // Per-trial series for --full JSON output.
  std::vector<double> trial_collisions;
  std::vector<double> trial_rates;
  std::vector<double> trial_factors;
};

struct ExperimentReport {
  std::string kind;
  std::string rng_id = kRngId;
  SweepConfig config;
  std::vector<SweepPoint> points;

  // One row per sweep point, stable column order documented in the header
  // comment. Byte-identical across runs for identical (config, seed).
  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out, bool full) const;
};

// Identical views: build all flat descriptions over the shared set, count
// duplicate strings exactly, compare against C = n^2 / 2^(H_D K + 1).
ExperimentReport collision_experiment(const SweepConfig& cfg);

// Sweep G at fixed n; K = ceil(G log2(n) / H_D) per point.
ExperimentReport threshold_sweep(const SweepConfig& cfg);

// Divergent views: per (n, eps, K), measure M_D and the ML resolution rate
// over seeded probe nodes.
ExperimentReport noisy_view_sweep(const SweepConfig& cfg);

// Encode reference triples at the 2 log2(m_voc) log2(n) / h_d description
// length across label skews; report coded overhead vs 2 log2(m_voc).
ExperimentReport overhead_experiment(const SweepConfig& cfg);

struct FixtureResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// The five hand-built communication scenarios; each asserts its qualitative
// outcome (see src/fixtures.cpp for the constructions).
std::vector<FixtureResult> figure_fixtures();

// Log-linear interpolation of the K where mean collisions cross `target`.
// Points must be (k ascending, mean) with means decreasing overall.
double interpolated_threshold_k(std::span<const std::pair<int, double>> points,
                                double target = 1.0);

// Deterministic trial parallelism: results are indexed by trial, so the
// schedule never changes aggregates.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

}  // namespace rbd
