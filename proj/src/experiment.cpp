#include "rbd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "rbd/kernels/api.hpp"

namespace rbd {

const char* to_string(ContextStrategy s) {
  return s == ContextStrategy::Random ? "random" : "greedy-entropy";
}

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 0) jobs = int(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(jobs));
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::vector<int> seeded_permutation(int n, std::uint64_t seed) {
  std::vector<int> perm(std::size_t(n));
  std::iota(perm.begin(), perm.end(), 0);
  const UniformStream stream(seed, kStreamContext);
  for (int i = 0; i + 1 < n; ++i) {
    const int j = i + int(stream.word(std::uint64_t(i)) % std::uint32_t(n - i));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

// Shared-node selection. Random is a seeded permutation prefix, so shared
// sets are nested across K for one trial. Greedy ranks nodes by their row's
// empirical label entropy (descending, ties by id), which also nests.
std::vector<int> pick_context(int n, const LabelDistribution& dist,
                              std::uint64_t world_seed, int k,
                              ContextStrategy strategy) {
  if (k > n) throw std::invalid_argument("shared set larger than the world");
  if (strategy == ContextStrategy::Random) {
    auto perm = seeded_permutation(n, world_seed);
    perm.resize(std::size_t(k));
    return perm;
  }
  if (n > 2048) {
    throw std::invalid_argument("greedy-entropy selection caps at n = 2048");
  }
  const WorldGraph world = generate_er_labeled(n, dist, world_seed);
  std::vector<std::pair<double, int>> ranked(std::size_t(n));
  std::vector<std::uint64_t> counts(world.alphabet.size());
  for (int y = 0; y < n; ++y) {
    std::fill(counts.begin(), counts.end(), 0);
    for (int j = 0; j < n; ++j) {
      if (j != y) counts[world.at(y, j)]++;
    }
    ranked[y] = {-entropy_from_counts(counts, std::uint64_t(n - 1)), y};
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<int> out(std::size_t(k));
  for (int i = 0; i < k; ++i) out[i] = ranked[i].second;
  return out;
}

struct IdentityTrial {
  double collisions = 0;  // nodes minus distinct description strings
  double members = 0;     // nodes belonging to duplicate classes
  double h_measured = 0;  // pooled empirical symbol entropy
};

IdentityTrial run_identity_trial(int n, const LabelDistribution& dist,
                                 std::uint64_t world_seed, int k,
                                 ContextStrategy strategy) {
  const auto anchors = pick_context(n, dist, world_seed, k, strategy);

  std::vector<Label> cols(std::size_t(k) * n);
  for (int j = 0; j < k; ++j) {
    er_column_labels(n, dist, world_seed, anchors[j],
                     std::span<Label>(cols.data() + std::size_t(j) * n, n));
  }

  std::vector<std::uint64_t> hashes(std::size_t(n));
  kernels::active().hash_columns(cols.data(), std::size_t(k), std::size_t(n),
                                 hashes.data());

  std::vector<int> order(std::size_t(n));
  std::iota(order.begin(), order.end(), 0);
  auto column_less = [&](int a, int b) {
    for (int j = 0; j < k; ++j) {
      const Label la = cols[std::size_t(j) * n + a];
      const Label lb = cols[std::size_t(j) * n + b];
      if (la != lb) return la < lb;
    }
    return false;
  };
  auto column_eq = [&](int a, int b) {
    for (int j = 0; j < k; ++j) {
      if (cols[std::size_t(j) * n + a] != cols[std::size_t(j) * n + b]) {
        return false;
      }
    }
    return true;
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (hashes[a] != hashes[b]) return hashes[a] < hashes[b];
    return column_less(a, b);
  });

  IdentityTrial t;
  int classes = 0;
  int run = 0;
  for (int i = 0; i < n; ++i) {
    if (i == 0 || hashes[order[i]] != hashes[order[i - 1]] ||
        !column_eq(order[i], order[i - 1])) {
      if (run >= 2) t.members += run;
      ++classes;
      run = 1;
    } else {
      ++run;
    }
  }
  if (run >= 2) t.members += run;
  t.collisions = double(n - classes);

  std::vector<std::uint64_t> symbol_counts(dist.alphabet.size(), 0);
  for (const Label l : cols) symbol_counts[l]++;
  t.h_measured = entropy_from_counts(symbol_counts, cols.size());
  return t;
}

struct NoisyTrial {
  double rate = 0;
  double m_d = 0;
};

NoisyTrial run_noisy_trial(int n, const LabelDistribution& dist, double eps,
                           std::uint64_t world_seed, int k_base, int ext,
                           int probes_requested) {
  const int vocab = int(dist.alphabet.size());
  const ChannelNoiseModel channel = ChannelNoiseModel::symmetric(vocab, eps);
  const int k_total = k_base + ext;
  const auto anchors =
      pick_context(n, dist, world_seed, k_total, ContextStrategy::Random);

  std::vector<Label> sender_cols(std::size_t(k_total) * n);
  std::vector<Label> receiver_cols(std::size_t(k_total) * n);
  for (int j = 0; j < k_total; ++j) {
    const std::span<Label> s(sender_cols.data() + std::size_t(j) * n, n);
    const std::span<Label> r(receiver_cols.data() + std::size_t(j) * n, n);
    er_column_labels(n, dist, world_seed, anchors[j], s);
    perturbed_column_labels(n, channel, world_seed, anchors[j], s, r);
  }

  const JointLabelStats stats = er_joint_stats(n, dist, channel, world_seed);

  NoisyTrial t;
  t.m_d = mutual_information(stats);

  const MlDecoder decoder(n, std::size_t(k_total), std::move(receiver_cols),
                          stats);

  std::vector<char> is_anchor(std::size_t(n), 0);
  for (int a : anchors) is_anchor[a] = 1;
  std::vector<int> pool;
  pool.reserve(std::size_t(n - k_total));
  for (int y = 0; y < n; ++y) {
    if (!is_anchor[y]) pool.push_back(y);
  }
  const int probes = std::min<int>(probes_requested, int(pool.size()));
  const UniformStream probe_stream(world_seed, kStreamProbe);
  for (int i = 0; i < probes; ++i) {
    const int j =
        i + int(probe_stream.word(std::uint64_t(i)) %
                std::uint32_t(pool.size() - std::size_t(i)));
    std::swap(pool[i], pool[j]);
  }

  std::vector<Label> desc(std::size_t(k_total));
  int correct = 0;
  for (int i = 0; i < probes; ++i) {
    const int x = pool[i];
    for (int j = 0; j < k_total; ++j) {
      desc[std::size_t(j)] = sender_cols[std::size_t(j) * n + x];
    }
    const MlDecode got = decoder.decode(desc);
    if (got.node == x) ++correct;
  }
  t.rate = probes > 0 ? double(correct) / probes : 0.0;
  return t;
}

// Depth-rewritten variant: materializes both views, rewrites them, and runs
// ML over the enlarged vocabulary. Desk scale only.
NoisyTrial run_noisy_trial_depth(int n, const LabelDistribution& dist,
                                 double eps, std::uint64_t world_seed,
                                 int k_base, int ext, int probes_requested,
                                 int depth) {
  const int vocab = int(dist.alphabet.size());
  const ChannelNoiseModel channel = ChannelNoiseModel::symmetric(vocab, eps);
  const WorldGraph world = generate_er_labeled(n, dist, world_seed);
  const ViewPair pair = perturb_view(world, channel, world_seed);
  const WorldGraph sender_d = rewrite_adjacency_for_depth(pair.sender, depth);
  const WorldGraph receiver_d =
      rewrite_adjacency_for_depth(pair.receiver, depth);
  const JointLabelStats stats = joint_stats(sender_d, receiver_d);

  NoisyTrial t;
  t.m_d = mutual_information(stats);

  const int k_total = k_base + ext;
  const auto anchors =
      pick_context(n, dist, world_seed, k_total, ContextStrategy::Random);
  const MlDecoder decoder(receiver_d, anchors, stats);

  std::vector<char> is_anchor(std::size_t(n), 0);
  for (int a : anchors) is_anchor[a] = 1;
  std::vector<int> pool;
  for (int y = 0; y < n; ++y) {
    if (!is_anchor[y]) pool.push_back(y);
  }
  const int probes = std::min<int>(probes_requested, int(pool.size()));
  const UniformStream probe_stream(world_seed, kStreamProbe);
  for (int i = 0; i < probes; ++i) {
    const int j =
        i + int(probe_stream.word(std::uint64_t(i)) %
                std::uint32_t(pool.size() - std::size_t(i)));
    std::swap(pool[i], pool[j]);
  }

  std::vector<Label> desc(std::size_t(k_total));
  int correct = 0;
  for (int i = 0; i < probes; ++i) {
    const int x = pool[i];
    for (int j = 0; j < k_total; ++j) {
      desc[std::size_t(j)] = sender_d.at(x, anchors[j]);
    }
    if (decoder.decode(desc).node == x) ++correct;
  }
  t.rate = probes > 0 ? double(correct) / probes : 0.0;
  return t;
}

double run_overhead_trial(int n, const LabelDistribution& dist,
                          std::uint64_t world_seed, int k_ov, int triples) {
  const auto anchors =
      pick_context(n, dist, world_seed, k_ov, ContextStrategy::Random);

  std::vector<Label> cols(std::size_t(k_ov) * n);
  for (int j = 0; j < k_ov; ++j) {
    er_column_labels(n, dist, world_seed, anchors[j],
                     std::span<Label>(cols.data() + std::size_t(j) * n, n));
  }

  std::vector<char> is_anchor(std::size_t(n), 0);
  for (int a : anchors) is_anchor[a] = 1;
  std::vector<int> pool;
  for (int y = 0; y < n; ++y) {
    if (!is_anchor[y]) pool.push_back(y);
  }
  const int wanted = std::min<int>(2 * triples, int(pool.size()) / 2 * 2);
  const UniformStream probe_stream(world_seed, kStreamProbe);
  for (int i = 0; i < wanted; ++i) {
    const int j =
        i + int(probe_stream.word(std::uint64_t(i)) %
                std::uint32_t(pool.size() - std::size_t(i)));
    std::swap(pool[i], pool[j]);
  }

  auto described_ref = [&](int x) {
    Description d;
    d.base_len = k_ov;
    d.symbols.resize(std::size_t(k_ov));
    for (int j = 0; j < k_ov; ++j) {
      d.symbols[std::size_t(j)] = cols[std::size_t(j) * n + x];
    }
    return NodeRef::described(std::move(d));
  };

  Message msg;
  msg.n = n;
  msg.m_voc = int(dist.alphabet.size());
  for (int t = 0; t + 1 < wanted; t += 2) {
    Triple triple;
    triple.source = described_ref(pool[t]);
    triple.label = 1;
    triple.target = described_ref(pool[t + 1]);
    msg.triples.push_back(std::move(triple));
  }
  if (msg.triples.empty()) throw std::invalid_argument("world too small");

  SharedContext ctx;
  ctx.nodes = anchors;
  return encode_message(msg, ctx).stats.overhead_factor;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double sd_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / double(v.size() - 1));
}

void finish_identity_point(SweepPoint& p, const SweepConfig& cfg, double h_d) {
  const int trials = cfg.trials;
  std::vector<double> collisions(std::size_t(trials));
  std::vector<double> members(std::size_t(trials));
  std::vector<double> h_meas(std::size_t(trials));
  parallel_for(trials, cfg.jobs, [&](int t) {
    const IdentityTrial r =
        run_identity_trial(p.n, cfg.dist, mix_seed(cfg.seed, std::uint64_t(p.n), std::uint64_t(t)),
                           p.k, cfg.strategy);
    collisions[std::size_t(t)] = r.collisions;
    members[std::size_t(t)] = r.members;
    h_meas[std::size_t(t)] = r.h_measured;
  });
  p.trials = trials;
  p.collisions_mean = mean_of(collisions);
  p.collisions_sd = sd_of(collisions, p.collisions_mean);
  p.unresolved_mean = mean_of(members);
  p.resolution_rate = 1.0 - p.unresolved_mean / double(p.n);
  p.h_or_m_bits = mean_of(h_meas);
  p.predicted_c = expected_collisions(p.n, h_d, p.k);
  p.predicted_k_star = min_shared_names(p.n, h_d, 2.0).k_star;
  p.trial_collisions = std::move(collisions);
}

}  // namespace

ExperimentReport collision_experiment(const SweepConfig& cfg) {
  cfg.dist.validate();
  if (cfg.n_values.empty() || cfg.k_values.empty() || cfg.trials < 1) {
    throw std::invalid_argument("collision sweep needs n, k and trials");
  }
  const double h_d = analytic_label_entropy(cfg.dist);

  ExperimentReport report;
  report.kind = "collision";
  report.config = cfg;
  for (const int n : cfg.n_values) {
    for (const int k : cfg.k_values) {
      const auto start = std::chrono::steady_clock::now();
      SweepPoint p;
      p.n = n;
      p.k = k;
      finish_identity_point(p, cfg, h_d);
      p.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
      report.points.push_back(std::move(p));
    }
  }
  return report;
}

ExperimentReport threshold_sweep(const SweepConfig& cfg) {
  cfg.dist.validate();
  if (cfg.n_values.empty() || cfg.g_values.empty() || cfg.trials < 1) {
    throw std::invalid_argument("threshold sweep needs n, g and trials");
  }
  const double h_d = analytic_label_entropy(cfg.dist);
  if (h_d <= 0) throw std::invalid_argument("zero-entropy distribution");

  ExperimentReport report;
  report.kind = "threshold";
  report.config = cfg;
  for (const int n : cfg.n_values) {
    for (const double g : cfg.g_values) {
      const auto start = std::chrono::steady_clock::now();
      SweepPoint p;
      p.n = n;
      p.g = g;
      p.k = min_shared_names(n, h_d, g).k_star;
      finish_identity_point(p, cfg, h_d);
      p.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
      report.points.push_back(std::move(p));
    }
  }
  return report;
}

ExperimentReport noisy_view_sweep(const SweepConfig& cfg) {
  cfg.dist.validate();
  if (cfg.n_values.empty() || cfg.k_values.empty() || cfg.eps_values.empty() ||
      cfg.trials < 1) {
    throw std::invalid_argument("noisy sweep needs n, k, eps and trials");
  }
  if (cfg.depth > 0) {
    for (const int n : cfg.n_values) {
      if (n > 256) {
        throw std::invalid_argument(
            "depth-rewritten noisy sweeps cap at n = 256");
      }
    }
  }

  ExperimentReport report;
  report.kind = "noisy";
  report.config = cfg;
  for (const int n : cfg.n_values) {
    for (const double eps : cfg.eps_values) {
      for (const int k : cfg.k_values) {
        const auto start = std::chrono::steady_clock::now();
        SweepPoint p;
        p.n = n;
        p.eps = eps;
        p.k = k;
        p.ext = cfg.ext_len;
        p.trials = cfg.trials;

        std::vector<double> rates(std::size_t(cfg.trials));
        std::vector<double> mds(std::size_t(cfg.trials));
        parallel_for(cfg.trials, cfg.jobs, [&](int t) {
          const NoisyTrial r = run_noisy_trial(
              n, cfg.dist, eps,
              mix_seed(cfg.seed, std::uint64_t(n) * 1000003 + std::uint64_t(std::llround(eps * 1e6)), std::uint64_t(t)),
              k, cfg.ext_len, cfg.probes);
          rates[std::size_t(t)] = r.rate;
          mds[std::size_t(t)] = r.m_d;
        });
        p.resolution_rate = mean_of(rates);
        p.h_or_m_bits = mean_of(mds);
        p.predicted_c = p.h_or_m_bits > 0
                            ? expected_collisions(n, p.h_or_m_bits, k)
                            : 0.0;
        p.predicted_k_star =
            p.h_or_m_bits > 0 ? min_shared_names(n, p.h_or_m_bits, 2.0).k_star
                              : n;
        p.trial_rates = std::move(rates);
        p.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
        report.points.push_back(std::move(p));
      }
    }
  }
  return report;
}

ExperimentReport overhead_experiment(const SweepConfig& cfg) {
  cfg.dist.validate();
  if (cfg.n_values.empty() || cfg.trials < 1) {
    throw std::invalid_argument("overhead sweep needs n and trials");
  }

  ExperimentReport report;
  report.kind = "overhead";
  report.config = cfg;

  struct PointDist {
    double skew;
    LabelDistribution dist;
  };
  std::vector<PointDist> dists;
  if (cfg.skew_values.empty()) {
    dists.push_back({cfg.dist.probs.size() > 1 ? cfg.dist.probs[1] : 0.0,
                     cfg.dist});
  } else {
    for (const double s : cfg.skew_values) {
      if (!(s > 0.0 && s < 1.0)) {
        throw std::invalid_argument("skew outside (0, 1)");
      }
      LabelDistribution d;
      d.alphabet = LabelAlphabet::with_labels({"P"});
      d.probs = {1.0 - s, s};
      dists.push_back({s, std::move(d)});
    }
  }

  for (const int n : cfg.n_values) {
    for (const auto& pd : dists) {
      const auto start = std::chrono::steady_clock::now();
      const int m_voc = int(pd.dist.alphabet.size());
      const double h_d = analytic_label_entropy(pd.dist);
      if (h_d <= 0) throw std::invalid_argument("zero-entropy distribution");
      const int k_ov = int(std::ceil(
          2.0 * std::log2(double(m_voc)) * std::log2(double(n)) / h_d - 1e-9));

      SweepPoint p;
      p.n = n;
      p.skew = pd.skew;
      p.k = k_ov;
      p.trials = cfg.trials;
      p.h_or_m_bits = h_d;
      p.predicted_overhead_factor = 2.0 * std::log2(double(m_voc));

      std::vector<double> factors(std::size_t(cfg.trials));
      parallel_for(cfg.trials, cfg.jobs, [&](int t) {
        factors[std::size_t(t)] = run_overhead_trial(
            n, pd.dist,
            mix_seed(cfg.seed, std::uint64_t(n) * 31 + std::uint64_t(std::llround(pd.skew * 1e6)),
                     std::uint64_t(t)),
            k_ov, cfg.triples_per_message);
      });
      p.overhead_factor_mean = mean_of(factors);
      p.trial_factors = std::move(factors);
      p.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
      report.points.push_back(std::move(p));
    }
  }
  return report;
}

double interpolated_threshold_k(std::span<const std::pair<int, double>> points,
                                double target) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].second <= target) {
      if (i == 0) return double(points[0].first);
      const auto [k1, m1] = points[i - 1];
      const auto [k2, m2] = points[i];
      if (m2 <= 0.0) return double(k2);
      const double l1 = std::log2(m1), l2 = std::log2(m2);
      const double lt = std::log2(target);
      return double(k1) + (l1 - lt) / (l1 - l2) * double(k2 - k1);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// --- report output -----------------------------------------------------------

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string dist_spec(const LabelDistribution& d) {
  std::string out;
  for (std::size_t i = 0; i < d.alphabet.symbols.size(); ++i) {
    if (i > 0) out += ',';
    out += d.alphabet.symbols[i] + ":" + format_double(d.probs[i]);
  }
  return out;
}

std::string config_line(const SweepConfig& c) {
  std::string out = "seed=" + std::to_string(c.seed);
  out += ";trials=" + std::to_string(c.trials);
  out += ";strategy=" + std::string(to_string(c.strategy));
  out += ";depth=" + std::to_string(c.depth);
  out += ";ext=" + std::to_string(c.ext_len);
  out += ";probes=" + std::to_string(c.probes);
  out += ";triples=" + std::to_string(c.triples_per_message);
  out += ";dist=" + dist_spec(c.dist);
  return out;
}

}  // namespace

void ExperimentReport::write_csv(std::ostream& out) const {
  out << "# rbd sweep report\n";
  out << "# kind: " << kind << '\n';
  out << "# rng: " << rng_id << '\n';
  out << "# config: " << config_line(config) << '\n';
  out << "# columns: n,g,k,eps,skew,depth,ext,trials,h_or_m_bits,"
         "collisions_mean,collisions_sd,unresolved_mean,resolution_rate,"
         "predicted_c,predicted_k_star,overhead_factor_mean,"
         "predicted_overhead_factor\n";
  for (const auto& p : points) {
    out << p.n << ',' << format_double(p.g) << ',' << p.k << ','
        << format_double(p.eps) << ',' << format_double(p.skew) << ','
        << p.depth << ',' << p.ext << ',' << p.trials << ','
        << format_double(p.h_or_m_bits) << ','
        << format_double(p.collisions_mean) << ','
        << format_double(p.collisions_sd) << ','
        << format_double(p.unresolved_mean) << ','
        << format_double(p.resolution_rate) << ','
        << format_double(p.predicted_c) << ',' << p.predicted_k_star << ','
        << format_double(p.overhead_factor_mean) << ','
        << format_double(p.predicted_overhead_factor) << '\n';
  }
}

void ExperimentReport::write_json(std::ostream& out, bool full) const {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["rng"] = rng_id;
  nlohmann::ordered_json cfg;
  cfg["seed"] = config.seed;
  cfg["trials"] = config.trials;
  cfg["strategy"] = to_string(config.strategy);
  cfg["depth"] = config.depth;
  cfg["ext"] = config.ext_len;
  cfg["probes"] = config.probes;
  cfg["triples"] = config.triples_per_message;
  cfg["dist"] = dist_spec(config.dist);
  cfg["n"] = config.n_values;
  cfg["g"] = config.g_values;
  cfg["k"] = config.k_values;
  cfg["eps"] = config.eps_values;
  cfg["skews"] = config.skew_values;
  j["config"] = std::move(cfg);

  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (const auto& p : points) {
    nlohmann::ordered_json q;
    q["n"] = p.n;
    q["g"] = p.g;
    q["k"] = p.k;
    q["eps"] = p.eps;
    q["skew"] = p.skew;
    q["depth"] = p.depth;
    q["ext"] = p.ext;
    q["trials"] = p.trials;
    q["h_or_m_bits"] = p.h_or_m_bits;
    q["collisions_mean"] = p.collisions_mean;
    q["collisions_sd"] = p.collisions_sd;
    q["unresolved_mean"] = p.unresolved_mean;
    q["resolution_rate"] = p.resolution_rate;
    q["predicted_c"] = p.predicted_c;
    q["predicted_k_star"] = p.predicted_k_star;
    q["overhead_factor_mean"] = p.overhead_factor_mean;
    q["predicted_overhead_factor"] = p.predicted_overhead_factor;
    if (full) {
      q["trial_collisions"] = p.trial_collisions;
      q["trial_rates"] = p.trial_rates;
      q["trial_factors"] = p.trial_factors;
    }
    pts.push_back(std::move(q));
  }
  j["points"] = std::move(pts);
  out << j.dump(2) << '\n';
}

}  // namespace rbd
