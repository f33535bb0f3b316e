#ifndef FR_MICRO_HPP
#define FR_MICRO_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "fr/choice.hpp"
#include "fr/paths.hpp"
#include "fr/sue.hpp"

namespace fr {

// ---------------------------------------------------------------------------
// Memory states: ordered lists of distinct path indices, most recent first,
// length <= B. After initialization lists hold min(B, |P|) distinct routes
// and never shrink.
// ---------------------------------------------------------------------------

using MemoryState = std::vector<int>;

// Deterministic LRU move-to-front / insert-evict update.
inline MemoryState lru_update(const MemoryState& m, int chosen_path, int budget) {
  require(budget >= 1, "lru_update: budget must be >= 1");
  MemoryState out;
  out.reserve(static_cast<std::size_t>(budget));
  out.push_back(chosen_path);
  for (int p : m) {
    if (p == chosen_path) continue;
    if (static_cast<int>(out.size()) >= budget) break;  // last element dropped
    out.push_back(p);
  }
  return out;
}

// A(m, q) = S(m) union {q}; preserves memory order, surfaced route appended.
inline std::vector<int> available_set(const MemoryState& m, int surfaced_q) {
  std::vector<int> a = m;
  if (std::find(a.begin(), a.end(), surfaced_q) == a.end()) a.push_back(surfaced_q);
  return a;
}

// ---------------------------------------------------------------------------
// Memory policy: budget, full-support surfacing distribution, optional
// Doeblin reset (per-period probability eps of redrawing the whole list from
// nu; by default nu samples min(B,|P|) routes without replacement from rho).
// ---------------------------------------------------------------------------

struct MemoryPolicy {
  // Eviction hook for future variants (FIFO, priority, summary retention);
  // only LRU ships.
  enum class Eviction { Lru };

  int budget = 1;
  std::vector<double> rho;  // full support over the commodity's paths
  double eps_reset = 0.0;
  Eviction eviction = Eviction::Lru;

  void validate(int n_paths) const {
    require(budget >= 1, "memory budget must be >= 1");
    require(static_cast<int>(rho.size()) == n_paths, "rho size mismatch");
    double s = 0.0;
    for (double r : rho) {
      require(r > 0.0, "surfacing distribution must have full support");
      s += r;
    }
    require(std::abs(s - 1.0) <= 1e-9, "surfacing distribution must sum to 1");
    require(eps_reset >= 0.0 && eps_reset <= 1.0, "reset rate must lie in [0,1]");
  }

  static MemoryPolicy uniform(int n_paths, int budget, double eps_reset = 0.0) {
    MemoryPolicy p;
    p.budget = budget;
    p.rho.assign(static_cast<std::size_t>(n_paths), 1.0 / n_paths);
    p.eps_reset = eps_reset;
    return p;
  }

  int list_length(int n_paths) const { return std::min(budget, n_paths); }
};

// ---------------------------------------------------------------------------
// Exact memory chain: enumerated ordered-list state space, dense kernel,
// stationary distribution. State count is n!/(n-L)!, factorial in the budget,
// so construction refuses spaces beyond `state_cap`.
// ---------------------------------------------------------------------------

struct MemoryChain {
  std::vector<MemoryState> states;
  Eigen::MatrixXd kernel;       // row-stochastic
  std::vector<double> stationary;

  int find_state(const MemoryState& m) const {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i] == m) return static_cast<int>(i);
    return -1;
  }
};

namespace detail {

inline void enumerate_lists(int n_paths, int length, MemoryState& cur,
                            std::vector<char>& used, std::vector<MemoryState>& out) {
  if (static_cast<int>(cur.size()) == length) {
    out.push_back(cur);
    return;
  }
  for (int p = 0; p < n_paths; ++p) {
    if (used[static_cast<std::size_t>(p)]) continue;
    used[static_cast<std::size_t>(p)] = 1;
    cur.push_back(p);
    enumerate_lists(n_paths, length, cur, used, out);
    cur.pop_back();
    used[static_cast<std::size_t>(p)] = 0;
  }
}

inline double state_count(int n_paths, int length) {
  double c = 1.0;
  for (int i = 0; i < length; ++i) c *= n_paths - i;
  return c;
}

// nu(m): draw the ordered list without replacement from rho.
inline double reset_state_prob(const MemoryState& m, const std::vector<double>& rho) {
  double prob = 1.0;
  double remaining = 1.0;
  for (int p : m) {
    prob *= rho[static_cast<std::size_t>(p)] / remaining;
    remaining -= rho[static_cast<std::size_t>(p)];
  }
  return prob;
}

inline std::vector<double> stationary_of(const Eigen::MatrixXd& P) {
  const int n = static_cast<int>(P.rows());
  if (n <= 4000) {
    // (I - P^T) pi = 0 with the last balance row replaced by normalization.
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - P.transpose();
    A.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::VectorXd pi = A.partialPivLu().solve(b);
    return std::vector<double>(pi.data(), pi.data() + n);
  }
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / n);
  for (int it = 0; it < 1000000; ++it) {
    Eigen::VectorXd next = P.transpose() * pi;
    next /= next.sum();
    const double diff = (next - pi).lpNorm<1>();
    pi = next;
    if (diff <= 1e-12) break;
  }
  return std::vector<double>(pi.data(), pi.data() + n);
}

}  // namespace detail

inline MemoryChain build_memory_kernel(const Network& net, const PathCatalog& catalog,
                                       int k, const MemoryPolicy& policy,
                                       const std::vector<double>& edge_loads, double beta,
                                       double state_cap = 2e5) {
  const int n = catalog.n_paths(k);
  policy.validate(n);
  const int length = policy.list_length(n);
  const double count = detail::state_count(n, length);
  if (count > state_cap)
    throw DomainError("memory state space has " + std::to_string(count) +
                      " states, beyond the cap; use simulate_micro or the TTL surrogate");

  MemoryChain chain;
  {
    MemoryState cur;
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    detail::enumerate_lists(n, length, cur, used, chain.states);
  }
  const int ns = static_cast<int>(chain.states.size());

  std::vector<double> costs(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p)
    costs[static_cast<std::size_t>(p)] =
        path_latency(net, edge_loads, catalog.paths(k)[static_cast<std::size_t>(p)]);

  std::map<MemoryState, int> index;
  for (int i = 0; i < ns; ++i) index[chain.states[static_cast<std::size_t>(i)]] = i;

  chain.kernel = Eigen::MatrixXd::Zero(ns, ns);
  for (int i = 0; i < ns; ++i) {
    const MemoryState& m = chain.states[static_cast<std::size_t>(i)];
    for (int q = 0; q < n; ++q) {
      const auto menu = available_set(m, q);
      std::vector<double> menu_costs(menu.size());
      for (std::size_t j = 0; j < menu.size(); ++j)
        menu_costs[j] = costs[static_cast<std::size_t>(menu[j])];
      const auto sigma = logit(menu_costs, beta);
      for (std::size_t j = 0; j < menu.size(); ++j) {
        const MemoryState next = lru_update(m, menu[j], policy.budget);
        chain.kernel(i, index.at(next)) +=
            policy.rho[static_cast<std::size_t>(q)] * sigma[j];
      }
    }
  }
  if (policy.eps_reset > 0.0) {
    Eigen::VectorXd nu(ns);
    for (int i = 0; i < ns; ++i)
      nu(i) = detail::reset_state_prob(chain.states[static_cast<std::size_t>(i)], policy.rho);
    chain.kernel = (1.0 - policy.eps_reset) * chain.kernel +
                   policy.eps_reset * Eigen::VectorXd::Ones(ns) * nu.transpose();
  }
  chain.stationary = detail::stationary_of(chain.kernel);
  return chain;
}

// Per-period choice distribution under a memory distribution mu at loads x:
// Pr(p) = sum_m mu(m) sum_q rho(q) sigma(p | m, q, x).
inline std::vector<double> chain_choice_distribution(const Network& net,
                                                     const PathCatalog& catalog, int k,
                                                     const MemoryPolicy& policy,
                                                     const MemoryChain& chain,
                                                     const std::vector<double>& mu,
                                                     const std::vector<double>& edge_loads,
                                                     double beta) {
  const int n = catalog.n_paths(k);
  std::vector<double> costs(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p)
    costs[static_cast<std::size_t>(p)] =
        path_latency(net, edge_loads, catalog.paths(k)[static_cast<std::size_t>(p)]);
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (std::size_t i = 0; i < chain.states.size(); ++i) {
    if (mu[i] == 0.0) continue;
    const MemoryState& m = chain.states[i];
    for (int q = 0; q < n; ++q) {
      const auto menu = available_set(m, q);
      std::vector<double> menu_costs(menu.size());
      for (std::size_t j = 0; j < menu.size(); ++j)
        menu_costs[j] = costs[static_cast<std::size_t>(menu[j])];
      const auto sigma = logit(menu_costs, beta);
      for (std::size_t j = 0; j < menu.size(); ++j)
        out[static_cast<std::size_t>(menu[j])] +=
            mu[i] * policy.rho[static_cast<std::size_t>(q)] * sigma[j];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// FWE fixed point (damped iteration on edge loads, recomputing stationary
// memory laws each round).
// ---------------------------------------------------------------------------

struct FweResult {
  std::vector<double> edge_loads;
  std::vector<std::vector<double>> path_flows;       // induced via the choice law
  std::vector<std::vector<double>> stationary_memory;  // per commodity, over states
  std::vector<MemoryChain> chains;
  double social_cost = 0.0;
  double residual = kInf;
  int iterations = 0;
  bool converged = false;
  double lipschitz_estimate = 0.0;  // empirical local factor, diagnostics
  std::string diagnostics;
};

inline FweResult fwe_fixed_point(const Network& net, const PathCatalog& catalog,
                                 const std::vector<MemoryPolicy>& policies, double beta,
                                 double eta = 0.5, double tol = 1e-10,
                                 int max_iter = 20000, double state_cap = 2e5) {
  catalog.validate(net);
  require(policies.size() == static_cast<std::size_t>(catalog.n_commodities()),
          "fwe_fixed_point: one policy per commodity required");
  require(eta > 0.0 && eta <= 1.0, "fwe_fixed_point: damping must lie in (0,1]");

  FweResult res;
  std::vector<double> x(static_cast<std::size_t>(net.n_edges()), 0.0);
  std::vector<double> prev_step_in, prev_step_out;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    std::vector<std::vector<double>> flows(static_cast<std::size_t>(catalog.n_commodities()));
    res.chains.clear();
    for (int k = 0; k < catalog.n_commodities(); ++k) {
      auto chain = build_memory_kernel(net, catalog, k, policies[static_cast<std::size_t>(k)],
                                       x, beta, state_cap);
      auto pi = chain_choice_distribution(net, catalog, k,
                                          policies[static_cast<std::size_t>(k)], chain,
                                          chain.stationary, x, beta);
      const double d = net.commodity(k).demand;
      for (double& v : pi) v *= d;
      flows[static_cast<std::size_t>(k)] = std::move(pi);
      res.chains.push_back(std::move(chain));
    }
    auto tx = edge_loads_of(net, catalog, flows);
    const double delta = linf_diff(tx, x);
    // empirical local Lipschitz factor of T along the iteration path
    if (!prev_step_in.empty()) {
      const double dx = linf_diff(x, prev_step_in);
      const double dt = linf_diff(tx, prev_step_out);
      if (dx > 1e-14) res.lipschitz_estimate = dt / dx;
    }
    prev_step_in = x;
    prev_step_out = tx;
    res.path_flows = std::move(flows);
    if (delta <= tol) {
      res.residual = delta;
      res.converged = true;
      x = tx;
      break;
    }
    for (std::size_t e = 0; e < x.size(); ++e) x[e] = (1.0 - eta) * x[e] + eta * tx[e];
    res.residual = delta;
  }
  res.edge_loads = x;
  res.iterations = iter;
  res.social_cost = social_cost(net, x);
  res.stationary_memory.clear();
  for (const auto& chain : res.chains) res.stationary_memory.push_back(chain.stationary);
  if (!res.converged)
    res.diagnostics = "fwe_fixed_point: residual " + std::to_string(res.residual) +
                      " after " + std::to_string(iter) + " iterations; local Lipschitz ~" +
                      std::to_string(res.lipschitz_estimate);
  return res;
}

// Conservative contraction diagnostic kappa = D * (beta H L + beta H L / eps).
inline double contraction_kappa(double total_demand, double beta, int max_path_len,
                                double latency_lipschitz, double eps_min) {
  require(total_demand > 0.0 && max_path_len > 0 && latency_lipschitz > 0.0,
          "contraction_kappa: inputs must be positive");
  require(beta >= 0.0, "contraction_kappa: beta must be nonnegative");
  require(eps_min > 0.0 && eps_min <= 1.0,
          "contraction_kappa: eps must lie in (0,1] (no Doeblin minorization at 0)");
  const double bhl = beta * max_path_len * latency_lipschitz;
  return total_demand * (bhl + bhl / eps_min);
}

// ---------------------------------------------------------------------------
// Agent-based simulation of the micro model. Per day: every agent draws a
// surfaced route, picks from its available set by logit at the previous
// day's loads, then updates memory by LRU (or a reset redraw). Per-agent
// counter-based RNG streams keyed by (seed, agent, day) make the loop
// deterministic and agent-parallelizable.
// ---------------------------------------------------------------------------

struct MicroEstimates {
  std::vector<std::vector<double>> path_shares;   // pi_hat per commodity
  std::vector<std::vector<double>> recall_freq;   // h_hat (memory membership)
  std::vector<std::vector<double>> availability;  // eta_hat (recalled or surfaced)
  std::vector<double> mean_edge_loads;
  double social_cost = 0.0;      // time-averaged SC(x(f^t))
  double social_cost_sd = 0.0;   // day-to-day standard deviation
  double wall_seconds = 0.0;
  int days_averaged = 0;
};

struct SimOptions {
  std::ostream* trace_csv = nullptr;  // optional per-day stream: day, loads..., sc
};

namespace detail {

constexpr std::uint64_t kInitDayTag = 0xffffffffffff0000ULL;

inline void init_memory(MemoryState& mem, int n_paths, const MemoryPolicy& policy,
                        std::uint64_t seed, std::uint64_t agent_key) {
  // min(B, |P|) distinct routes sampled without replacement from rho
  RngStream rng(seed, agent_key, kInitDayTag);
  const int length = policy.list_length(n_paths);
  std::vector<double> w = policy.rho;
  mem.clear();
  for (int j = 0; j < length; ++j) {
    const int p = rng.next_categorical(w);
    mem.push_back(p);
    w[static_cast<std::size_t>(p)] = 0.0;
  }
}

}  // namespace detail

inline MicroEstimates simulate_micro(const Network& net, const PathCatalog& catalog,
                                     const std::vector<MemoryPolicy>& policies, double beta,
                                     int n_agents, int horizon, int burn_in,
                                     std::uint64_t seed, const SimOptions& sim = SimOptions{}) {
  catalog.validate(net);
  require(n_agents >= 1, "simulate_micro: n_agents must be >= 1");
  require(horizon > burn_in, "simulate_micro: horizon must exceed burn_in");
  const auto t0 = std::chrono::steady_clock::now();

  const int K = catalog.n_commodities();
  require(policies.size() == static_cast<std::size_t>(K), "one policy per commodity");
  for (int k = 0; k < K; ++k) policies[static_cast<std::size_t>(k)].validate(catalog.n_paths(k));

  // Flat agent arrays per commodity.
  struct Block {
    int n_paths = 0;
    int length = 0;
    double mass = 0.0;           // demand per agent
    std::vector<int> memory;     // n_agents * length, most recent first
    std::vector<int> choice;     // per agent, today's chosen path
    std::vector<double> costs;   // per path, today's costs
    std::vector<double> cum_rho;
    std::vector<long long> choice_count;  // accumulated post burn-in
    std::vector<double> recall_acc;
    std::vector<double> avail_acc;
  };
  std::vector<Block> blocks(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    Block& b = blocks[static_cast<std::size_t>(k)];
    b.n_paths = catalog.n_paths(k);
    b.length = policies[static_cast<std::size_t>(k)].list_length(b.n_paths);
    b.mass = net.commodity(k).demand / n_agents;
    b.memory.assign(static_cast<std::size_t>(n_agents) * b.length, -1);
    b.choice.assign(static_cast<std::size_t>(n_agents), 0);
    b.costs.assign(static_cast<std::size_t>(b.n_paths), 0.0);
    b.cum_rho.resize(static_cast<std::size_t>(b.n_paths));
    double acc = 0.0;
    for (int p = 0; p < b.n_paths; ++p) {
      acc += policies[static_cast<std::size_t>(k)].rho[static_cast<std::size_t>(p)];
      b.cum_rho[static_cast<std::size_t>(p)] = acc;
    }
    b.choice_count.assign(static_cast<std::size_t>(b.n_paths), 0);
    b.recall_acc.assign(static_cast<std::size_t>(b.n_paths), 0.0);
    b.avail_acc.assign(static_cast<std::size_t>(b.n_paths), 0.0);
    MemoryState mem;
    for (int a = 0; a < n_agents; ++a) {
      detail::init_memory(mem, b.n_paths, policies[static_cast<std::size_t>(k)], seed,
                          (static_cast<std::uint64_t>(k) << 32) | static_cast<std::uint32_t>(a));
      for (int j = 0; j < b.length; ++j)
        b.memory[static_cast<std::size_t>(a) * b.length + j] = mem[static_cast<std::size_t>(j)];
    }
  }

  std::vector<double> loads(static_cast<std::size_t>(net.n_edges()), 0.0);
  std::vector<double> mean_loads(loads.size(), 0.0);
  double sc_sum = 0.0, sc_sq = 0.0;
  int averaged = 0;

  constexpr int kMenuCap = 128;
  for (int k = 0; k < K; ++k)
    require(blocks[static_cast<std::size_t>(k)].length + 1 <= kMenuCap,
            "simulate_micro: memory list too long");

  for (int day = 0; day < horizon; ++day) {
    const bool record = day >= burn_in;
    for (int k = 0; k < K; ++k) {
      Block& b = blocks[static_cast<std::size_t>(k)];
      const MemoryPolicy& pol = policies[static_cast<std::size_t>(k)];
      for (int p = 0; p < b.n_paths; ++p) {
        double c = 0.0;
        for (int e : catalog.paths(k)[static_cast<std::size_t>(p)])
          c += net.edge(e).latency(loads[static_cast<std::size_t>(e)]);
        b.costs[static_cast<std::size_t>(p)] = c;
      }

      // Measure recall and availability on the state entering the day. The
      // surfaced draw is the stream's first uniform, so reconstructing it
      // here consumes nothing the workers will see differently.
      if (record) {
        for (int a = 0; a < n_agents; ++a) {
          const int* mem = &b.memory[static_cast<std::size_t>(a) * b.length];
          RngStream rng(seed,
                        (static_cast<std::uint64_t>(k) << 32) | static_cast<std::uint32_t>(a),
                        static_cast<std::uint64_t>(day));
          const double u = rng.next_double();
          int q = 0;
          while (q + 1 < b.n_paths && u > b.cum_rho[static_cast<std::size_t>(q)]) ++q;
          bool q_recalled = false;
          for (int j = 0; j < b.length; ++j) {
            b.recall_acc[static_cast<std::size_t>(mem[j])] += 1.0;
            b.avail_acc[static_cast<std::size_t>(mem[j])] += 1.0;
            if (mem[j] == q) q_recalled = true;
          }
          if (!q_recalled) b.avail_acc[static_cast<std::size_t>(q)] += 1.0;
        }
      }

      parallel_for(static_cast<std::size_t>(n_agents), [&](std::size_t a) {
        RngStream rng(seed,
                      (static_cast<std::uint64_t>(k) << 32) | static_cast<std::uint32_t>(a),
                      static_cast<std::uint64_t>(day));
        int* mem = &b.memory[a * static_cast<std::size_t>(b.length)];
        // surfaced route
        const double u = rng.next_double();
        int q = 0;
        while (q + 1 < b.n_paths && u > b.cum_rho[static_cast<std::size_t>(q)]) ++q;
        // menu = memory + surfaced (if new)
        int menu[kMenuCap];
        double weights[kMenuCap];
        int menu_size = 0;
        bool q_in_mem = false;
        for (int j = 0; j < b.length; ++j) {
          menu[menu_size++] = mem[j];
          if (mem[j] == q) q_in_mem = true;
        }
        if (!q_in_mem) menu[menu_size++] = q;
        // logit over the menu
        double umax = -kInf;
        for (int j = 0; j < menu_size; ++j) {
          weights[j] = -beta * b.costs[static_cast<std::size_t>(menu[j])];
          umax = std::max(umax, weights[j]);
        }
        double z = 0.0;
        for (int j = 0; j < menu_size; ++j) {
          weights[j] = std::exp(weights[j] - umax);
          z += weights[j];
        }
        const double draw = rng.next_double() * z;
        double acc = 0.0;
        int chosen = menu[menu_size - 1];
        for (int j = 0; j < menu_size; ++j) {
          acc += weights[j];
          if (draw < acc) {
            chosen = menu[j];
            break;
          }
        }
        b.choice[a] = chosen;
        // memory update: Doeblin reset redraw or LRU move-to-front
        if (pol.eps_reset > 0.0 && rng.next_double() < pol.eps_reset) {
          std::vector<double> w = pol.rho;
          for (int j = 0; j < b.length; ++j) {
            double tot = 0.0;
            for (double x : w) tot += x;
            double dr = rng.next_double() * tot;
            int pick = b.n_paths - 1;
            double a2 = 0.0;
            for (int p = 0; p < b.n_paths; ++p) {
              a2 += w[static_cast<std::size_t>(p)];
              if (dr < a2) {
                pick = p;
                break;
              }
            }
            mem[j] = pick;
            w[static_cast<std::size_t>(pick)] = 0.0;
          }
        } else if (mem[0] != chosen) {
          int carry = chosen;
          for (int j = 0; j < b.length; ++j) {
            std::swap(carry, mem[j]);
            if (carry == chosen) break;  // chosen was already in memory
          }
        }
      });

      if (record)
        for (int a = 0; a < n_agents; ++a)
          b.choice_count[static_cast<std::size_t>(b.choice[static_cast<std::size_t>(a)])]++;
    }

    // aggregate today's choices into loads for tomorrow
    std::fill(loads.begin(), loads.end(), 0.0);
    for (int k = 0; k < K; ++k) {
      Block& b = blocks[static_cast<std::size_t>(k)];
      for (int a = 0; a < n_agents; ++a) {
        const Path& p = catalog.paths(k)[static_cast<std::size_t>(
            b.choice[static_cast<std::size_t>(a)])];
        for (int e : p) loads[static_cast<std::size_t>(e)] += b.mass;
      }
    }
    const double sc = social_cost(net, loads);
    if (record) {
      sc_sum += sc;
      sc_sq += sc * sc;
      for (std::size_t e = 0; e < loads.size(); ++e) mean_loads[e] += loads[e];
      ++averaged;
    }
    if (sim.trace_csv) {
      (*sim.trace_csv) << day;
      for (double x : loads) (*sim.trace_csv) << "," << x;
      (*sim.trace_csv) << "," << sc << "\n";
    }
  }

  MicroEstimates est;
  est.days_averaged = averaged;
  est.path_shares.resize(static_cast<std::size_t>(K));
  est.recall_freq.resize(static_cast<std::size_t>(K));
  est.availability.resize(static_cast<std::size_t>(K));
  const double denom = static_cast<double>(averaged) * n_agents;
  for (int k = 0; k < K; ++k) {
    Block& b = blocks[static_cast<std::size_t>(k)];
    auto& shares = est.path_shares[static_cast<std::size_t>(k)];
    auto& recall = est.recall_freq[static_cast<std::size_t>(k)];
    shares.resize(static_cast<std::size_t>(b.n_paths));
    recall.resize(static_cast<std::size_t>(b.n_paths));
    for (int p = 0; p < b.n_paths; ++p) {
      shares[static_cast<std::size_t>(p)] =
          static_cast<double>(b.choice_count[static_cast<std::size_t>(p)]) / denom;
      recall[static_cast<std::size_t>(p)] = b.recall_acc[static_cast<std::size_t>(p)] / denom;
    }
    auto& avail = est.availability[static_cast<std::size_t>(k)];
    avail.resize(static_cast<std::size_t>(b.n_paths));
    for (int p = 0; p < b.n_paths; ++p)
      avail[static_cast<std::size_t>(p)] = b.avail_acc[static_cast<std::size_t>(p)] / denom;
  }
  for (std::size_t e = 0; e < mean_loads.size(); ++e) mean_loads[e] /= averaged;
  est.mean_edge_loads = mean_loads;
  est.social_cost = sc_sum / averaged;
  const double var = std::max(0.0, sc_sq / averaged - est.social_cost * est.social_cost);
  est.social_cost_sd = std::sqrt(var);
  est.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return est;
}

}  // namespace fr

#endif  // FR_MICRO_HPP
