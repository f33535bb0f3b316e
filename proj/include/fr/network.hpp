#ifndef FR_NETWORK_HPP
#define FR_NETWORK_HPP

#include <cmath>
#include <string>
#include <vector>

#include "fr/common.hpp"

namespace fr {

// ---------------------------------------------------------------------------
// Latency functions. Four families, each continuous and nondecreasing on
// [0, D]: constant c, affine a*x+b, BPR fft*(1+b*(x/cap)^p), monomial x^p.
// Beckmann integrals and derivatives are closed-form per family.
// ---------------------------------------------------------------------------

struct LatencyFn {
  enum class Kind { Constant, Affine, Bpr, Monomial };

  Kind kind = Kind::Constant;
  double a = 0.0;    // affine slope
  double b = 0.0;    // affine intercept / constant value / BPR coefficient
  double fft = 0.0;  // BPR free-flow time
  double cap = 1.0;  // BPR capacity
  double p = 1.0;    // BPR / monomial exponent

  static LatencyFn constant(double c) {
    require(c >= 0.0, "constant latency must be nonnegative");
    LatencyFn f;
    f.kind = Kind::Constant;
    f.b = c;
    return f;
  }

  static LatencyFn affine(double slope, double intercept) {
    require(slope >= 0.0 && intercept >= 0.0, "affine latency needs a,b >= 0");
    LatencyFn f;
    f.kind = Kind::Affine;
    f.a = slope;
    f.b = intercept;
    return f;
  }

  static LatencyFn bpr(double fft, double b, double power, double cap) {
    require(fft >= 0.0 && b >= 0.0 && cap > 0.0 && power >= 1.0,
            "bpr latency needs fft,b >= 0, cap > 0, power >= 1");
    LatencyFn f;
    f.kind = Kind::Bpr;
    f.fft = fft;
    f.b = b;
    f.p = power;
    f.cap = cap;
    return f;
  }

  static LatencyFn monomial(double power) {
    require(power >= 1.0, "monomial latency needs power >= 1");
    LatencyFn f;
    f.kind = Kind::Monomial;
    f.p = power;
    return f;
  }

  double operator()(double x) const {
    switch (kind) {
      case Kind::Constant: return b;
      case Kind::Affine: return a * x + b;
      case Kind::Bpr: return fft * (1.0 + b * std::pow(x / cap, p));
      case Kind::Monomial: return std::pow(x, p);
    }
    return 0.0;
  }

  // d ell / dx; BPR and monomial with p>1 have derivative 0 at x=0.
  double derivative(double x) const {
    switch (kind) {
      case Kind::Constant: return 0.0;
      case Kind::Affine: return a;
      case Kind::Bpr:
        return fft * b * p * std::pow(x / cap, p - 1.0) / cap;
      case Kind::Monomial:
        return p == 1.0 ? 1.0 : p * std::pow(x, p - 1.0);
    }
    return 0.0;
  }

  // int_0^x ell(u) du, closed form.
  double integral(double x) const {
    switch (kind) {
      case Kind::Constant: return b * x;
      case Kind::Affine: return 0.5 * a * x * x + b * x;
      case Kind::Bpr:
        return fft * x + fft * b * std::pow(x / cap, p) * x / (p + 1.0);
      case Kind::Monomial: return std::pow(x, p + 1.0) / (p + 1.0);
    }
    return 0.0;
  }
};

// ---------------------------------------------------------------------------
// Network: directed edges with latency functions plus OD commodities.
// Immutable after construction; construction validates indices and demands.
// ---------------------------------------------------------------------------

struct Edge {
  int tail = -1;
  int head = -1;
  LatencyFn latency;
};

struct Commodity {
  int origin = -1;
  int destination = -1;
  double demand = 0.0;  // mass units; zero allowed for degenerate cases
};

using Path = std::vector<int>;  // edge-index sequence; identity of a route

class Network {
public:
  Network(int n_nodes, std::vector<Edge> edges, std::vector<Commodity> commodities)
      : n_nodes_(n_nodes), edges_(std::move(edges)), commodities_(std::move(commodities)) {
    require(n_nodes_ > 0, "network needs at least one node");
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      if (e.tail < 0 || e.tail >= n_nodes_ || e.head < 0 || e.head >= n_nodes_)
        throw StructuralError("edge " + std::to_string(i) + " references unknown node");
    }
    for (std::size_t k = 0; k < commodities_.size(); ++k) {
      const Commodity& c = commodities_[k];
      if (c.origin < 0 || c.origin >= n_nodes_ || c.destination < 0 ||
          c.destination >= n_nodes_)
        throw StructuralError("commodity " + std::to_string(k) + " references unknown node");
      require(c.demand >= 0.0, "commodity demand must be nonnegative");
      require(std::isfinite(c.demand), "commodity demand must be finite");
    }
  }

  int n_nodes() const { return n_nodes_; }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  int n_commodities() const { return static_cast<int>(commodities_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_.at(static_cast<std::size_t>(e)); }
  const std::vector<Commodity>& commodities() const { return commodities_; }
  const Commodity& commodity(int k) const {
    return commodities_.at(static_cast<std::size_t>(k));
  }

  double total_demand() const {
    double d = 0.0;
    for (const auto& c : commodities_) d += c.demand;
    return d;
  }

  void check_loads(const std::vector<double>& loads) const {
    require(loads.size() == edges_.size(), "load vector size mismatch");
    const double d = total_demand();
    for (double x : loads)
      require(x >= -1e-12 && x <= d + 1e-9 * (1.0 + d), "edge load outside [0, D]");
  }

private:
  int n_nodes_;
  std::vector<Edge> edges_;
  std::vector<Commodity> commodities_;
};

// L_p(x) = sum over path edges of ell_e(x_e).
inline double path_latency(const Network& net, const std::vector<double>& loads,
                           const Path& path) {
  net.check_loads(loads);
  double total = 0.0;
  for (int e : path) {
    if (e < 0 || e >= net.n_edges())
      throw StructuralError("path references unknown edge " + std::to_string(e));
    total += net.edge(e).latency(loads[static_cast<std::size_t>(e)]);
  }
  return total;
}

// SC(x) = sum_e x_e * ell_e(x_e).
inline double social_cost(const Network& net, const std::vector<double>& loads) {
  net.check_loads(loads);
  double total = 0.0;
  for (int e = 0; e < net.n_edges(); ++e) {
    const double x = loads[static_cast<std::size_t>(e)];
    total += x * net.edge(e).latency(x);
  }
  return total;
}

}  // namespace fr

#endif  // FR_NETWORK_HPP
