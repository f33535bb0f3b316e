#ifndef FR_CHOICE_HPP
#define FR_CHOICE_HPP

#include <cmath>
#include <vector>

#include "fr/common.hpp"

namespace fr {

// Probabilities over a finite menu, indexed consistently with a catalog slice.
using ChoiceDistribution = std::vector<double>;

// ---------------------------------------------------------------------------
// Logit family. All variants shift by the max utility before exponentiation,
// which leaves the distribution unchanged and avoids overflow.
// ---------------------------------------------------------------------------

// p(a) proportional to exp(-beta * cost_a).
inline ChoiceDistribution logit(const std::vector<double>& costs, double beta) {
  require(!costs.empty(), "logit: empty menu");
  require(beta >= 0.0, "logit: beta must be nonnegative");
  for (double c : costs) require(std::isfinite(c), "logit: costs must be finite");
  ChoiceDistribution p(costs.size());
  double umax = -kInf;
  for (double c : costs) umax = std::max(umax, -beta * c);
  double z = 0.0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    p[i] = std::exp(-beta * costs[i] - umax);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

// p(a) proportional to s_a * exp(-beta * cost_a); equals logit on utilities
// -cost_a + log(s_a)/beta.
inline ChoiceDistribution salience_logit(const std::vector<double>& costs,
                                         const std::vector<double>& salience,
                                         double beta) {
  require(!costs.empty(), "salience_logit: empty menu");
  require(costs.size() == salience.size(), "salience_logit: size mismatch");
  require(beta >= 0.0, "salience_logit: beta must be nonnegative");
  ChoiceDistribution p(costs.size());
  double umax = -kInf;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    require(salience[i] > 0.0, "salience_logit: salience must be strictly positive");
    p[i] = std::log(salience[i]) - beta * costs[i];
    umax = std::max(umax, p[i]);
  }
  double z = 0.0;
  for (double& v : p) {
    v = std::exp(v - umax);
    z += v;
  }
  for (double& v : p) v /= z;
  return p;
}

// p(a) proportional to eta_a * exp(-beta * cost_a) with availability
// probabilities eta in [0,1].
inline ChoiceDistribution availability_weighted_logit(const std::vector<double>& costs,
                                                      const std::vector<double>& availability,
                                                      double beta) {
  require(!costs.empty(), "availability_weighted_logit: empty menu");
  require(costs.size() == availability.size(),
          "availability_weighted_logit: size mismatch");
  double amax = 0.0;
  for (double a : availability) {
    require(a >= 0.0 && a <= 1.0, "availability must lie in [0,1]");
    amax = std::max(amax, a);
  }
  require(amax > 0.0, "availability_weighted_logit: all availabilities are zero");
  ChoiceDistribution p(costs.size());
  double umax = -kInf;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    p[i] = availability[i] > 0.0 ? std::log(availability[i]) - beta * costs[i] : -kInf;
    umax = std::max(umax, p[i]);
  }
  double z = 0.0;
  for (double& v : p) {
    v = (v == -kInf) ? 0.0 : std::exp(v - umax);
    z += v;
  }
  for (double& v : p) v /= z;
  return p;
}

// ---------------------------------------------------------------------------
// SaliencePolicy: strictly positive weights s_{k,p}. The canonical form
// shifts each commodity's log-salience so its minimum is 0, which makes
// budgets and reports comparable; raw weights are preserved on request.
// ---------------------------------------------------------------------------

class SaliencePolicy {
public:
  SaliencePolicy() = default;

  explicit SaliencePolicy(std::vector<std::vector<double>> weights)
      : raw_(std::move(weights)) {
    for (const auto& sk : raw_)
      for (double s : sk) require(s > 0.0 && std::isfinite(s), "salience must be positive finite");
  }

  static SaliencePolicy uniform(const std::vector<int>& sizes) {
    std::vector<std::vector<double>> w;
    w.reserve(sizes.size());
    for (int n : sizes) w.emplace_back(static_cast<std::size_t>(n), 1.0);
    return SaliencePolicy(std::move(w));
  }

  int n_commodities() const { return static_cast<int>(raw_.size()); }
  const std::vector<double>& weights(int k) const {
    return raw_.at(static_cast<std::size_t>(k));
  }
  const std::vector<std::vector<double>>& raw() const { return raw_; }

  // u_{k,p} = log s_{k,p}.
  std::vector<double> log_salience(int k) const {
    std::vector<double> u;
    u.reserve(weights(k).size());
    for (double s : weights(k)) u.push_back(std::log(s));
    return u;
  }

  // Per-commodity rescale so min_p log s_{k,p} = 0.
  SaliencePolicy canonicalized() const {
    std::vector<std::vector<double>> w = raw_;
    for (auto& sk : w) {
      double smin = kInf;
      for (double s : sk) smin = std::min(smin, s);
      for (double& s : sk) s /= smin;
    }
    return SaliencePolicy(std::move(w));
  }

private:
  std::vector<std::vector<double>> raw_;
};

}  // namespace fr

#endif  // FR_CHOICE_HPP
