#include "pirlab/distribution.hpp"

#include <cmath>
#include <numeric>
#include <set>

namespace pirlab::analysis {

ExactDistribution::ExactDistribution(std::vector<std::size_t> widths) : widths_(std::move(widths)) {
  offsets_.reserve(widths_.size());
  for (auto w : widths_) {
    offsets_.push_back(width_);
    width_ += w;
  }
}

void ExactDistribution::add(std::span<const std::uint32_t> outcome, std::uint64_t weight) {
  if (outcome.size() != width_) throw ContractError("outcome width mismatch");
  if (weight == 0) return;
  weights_[Outcome(outcome.begin(), outcome.end())] += weight;
  total_ += weight;
}

void ExactDistribution::merge(const ExactDistribution& other) {
  if (other.widths_ != widths_) throw ContractError("cannot merge distributions over different variables");
  for (const auto& [o, w] : other.weights_) weights_[o] += w;
  total_ += other.total_;
}

Rational ExactDistribution::probability(const Outcome& outcome) const {
  if (total_ == 0) throw ContractError("empty distribution");
  auto it = weights_.find(outcome);
  if (it == weights_.end()) return Rational(0);
  return Rational(BigInt(it->second), BigInt(total_));
}

std::vector<std::pair<Outcome, Rational>> ExactDistribution::support() const {
  std::vector<std::pair<Outcome, Rational>> out;
  out.reserve(weights_.size());
  for (const auto& [o, w] : weights_) out.emplace_back(o, Rational(BigInt(w), BigInt(total_)));
  return out;
}

std::span<const std::uint32_t> ExactDistribution::slice(const Outcome& outcome, std::size_t v) const {
  return std::span<const std::uint32_t>(outcome).subspan(offsets_.at(v), widths_.at(v));
}

ExactDistribution ExactDistribution::marginal(std::span<const std::size_t> variables) const {
  std::vector<std::size_t> w;
  for (auto v : variables) w.push_back(widths_.at(v));
  ExactDistribution m(std::move(w));
  Outcome buf;
  for (const auto& [o, weight] : weights_) {
    buf.clear();
    for (auto v : variables) {
      auto s = slice(o, v);
      buf.insert(buf.end(), s.begin(), s.end());
    }
    m.add(buf, weight);
  }
  return m;
}

bool operator==(const ExactDistribution& a, const ExactDistribution& b) {
  if (a.widths_ != b.widths_ || a.weights_.size() != b.weights_.size()) return false;
  auto ia = a.weights_.begin();
  auto ib = b.weights_.begin();
  for (; ia != a.weights_.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (BigInt(ia->second) * b.total_ != BigInt(ib->second) * a.total_) return false;
  }
  return true;
}

double entropy_bits(const ExactDistribution& d) {
  if (d.total_weight() == 0) throw ContractError("entropy of an empty distribution");
  const long double total = static_cast<long double>(d.total_weight());
  long double acc = 0;
  for (const auto& [o, w] : d.weights()) {
    const long double wl = static_cast<long double>(w);
    acc += wl * std::log2(wl);
  }
  const long double h = std::log2(total) - acc / total;
  return static_cast<double>(h < 0 ? 0 : h);
}

double mutual_information_bits(const ExactDistribution& joint, std::span<const std::size_t> a,
                               std::span<const std::size_t> b) {
  std::vector<std::size_t> ab(a.begin(), a.end());
  ab.insert(ab.end(), b.begin(), b.end());
  return entropy_bits(joint.marginal(a)) + entropy_bits(joint.marginal(b)) -
         entropy_bits(joint.marginal(ab));
}

IndependenceResult check_mutual_independence(const ExactDistribution& d) {
  const std::size_t V = d.variable_count();
  std::vector<ExactDistribution> marginals;
  marginals.reserve(V);
  for (std::size_t v = 0; v < V; ++v) {
    const std::size_t idx[] = {v};
    marginals.push_back(d.marginal(idx));
  }
  // Pr(x) = prod_v Pr(x_v)  <=>  w(x) * T^(V-1) = prod_v w_v(x_v).
  // Equality on the support suffices: both sides sum to one.
  BigInt scale = 1;
  for (std::size_t v = 1; v < V; ++v) scale *= d.total_weight();
  for (const auto& [o, w] : d.weights()) {
    BigInt prod = 1;
    for (std::size_t v = 0; v < V; ++v) {
      auto s = d.slice(o, v);
      prod *= marginals[v].weights().at(Outcome(s.begin(), s.end()));
    }
    if (BigInt(w) * scale != prod) return {false, o};
  }
  return {};
}

DeterminationResult check_pairwise_determination(const ExactDistribution& d) {
  const std::size_t V = d.variable_count();
  for (std::size_t i = 0; i < V; ++i) {
    for (std::size_t j = 0; j < V; ++j) {
      if (i == j) continue;
      std::map<Outcome, Outcome> seen;
      for (const auto& [o, w] : d.weights()) {
        auto si = d.slice(o, i);
        auto sj = d.slice(o, j);
        Outcome vi(si.begin(), si.end()), vj(sj.begin(), sj.end());
        auto [it, inserted] = seen.emplace(vi, vj);
        if (!inserted && it->second != vj) return {false, std::make_pair(i, j), vi};
      }
    }
  }
  return {};
}

bool information_theoretically_distinct(const ExactDistribution& joint, double tolerance) {
  if (joint.variable_count() != 2) throw ContractError("distinctness needs exactly two variables");
  const std::size_t a[] = {0};
  const std::size_t b[] = {1};
  const double ha = entropy_bits(joint.marginal(a));
  const double hb = entropy_bits(joint.marginal(b));
  return mutual_information_bits(joint, a, b) < std::max(ha, hb) - tolerance;
}

}  // namespace pirlab::analysis
