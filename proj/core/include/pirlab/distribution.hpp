#pragma once

// Exact probability mass functions over tuples of symbols.
//
// A distribution is a set of integer weights over outcomes with a known total.
// Every pmf in this library comes from uniform enumeration, so probabilities
// are weight/total with total = m^(KL) (or a multiple of it), and every
// comparison below is done in exact integer arithmetic.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pirlab/code_model.hpp"

namespace pirlab::analysis {

using Outcome = std::vector<std::uint32_t>;

class ExactDistribution {
 public:
  // widths[v] is the number of symbols variable v contributes to an outcome.
  explicit ExactDistribution(std::vector<std::size_t> widths);

  void add(std::span<const std::uint32_t> outcome, std::uint64_t weight = 1);
  // Associative, commutative merge of two tallies over the same variables.
  void merge(const ExactDistribution& other);

  std::size_t variable_count() const { return widths_.size(); }
  std::span<const std::size_t> widths() const { return widths_; }
  std::size_t outcome_width() const { return width_; }
  std::uint64_t total_weight() const { return total_; }
  const std::map<Outcome, std::uint64_t>& weights() const { return weights_; }
  std::size_t support_size() const { return weights_.size(); }

  Rational probability(const Outcome& outcome) const;
  std::vector<std::pair<Outcome, Rational>> support() const;

  // Distribution of the listed variables, in the listed order.
  ExactDistribution marginal(std::span<const std::size_t> variables) const;

  // The symbols of variable v inside an outcome.
  std::span<const std::uint32_t> slice(const Outcome& outcome, std::size_t v) const;

  // Exact equality of the normalized pmfs.
  friend bool operator==(const ExactDistribution& a, const ExactDistribution& b);

 private:
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> offsets_;
  std::size_t width_ = 0;
  std::uint64_t total_ = 0;
  std::map<Outcome, std::uint64_t> weights_;
};

// Shannon entropy in bits; exact weights converted to floating point only in
// the final sum.
double entropy_bits(const ExactDistribution& d);

// I(A;B) in bits for disjoint variable groups of `joint`.
double mutual_information_bits(const ExactDistribution& joint, std::span<const std::size_t> a,
                               std::span<const std::size_t> b);

struct IndependenceResult {
  bool independent = true;
  std::optional<Outcome> witness;  // support outcome where joint != product
};

// Mutual independence of all variables: the joint weight of every support
// outcome equals the product of its marginals, compared exactly.
IndependenceResult check_mutual_independence(const ExactDistribution& d);

struct DeterminationResult {
  bool mutually_determining = true;
  std::optional<std::pair<std::size_t, std::size_t>> pair;  // (i, j) where i fails to determine j
  std::optional<Outcome> witness;                          // value of i seen with two values of j
};

// Every variable is a function of every other on the support (pairwise
// bijection of supports). Constants pass vacuously.
DeterminationResult check_pairwise_determination(const ExactDistribution& d);

// Two variables A, B are distinct when I(A;B) < max(H(A), H(B)) by more than
// `tolerance` bits. `joint` must have exactly two variables.
bool information_theoretically_distinct(const ExactDistribution& joint, double tolerance = 1e-9);

}  // namespace pirlab::analysis
