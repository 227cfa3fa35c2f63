#include "pirlab/combinatorics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace pirlab::comb {

BigInt factorial(std::size_t n) {
  BigInt r = 1;
  for (std::size_t i = 2; i <= n; ++i) r *= i;
  return r;
}

namespace {

std::uint64_t as_count(const BigInt& v, std::uint64_t cap) {
  if (v > cap) {
    throw CapExceededError(v > std::numeric_limits<std::uint64_t>::max()
                               ? std::numeric_limits<std::uint64_t>::max()
                               : static_cast<std::uint64_t>(v),
                           cap);
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace

std::vector<std::vector<std::size_t>> permutations(std::size_t n, std::uint64_t cap) {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(as_count(factorial(n), cap));
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

bool is_permutation(std::span<const std::size_t> perm) {
  std::vector<bool> seen(perm.size(), false);
  for (auto v : perm) {
    if (v >= perm.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm) {
  if (!is_permutation(perm)) throw ContractError("not a permutation");
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
  return inv;
}

ConstantCompositionSet::ConstantCompositionSet(std::vector<std::size_t> composition)
    : composition_(std::move(composition)),
      length_(std::accumulate(composition_.begin(), composition_.end(), std::size_t{0})) {}

BigInt ConstantCompositionSet::size() const {
  BigInt r = factorial(length_);
  for (auto c : composition_) r /= factorial(c);
  return r;
}

bool ConstantCompositionSet::contains(std::span<const std::size_t> sequence) const {
  if (sequence.size() != length_) return false;
  std::vector<std::size_t> count(composition_.size(), 0);
  for (auto v : sequence) {
    if (v >= count.size()) return false;
    ++count[v];
  }
  return count == composition_;
}

std::vector<std::vector<std::size_t>> ConstantCompositionSet::enumerate(std::uint64_t cap) const {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(as_count(size(), cap));
  std::vector<std::size_t> seq;
  for (std::size_t v = 0; v < composition_.size(); ++v) seq.insert(seq.end(), composition_[v], v);
  do {
    out.push_back(seq);
  } while (std::next_permutation(seq.begin(), seq.end()));
  return out;
}

}  // namespace pirlab::comb
