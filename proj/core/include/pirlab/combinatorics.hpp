#pragma once

// Permutations and constant-composition sequences, always in lexicographic
// order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pirlab/code_model.hpp"

namespace pirlab::comb {

// n! as an exact integer.
BigInt factorial(std::size_t n);

// All permutations of {0..n-1} in lexicographic order. CapExceededError when
// n! > cap.
std::vector<std::vector<std::size_t>> permutations(std::size_t n, std::uint64_t cap = kDefaultEnumerationCap);

bool is_permutation(std::span<const std::size_t> perm);
std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm);

// Sequences over {0..s-1} that contain symbol v exactly composition[v] times.
class ConstantCompositionSet {
 public:
  explicit ConstantCompositionSet(std::vector<std::size_t> composition);

  const std::vector<std::size_t>& composition() const { return composition_; }
  std::size_t length() const { return length_; }

  // Multinomial length! / prod composition[v]!.
  BigInt size() const;

  // Decided by counting symbols; never enumerates.
  bool contains(std::span<const std::size_t> sequence) const;

  // Every member in lexicographic order. CapExceededError when size() > cap.
  std::vector<std::vector<std::size_t>> enumerate(std::uint64_t cap = kDefaultEnumerationCap) const;

 private:
  std::vector<std::size_t> composition_;
  std::size_t length_ = 0;
};

}  // namespace pirlab::comb
