#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "pirlab/combinatorics.hpp"

namespace pirlab::comb {
namespace {

TEST(Factorial, SmallAndLarge) {
  EXPECT_EQ(factorial(0), 1);
  EXPECT_EQ(factorial(5), 120);
  EXPECT_EQ(factorial(25), BigInt("15511210043330985984000000"));
}

TEST(Permutations, LexicographicAndComplete) {
  const auto p3 = permutations(3);
  const std::vector<std::vector<std::size_t>> expected = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                                          {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  EXPECT_EQ(p3, expected);
  EXPECT_EQ(permutations(0).size(), 1u);
  const auto p5 = permutations(5);
  EXPECT_EQ(p5.size(), 120u);
  EXPECT_TRUE(std::is_sorted(p5.begin(), p5.end()));
  EXPECT_EQ(std::set(p5.begin(), p5.end()).size(), 120u);
  EXPECT_THROW(permutations(6, 719), CapExceededError);
  EXPECT_EQ(permutations(6, 720).size(), 720u);
}

TEST(Permutations, InverseAndValidity) {
  const std::vector<std::size_t> p = {3, 0, 1, 2};
  EXPECT_TRUE(is_permutation(p));
  const auto inv = inverse_permutation(p);
  EXPECT_EQ(inv, (std::vector<std::size_t>{1, 2, 3, 0}));
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(inv[p[i]], i);
  const std::vector<std::size_t> dup = {0, 0, 1};
  const std::vector<std::size_t> out_of_range = {0, 3, 1};
  EXPECT_FALSE(is_permutation(dup));
  EXPECT_FALSE(is_permutation(out_of_range));
  EXPECT_THROW(inverse_permutation(dup), ContractError);
}

TEST(ConstantComposition, SizeIsMultinomial) {
  EXPECT_EQ(ConstantCompositionSet({1, 1}).size(), 2);
  EXPECT_EQ(ConstantCompositionSet({2, 1}).size(), 3);
  EXPECT_EQ(ConstantCompositionSet({2, 2, 2}).size(), 90);
  EXPECT_EQ(ConstantCompositionSet({0, 3}).size(), 1);
  // 40! / (20! 20!) does not fit in 32 bits.
  EXPECT_EQ(ConstantCompositionSet({20, 20}).size(), BigInt("137846528820"));
}

TEST(ConstantComposition, EnumerationMatchesMembership) {
  const ConstantCompositionSet s({2, 1, 1});
  EXPECT_EQ(s.length(), 4u);
  const auto all = s.enumerate();
  EXPECT_EQ(all.size(), 12u);
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
  EXPECT_EQ(all.front(), (std::vector<std::size_t>{0, 0, 1, 2}));
  EXPECT_EQ(all.back(), (std::vector<std::size_t>{2, 1, 0, 0}));
  for (const auto& x : all) EXPECT_TRUE(s.contains(x));

  // Every sequence of length 4 over 3 symbols: members are exactly the enumerated ones.
  std::size_t members = 0;
  for (std::size_t v = 0; v < 81; ++v) {
    std::vector<std::size_t> seq = {v / 27, (v / 9) % 3, (v / 3) % 3, v % 3};
    if (s.contains(seq)) {
      ++members;
      EXPECT_TRUE(std::binary_search(all.begin(), all.end(), seq));
    }
  }
  EXPECT_EQ(members, all.size());
  const std::vector<std::size_t> short_seq = {0, 0, 1};
  const std::vector<std::size_t> bad_symbol = {0, 0, 1, 3};
  EXPECT_FALSE(s.contains(short_seq));
  EXPECT_FALSE(s.contains(bad_symbol));
  EXPECT_THROW(s.enumerate(11), CapExceededError);
}

}  // namespace
}  // namespace pirlab::comb
