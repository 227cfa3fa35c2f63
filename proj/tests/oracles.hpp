#pragma once

// Reference computations written directly from the definitions, without
// going through the library code paths they are used to check.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pirlab/code_model.hpp"

namespace oracle {

using pirlab::BigInt;
using pirlab::Rational;

// (sum_{i<K} N^-i)^-1 by direct summation.
inline Rational capacity_by_sum(std::uint32_t N, std::uint32_t K) {
  Rational sum = 0;
  BigInt p = 1;
  for (std::uint32_t i = 0; i < K; ++i) {
    sum += Rational(BigInt(1), p);
    p *= N;
  }
  return 1 / sum;
}

// Digits of the query for message k at server n under key `key` (K-1 digits):
// key digits fill every position except k, position k makes the sum n mod N.
inline std::vector<std::uint32_t> nary_query(std::uint32_t N, std::uint32_t K, std::uint32_t n, std::uint32_t k,
                                             const std::vector<std::uint32_t>& key) {
  std::uint32_t fstar = 0;
  for (auto d : key) fstar = (fstar + d) % N;
  std::vector<std::uint32_t> q(K);
  std::size_t next = 0;
  for (std::uint32_t j = 0; j < K; ++j) q[j] = j == k ? (n + N - fstar) % N : key[next++];
  return q;
}

// Answer of server n: nothing for server 0 on the all-zero query, otherwise
// the sum of message symbols selected by the digits (digit 0 selects the
// dummy zero symbol, digit d >= 1 selects symbol d).
inline std::vector<std::uint32_t> nary_answer(std::uint32_t m, std::uint32_t n, const std::vector<std::uint32_t>& q,
                                              const std::vector<std::vector<std::uint32_t>>& msgs) {
  bool zero = true;
  for (auto d : q) zero = zero && d == 0;
  if (n == 0 && zero) return {};
  std::uint32_t s = 0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (q[k] > 0) s = (s + msgs[k][q[k] - 1]) % m;
  }
  return {s};
}

inline std::vector<std::uint32_t> digits_of(std::uint64_t v, std::uint32_t radix, std::size_t len) {
  std::vector<std::uint32_t> d(len);
  for (std::size_t i = len; i-- > 0;) {
    d[i] = static_cast<std::uint32_t>(v % radix);
    v /= radix;
  }
  return d;
}

inline double entropy_of_counts(const std::map<std::vector<std::uint32_t>, std::uint64_t>& counts) {
  double total = 0;
  for (const auto& [k, c] : counts) total += static_cast<double>(c);
  double h = 0;
  for (const auto& [k, c] : counts) {
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

// I(W_{!=k}; A_{0:N-1} | W_k, F) for the N-ary code, by enumeration.
// Answers are deterministic given all messages and the key, so the quantity
// equals the key average of H(A | W_k).
inline double nary_lemma1_mi(std::uint32_t N, std::uint32_t K, std::uint32_t m, std::uint32_t k) {
  const std::uint32_t L = N - 1;
  std::uint64_t keys = 1, realizations = 1;
  for (std::uint32_t i = 0; i + 1 < K; ++i) keys *= N;
  for (std::uint32_t i = 0; i < K * L; ++i) realizations *= m;
  double acc = 0;
  for (std::uint64_t f = 0; f < keys; ++f) {
    const auto key = digits_of(f, N, K - 1);
    std::map<std::vector<std::uint32_t>, std::uint64_t> joint, wk;
    for (std::uint64_t r = 0; r < realizations; ++r) {
      const auto flat = digits_of(r, m, K * L);
      std::vector<std::vector<std::uint32_t>> msgs(K);
      for (std::uint32_t j = 0; j < K; ++j) msgs[j].assign(flat.begin() + j * L, flat.begin() + (j + 1) * L);
      std::vector<std::uint32_t> outcome = msgs[k];
      ++wk[outcome];
      for (std::uint32_t n = 0; n < N; ++n) {
        const auto a = nary_answer(m, n, nary_query(N, K, n, k, key), msgs);
        outcome.push_back(static_cast<std::uint32_t>(a.size()));
        outcome.insert(outcome.end(), a.begin(), a.end());
      }
      ++joint[outcome];
    }
    acc += entropy_of_counts(joint) - entropy_of_counts(wk);
  }
  return acc / static_cast<double>(keys);
}

// Symbolic form of answer row i of query q at server n, such as "a2+b2".
// Each component table must be zero or a projection onto one symbol.
inline std::string symbolic_row(const pirlab::model::DecomposableCode& code, std::size_t n, std::size_t q,
                                std::size_t i, bool index_symbols) {
  const auto& p = code.params();
  const auto& e = code.query(n, q);
  std::string out;
  for (std::size_t k = 0; k < code.n_messages(); ++k) {
    const auto& t = e.component(i, k, code.n_messages());
    bool zero = true;
    for (auto v : t.outputs()) zero = zero && v == 0;
    if (zero) continue;
    std::string term = "?";
    for (std::size_t j = 0; j < p.msg_len; ++j) {
      bool proj = true;
      for (std::size_t idx = 0; idx < t.domain_size() && proj; ++idx) {
        proj = t(idx) == pirlab::model::word_at(idx, p.msg_len, p.msg_modulus)[j];
      }
      if (proj) {
        term = std::string(1, static_cast<char>('a' + k)) + (index_symbols ? std::to_string(j + 1) : "");
        break;
      }
    }
    out += (out.empty() ? "" : "+") + term;
  }
  return out.empty() ? "0" : out;
}

}  // namespace oracle
