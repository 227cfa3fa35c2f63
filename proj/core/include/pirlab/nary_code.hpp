#pragma once

// The N-ary-indexed capacity-achieving PIR code.
//
// Messages have L = N - 1 symbols over Z_m; a dummy zero symbol is prepended
// so that message k reads as (W_{k,0} = 0, W_{k,1}, ..., W_{k,N-1}). Queries to
// server n are the length-K base-N digit vectors whose digit sum is n mod N,
// and the answer to query q is the single symbol sum_k W_{k,q_k}, except that
// the all-zero query at server 0 is answered with nothing.
//
// The key is K-1 uniform base-N digits. To request message k every digit but
// the k-th is copied from the key; the k-th digit is (n - F*) mod N where F* is
// the key digit sum. Server F* then returns the pure interference term, which
// is subtracted from the other N-1 answers.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pirlab/code_model.hpp"
#include "pirlab/core.hpp"

namespace pirlab::nary {

// A message with its dummy zero symbol prepended.
class PaddedMessage {
 public:
  static PaddedMessage from(const Message& msg);

  std::size_t size() const { return values_.size(); }
  Symbol operator[](std::size_t j) const { return Symbol(values_.at(j), modulus_); }

 private:
  PaddedMessage(std::vector<std::uint32_t> values, std::uint32_t modulus)
      : values_(std::move(values)), modulus_(modulus) {}

  std::vector<std::uint32_t> values_;
  std::uint32_t modulus_;
};

class NaryCode {
 public:
  // Throws ContractError unless N >= 2, K >= 1, m >= 2.
  static NaryCode make(std::uint32_t servers, std::uint32_t messages, std::uint32_t modulus);

  const CodeParams& params() const { return params_; }
  std::uint32_t servers() const { return params_.n_servers; }
  std::uint32_t messages() const { return params_.n_messages; }
  std::uint32_t modulus() const { return params_.msg_modulus; }

  // N^(K-1), the size of every query set and of the key space.
  std::uint64_t query_set_size() const { return query_set_size_; }
  std::uint64_t key_count() const { return query_set_size_; }

  // Query set of server n; ordered by the first K-1 digits read as a base-N
  // number, the last digit being determined by n.
  std::vector<QueryVector> query_set(std::uint32_t n) const;
  // Position of q within query_set(q.digit_sum()).
  std::uint64_t query_index(const QueryVector& q) const;
  QueryVector query_at(std::uint32_t n, std::uint64_t index) const;

  // Keys in lexicographic order.
  RandomKey key_at(std::uint64_t index) const;
  std::uint64_t key_index(const RandomKey& key) const;
  RandomKey sample_key(std::mt19937_64& rng) const;

  // F*, the server whose answer carries only interference.
  std::uint32_t interference_server(const RandomKey& key) const;

  QueryVector query_vector(std::uint32_t n, std::uint32_t k, const RandomKey& key) const;

  // 0 for the all-zero query at server 0, else 1. Throws if q does not
  // belong to server n.
  std::size_t answer_length(std::uint32_t n, const QueryVector& q) const;

  AnswerVector answer(std::uint32_t n, const QueryVector& q, const MessageSet& msgs) const;

  Message reconstruct(std::span<const AnswerVector> answers, std::uint32_t k,
                      const RandomKey& key) const;

  // query_vector -> answer -> reconstruct, all in-process.
  Message retrieve(const MessageSet& msgs, std::uint32_t k, const RandomKey& key) const;

  // Symbolic answer such as "a0+b1+c2", or "0" when nothing is sent.
  std::string answer_label(std::uint32_t n, const QueryVector& q) const;

  // Same code as explicit component tables. Query indices match query_index,
  // key indices match key_index.
  model::DecomposableCode export_decomposable() const;

 private:
  explicit NaryCode(CodeParams params);

  void check_server(std::uint32_t n) const;
  void check_key(const RandomKey& key) const;
  void check_query(std::uint32_t n, const QueryVector& q) const;

  CodeParams params_;
  std::uint64_t query_set_size_;
};

// Label used for message k in symbolic output: a, b, c, ... then m26, m27, ...
std::string message_letter(std::uint32_t k);

// K uniformly random messages of length L over Z_m.
MessageSet random_messages(const CodeParams& params, std::mt19937_64& rng);

}  // namespace pirlab::nary
