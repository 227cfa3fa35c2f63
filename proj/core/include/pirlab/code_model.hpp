#pragma once

// Decomposable PIR codes as explicit component-function tables.
//
// Every answer symbol of server n for query q is a group sum over messages
// of per-message component functions X^L -> Y. A component function is stored
// as a dense table of m^L outputs indexed in row-major input order: the
// message word (w_0, ..., w_{L-1}) maps to index sum_j w_j * m^(L-1-j).
//
// The key space, the query map (k, key) -> one query per server, and a linear
// decoder are stored alongside the answer tables.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pirlab/core.hpp"

namespace pirlab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

std::string to_string(const Rational& r);

}  // namespace pirlab

namespace pirlab::model {

enum class TableKind { kConstant, kBalanced, kNeither };

const char* to_string(TableKind kind);

class ComponentTable {
 public:
  ComponentTable(std::vector<std::uint32_t> outputs, std::uint32_t modulus);
  static ComponentTable constant(std::size_t domain_size, std::uint32_t value,
                                 std::uint32_t modulus);

  std::uint32_t operator()(std::size_t input_index) const { return outputs_[input_index]; }
  std::size_t domain_size() const { return outputs_.size(); }
  std::uint32_t modulus() const { return modulus_; }
  std::span<const std::uint32_t> outputs() const { return outputs_; }

  // CONSTANT if every output agrees, BALANCED if every value of Z_y has
  // exactly domain/y preimages, NEITHER otherwise.
  TableKind classify() const;

  ComponentTable with_entry(std::size_t input_index, std::uint32_t value) const;

  friend bool operator==(const ComponentTable&, const ComponentTable&) = default;

 private:
  std::vector<std::uint32_t> outputs_;
  std::uint32_t modulus_;
};

// One (server, query) pair: the answer length and the length x K grid of
// component tables (row i = answer symbol, column k = message).
struct QueryEntry {
  std::string label;
  std::size_t length = 0;
  std::vector<ComponentTable> grid;

  const ComponentTable& component(std::size_t i, std::size_t k, std::size_t n_messages) const {
    return grid[i * n_messages + k];
  }

  friend bool operator==(const QueryEntry&, const QueryEntry&) = default;
};

// coeff * A_server[index], summed in Z_m.
struct DecodeTerm {
  std::size_t server = 0;
  std::size_t index = 0;
  std::uint32_t coeff = 1;

  friend bool operator==(const DecodeTerm&, const DecodeTerm&) = default;
};

// One output symbol of the reconstruction.
using DecodeRow = std::vector<DecodeTerm>;

class DecomposableCode {
 public:
  // queries[n] is the ordered query set of server n.
  // query_map has K * |F| * N entries indexed ((k * |F|) + f) * N + n.
  // decoder has K * |F| entries of L rows each, indexed k * |F| + f.
  // Decoding is linear over Z_m and therefore requires y == m.
  DecomposableCode(CodeParams params, std::vector<std::vector<QueryEntry>> queries,
                   std::vector<std::string> keys, std::vector<std::size_t> query_map,
                   std::vector<std::vector<DecodeRow>> decoder);

  const CodeParams& params() const { return params_; }
  std::size_t n_servers() const { return params_.n_servers; }
  std::size_t n_messages() const { return params_.n_messages; }
  std::size_t domain_size() const { return domain_size_; }  // m^L

  std::size_t query_count(std::size_t n) const { return queries_.at(n).size(); }
  const QueryEntry& query(std::size_t n, std::size_t q) const { return queries_.at(n).at(q); }
  std::span<const QueryEntry> queries(std::size_t n) const { return queries_.at(n); }
  std::optional<std::size_t> find_query(std::size_t n, std::string_view label) const;

  std::size_t key_count() const { return keys_.size(); }
  const std::string& key_label(std::size_t f) const { return keys_.at(f); }
  std::span<const std::string> keys() const { return keys_; }

  // Query index sent to server n when requesting message k with key f.
  std::size_t query_index(std::size_t n, std::size_t k, std::size_t f) const;
  std::vector<std::size_t> query_tuple(std::size_t k, std::size_t f) const;

  std::span<const DecodeRow> decode_rows(std::size_t k, std::size_t f) const;

  // Copy with one component-table entry replaced.
  DecomposableCode with_table_entry(std::size_t n, std::size_t q, std::size_t i, std::size_t k,
                                    std::size_t input_index, std::uint32_t value) const;

  std::span<const std::size_t> raw_query_map() const { return query_map_; }
  std::span<const std::vector<DecodeRow>> raw_decoder() const { return decoder_; }

  friend bool operator==(const DecomposableCode&, const DecomposableCode&) = default;

 private:
  void validate() const;

  CodeParams params_;
  std::size_t domain_size_ = 0;
  std::vector<std::vector<QueryEntry>> queries_;
  std::vector<std::string> keys_;
  std::vector<std::size_t> query_map_;
  std::vector<std::vector<DecodeRow>> decoder_;
};

// Index of a message word in row-major input order.
std::size_t word_index(std::span<const std::uint32_t> word, std::uint32_t modulus);
// Inverse of word_index.
std::vector<std::uint32_t> word_at(std::size_t index, std::size_t length, std::uint32_t modulus);

AnswerVector eval_answer(const DecomposableCode& code, std::size_t n, std::size_t q,
                         const MessageSet& msgs);

// Apply the stored decoder for (k, f) to a full answer tuple.
Message decode(const DecomposableCode& code, std::size_t k, std::size_t f,
               std::span<const AnswerVector> answers);

struct TableClassification {
  std::size_t server;
  std::size_t query;
  std::size_t row;
  std::size_t message;
  TableKind kind;
};

struct UniformityReport {
  bool uniformly_decomposable = true;
  std::size_t constant_tables = 0;
  std::size_t balanced_tables = 0;
  std::vector<TableClassification> offenders;  // tables classified NEITHER
};

UniformityReport is_uniformly_decomposable(const DecomposableCode& code);

// Exact query distribution at server n for request k under a uniform key.
struct QueryPmf {
  std::vector<Rational> probability;  // indexed by query index at the server

  friend bool operator==(const QueryPmf&, const QueryPmf&) = default;
};

QueryPmf query_pmf(const DecomposableCode& code, std::size_t n, std::size_t k);

// Expected answer length at server n for request k, exact.
Rational expected_length(const DecomposableCode& code, std::size_t n, std::size_t k);

// The (2,2) code with one-symbol messages: server 0 answers nothing or a+b,
// server 1 answers a or b depending on key and request.
DecomposableCode builtin_table1(std::uint32_t modulus = 2);

// The (2,2) reference code with four-symbol messages keyed by the 24
// assignments of positions {1,2,3,4} to the roles (square, diamond, club,
// heart); three answer symbols per server.
DecomposableCode builtin_sunjafar22(std::uint32_t modulus = 2);

}  // namespace pirlab::model
