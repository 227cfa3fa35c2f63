#pragma once

// Code transformations: server and message relabeling, space-sharing over
// several blocks, and variety-symmetrization.
//
// Space-sharing splits each message into consecutive blocks, runs one code per
// block with its own independent uniform key, and concatenates the answers.
// A combined query is the tuple of block queries; its label joins the block
// labels with '|'.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pirlab/code_model.hpp"
#include "pirlab/combinatorics.hpp"

namespace pirlab::sym {

using model::DecomposableCode;

struct Block {
  DecomposableCode code;
  std::string descriptor;  // e.g. "identity", "server-shift 1", "message-perm 1,0"
};

class SpaceShareCode {
 public:
  SpaceShareCode(std::vector<Block> blocks, DecomposableCode combined)
      : blocks_(std::move(blocks)), combined_(std::move(combined)) {}

  const std::vector<Block>& blocks() const { return blocks_; }
  // The product code; message length is the sum of block lengths.
  const DecomposableCode& code() const { return combined_; }

 private:
  std::vector<Block> blocks_;
  DecomposableCode combined_;
};

// Server n of the result behaves as server perm[n] of the base.
DecomposableCode server_permute(const DecomposableCode& code, std::span<const std::size_t> perm);

// Answers satisfy phi'_n(q, W_0..W_{K-1}) = phi_n(q, W_perm[0]..W_perm[K-1]);
// retrieving message k' runs the base retrieval of message perm^-1(k').
DecomposableCode message_permute(const DecomposableCode& code, std::span<const std::size_t> perm);

// Product of the blocks with independent keys. Blocks must agree on N, K, m
// and y. The size cap bounds the total number of table entries and query
// map entries materialized.
SpaceShareCode space_share(std::vector<Block> blocks, std::uint64_t cap = kDefaultEnumerationCap);
SpaceShareCode space_share(std::span<const DecomposableCode> blocks,
                           std::uint64_t cap = kDefaultEnumerationCap);

// Blocks c = 0..N-1 use the cyclic relabeling n -> (n + c) mod N.
SpaceShareCode server_symmetrize(const DecomposableCode& code, std::uint64_t cap = kDefaultEnumerationCap);

// One block per message permutation, lexicographic order.
SpaceShareCode message_symmetrize(const DecomposableCode& code, std::uint64_t cap = kDefaultEnumerationCap);

// Composition of base queries at server n: kappa[q] = |{f : phi_n(k, f) = q}|.
// Throws ContractError when it depends on k, which happens exactly when the
// base code is not private.
std::vector<std::size_t> query_composition(const DecomposableCode& code, std::size_t n);

// Key = permutation sigma of the base keys; message = |F| blocks of L symbols;
// block i is served with base key sigma[i]. The query set of server n is the
// constant-composition set with composition query_composition(code, n), in
// lexicographic order. Refuses codes that fail the privacy check.
DecomposableCode variety_symmetrize(const DecomposableCode& code,
                                    std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace pirlab::sym
