#pragma once

// Performance metrics and the exhaustive verifier for decomposable codes.
//
// Nothing here samples. Correctness, privacy and the structural properties
// are decided by enumerating every message realization (uniform over
// X^(KL)) and every key (uniform over F). Enumeration is refused with
// CapExceededError when the work exceeds EnumerationOptions::cap.

#include <cstdint>
#include <span>
#include <vector>

#include "pirlab/code_model.hpp"
#include "pirlab/distribution.hpp"
#include "pirlab/report.hpp"

namespace pirlab::analysis {

using model::DecomposableCode;

struct EnumerationOptions {
  std::uint64_t cap = kDefaultEnumerationCap;
  // Realizations are split into contiguous ranges across this many threads.
  // Results do not depend on the worker count.
  unsigned workers = 1;
};

// (1 + 1/N + ... + 1/N^(K-1))^(-1).
Rational capacity(std::uint32_t n_servers, std::uint32_t n_messages);

// max over requests k of sum_n E(ell_n) under a uniform key, in symbols.
Rational expected_download(const DecomposableCode& code);

// L / expected_download, valid because every code here uses y == m.
// Throws ContractError on zero download, UnsupportedError when y != m.
Rational rate(const DecomposableCode& code);

struct UploadCost {
  double bits = 0;
  std::vector<std::size_t> per_server;  // |Q_n|
};

UploadCost upload_cost(const DecomposableCode& code);
double upload_cost_bits(const DecomposableCode& code);

// L * log2(m).
double message_size_bits(const DecomposableCode& code);

// Number of message realizations m^(KL), saturating.
std::uint64_t realization_count(const DecomposableCode& code);

// Decoding equals W_k for every realization, key and target.
VerificationReport verify_correctness(const DecomposableCode& code,
                                      const EnumerationOptions& opts = {});

// query_pmf(n, k) == query_pmf(n, 0) exactly for every n and k.
VerificationReport verify_privacy(const DecomposableCode& code,
                                  const EnumerationOptions& opts = {});

// A random variable derived from the messages for a fixed (server, query).
struct Variable {
  enum class Kind {
    kAnswer,     // full answer W . G
    kResidual,   // components of every message except `message`
    kRequested,  // component of `message` only
    kMessage,    // the raw message W_message
  };
  Kind kind = Kind::kAnswer;
  std::size_t server = 0;
  std::size_t query = 0;
  std::size_t message = 0;

  static Variable answer(std::size_t n, std::size_t q) { return {Kind::kAnswer, n, q, 0}; }
  static Variable residual(std::size_t n, std::size_t q, std::size_t k) {
    return {Kind::kResidual, n, q, k};
  }
  static Variable requested(std::size_t n, std::size_t q, std::size_t k) {
    return {Kind::kRequested, n, q, k};
  }
  static Variable message_of(std::size_t k) { return {Kind::kMessage, 0, 0, k}; }
};

// Exact joint pmf of the variables over uniformly distributed messages.
ExactDistribution joint_pmf(const DecomposableCode& code, std::span<const Variable> variables,
                            const EnumerationOptions& opts = {});

// Distinct query tuples (one query per server) reached by some key when
// requesting message k, in order of first appearance over keys.
std::vector<std::vector<std::size_t>> positive_probability_tuples(const DecomposableCode& code,
                                                                  std::size_t k);

// Mutual independence of the N answers. Throws ContractError when the tuple
// has probability zero for request k.
VerificationReport check_P1(const DecomposableCode& code, std::size_t k,
                            std::span<const std::size_t> tuple, const EnumerationOptions& opts = {});
// The N residuals (components of all messages but W_k) determine each other.
VerificationReport check_P2(const DecomposableCode& code, std::size_t k,
                            std::span<const std::size_t> tuple, const EnumerationOptions& opts = {});
// The N components of W_k are mutually independent.
VerificationReport check_P3(const DecomposableCode& code, std::size_t k,
                            std::span<const std::size_t> tuple, const EnumerationOptions& opts = {});

// I(W_about ; A^[k]_{0:N-1} | W_given, F) in bits, averaging over keys.
double conditional_mutual_information(const DecomposableCode& code, std::size_t k,
                                      std::span<const std::size_t> about,
                                      std::span<const std::size_t> given,
                                      const EnumerationOptions& opts = {});

// I(W_{!=k}; A^[k] | W_k, F) - L (1/R - 1) log2 m. Zero for capacity-achieving
// codes. UnsupportedError when y != m.
double check_lemma1_equality(const DecomposableCode& code, std::size_t k,
                             const EnumerationOptions& opts = {});

// N I(W_{pi(k:K-1)}; A^[pi(k-1)] | W_{pi(0:k-1)}, F)
//   - I(W_{pi(k+1:K-1)}; A^[pi(k)] | W_{pi(0:k)}, F) - L log2 m.
// Requires 1 <= k <= K-1 and a permutation of {0..K-1}.
double check_lemma2_equality(const DecomposableCode& code, std::size_t k,
                             std::span<const std::size_t> perm, const EnumerationOptions& opts = {});

inline constexpr double kEntropyTolerance = 1e-9;

}  // namespace pirlab::analysis
