#include "pirlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace pirlab::analysis {
namespace {

std::string describe(const DecomposableCode& code) { return to_string(code.params()); }

void require_within_cap(std::uint64_t required, const EnumerationOptions& opts) {
  if (required > opts.cap) throw CapExceededError(required, opts.cap);
}

// Runs fn(begin, end, worker) over contiguous slices of [0, total).
template <class Fn>
void for_each_range(std::uint64_t total, unsigned workers, Fn&& fn) {
  const std::uint64_t w = std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, total));
  if (w == 1) {
    fn(std::uint64_t{0}, total, 0u);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(w);
  const std::uint64_t chunk = (total + w - 1) / w;
  for (std::uint64_t i = 0; i < w; ++i) {
    const std::uint64_t b = std::min(total, i * chunk);
    const std::uint64_t e = std::min(total, b + chunk);
    threads.emplace_back([&fn, b, e, i] { fn(b, e, static_cast<unsigned>(i)); });
  }
  for (auto& t : threads) t.join();
}

// Maps a realization number to per-message word indices and evaluates
// component tables against them.
class Realizations {
 public:
  explicit Realizations(const DecomposableCode& code)
      : code_(code),
        K_(code.n_messages()),
        L_(code.params().msg_len),
        dom_(code.domain_size()),
        count_(realization_count(code)) {
    words_.resize(dom_ * L_);
    for (std::size_t w = 0; w < dom_; ++w) {
      const auto word = model::word_at(w, L_, code.params().msg_modulus);
      std::copy(word.begin(), word.end(), words_.begin() + static_cast<std::ptrdiff_t>(w * L_));
    }
  }

  std::uint64_t count() const { return count_; }

  // Message 0 is the most significant position.
  void indices(std::uint64_t r, std::vector<std::size_t>& idx) const {
    idx.resize(K_);
    for (std::size_t k = K_; k-- > 0;) {
      idx[k] = static_cast<std::size_t>(r % dom_);
      r /= dom_;
    }
  }

  std::span<const std::uint32_t> word(std::size_t index) const {
    return std::span<const std::uint32_t>(words_).subspan(index * L_, L_);
  }

  std::vector<std::vector<std::uint32_t>> messages(std::uint64_t r) const {
    std::vector<std::size_t> idx;
    indices(r, idx);
    std::vector<std::vector<std::uint32_t>> out;
    for (auto i : idx) {
      auto w = word(i);
      out.emplace_back(w.begin(), w.end());
    }
    return out;
  }

  std::size_t width(const Variable& v) const {
    if (v.kind == Variable::Kind::kMessage) return L_;
    return code_.query(v.server, v.query).length;
  }

  void evaluate(const Variable& v, const std::vector<std::size_t>& idx,
                std::vector<std::uint32_t>& out) const {
    const std::uint32_t y = code_.params().ans_modulus;
    if (v.kind == Variable::Kind::kMessage) {
      auto w = word(idx[v.message]);
      out.insert(out.end(), w.begin(), w.end());
      return;
    }
    const auto& e = code_.query(v.server, v.query);
    for (std::size_t i = 0; i < e.length; ++i) {
      std::uint64_t s = 0;
      for (std::size_t k = 0; k < K_; ++k) {
        const bool include = v.kind == Variable::Kind::kAnswer ||
                             (v.kind == Variable::Kind::kResidual && k != v.message) ||
                             (v.kind == Variable::Kind::kRequested && k == v.message);
        if (include) s += e.component(i, k, K_)(idx[k]);
      }
      out.push_back(static_cast<std::uint32_t>(s % y));
    }
  }

 private:
  const DecomposableCode& code_;
  std::size_t K_;
  std::size_t L_;
  std::size_t dom_;
  std::uint64_t count_;
  std::vector<std::uint32_t> words_;
};

void validate_variables(const DecomposableCode& code, std::span<const Variable> vars) {
  for (const auto& v : vars) {
    if (v.kind != Variable::Kind::kMessage) {
      if (v.server >= code.n_servers() || v.query >= code.query_count(v.server)) {
        throw ContractError("variable refers to an unknown query");
      }
    }
    if (v.kind != Variable::Kind::kAnswer && v.message >= code.n_messages()) {
      throw ContractError("variable refers to an unknown message");
    }
  }
}

bool tuple_reachable(const DecomposableCode& code, std::size_t k, std::span<const std::size_t> tuple) {
  if (k >= code.n_messages()) throw ContractError("message index out of range");
  if (tuple.size() != code.n_servers()) throw ContractError("query tuple needs one query per server");
  for (std::size_t f = 0; f < code.key_count(); ++f) {
    bool match = true;
    for (std::size_t n = 0; n < tuple.size() && match; ++n) match = code.query_index(n, k, f) == tuple[n];
    if (match) return true;
  }
  return false;
}

std::string tuple_params(const DecomposableCode& code, std::size_t k, std::span<const std::size_t> tuple) {
  std::ostringstream os;
  os << describe(code) << " k=" << k << " queries=";
  for (std::size_t n = 0; n < tuple.size(); ++n) os << (n ? "," : "") << code.query(n, tuple[n]).label;
  return os.str();
}

std::string outcome_string(const ExactDistribution& d, const Outcome& o) {
  std::ostringstream os;
  os << '(';
  for (std::size_t v = 0; v < d.variable_count(); ++v) {
    if (v) os << ' ';
    os << '[';
    auto s = d.slice(o, v);
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ']';
  }
  os << ')';
  return os.str();
}

ExactDistribution tuple_pmf(const DecomposableCode& code, std::size_t k,
                            std::span<const std::size_t> tuple, Variable::Kind kind,
                            const EnumerationOptions& opts) {
  if (!tuple_reachable(code, k, tuple)) {
    throw ContractError("query tuple has zero probability for request " + std::to_string(k));
  }
  std::vector<Variable> vars;
  for (std::size_t n = 0; n < tuple.size(); ++n) vars.push_back({kind, n, tuple[n], k});
  return joint_pmf(code, vars, opts);
}

}  // namespace

Rational capacity(std::uint32_t n_servers, std::uint32_t n_messages) {
  if (n_servers < 2) throw ContractError("capacity needs N >= 2");
  if (n_messages < 1) throw ContractError("capacity needs K >= 1");
  // N^(K-1) (N-1) / (N^K - 1)
  BigInt nk1 = boost::multiprecision::pow(BigInt(n_servers), n_messages - 1);
  BigInt nk = nk1 * n_servers;
  return Rational(nk1 * (n_servers - 1), nk - 1);
}

Rational expected_download(const DecomposableCode& code) {
  Rational worst = 0;
  for (std::size_t k = 0; k < code.n_messages(); ++k) {
    Rational total = 0;
    for (std::size_t n = 0; n < code.n_servers(); ++n) total += model::expected_length(code, n, k);
    if (k == 0 || total > worst) worst = total;
  }
  return worst;
}

Rational rate(const DecomposableCode& code) {
  if (code.params().ans_modulus != code.params().msg_modulus) {
    throw UnsupportedError("rate as an exact rational requires y == m");
  }
  const Rational d = expected_download(code);
  if (d == 0) throw ContractError("zero expected download");
  return Rational(code.params().msg_len) / d;
}

UploadCost upload_cost(const DecomposableCode& code) {
  UploadCost u;
  for (std::size_t n = 0; n < code.n_servers(); ++n) {
    u.per_server.push_back(code.query_count(n));
    u.bits += std::log2(static_cast<double>(code.query_count(n)));
  }
  return u;
}

double upload_cost_bits(const DecomposableCode& code) { return upload_cost(code).bits; }

double message_size_bits(const DecomposableCode& code) {
  return code.params().msg_len * std::log2(static_cast<double>(code.params().msg_modulus));
}

std::uint64_t realization_count(const DecomposableCode& code) {
  const auto& p = code.params();
  return checked_pow(code.domain_size(), p.n_messages);
}

VerificationReport verify_correctness(const DecomposableCode& code, const EnumerationOptions& opts) {
  const Realizations real(code);
  const std::size_t N = code.n_servers();
  const std::size_t K = code.n_messages();
  const std::size_t F = code.key_count();
  const std::size_t L = code.params().msg_len;
  const std::uint32_t m = code.params().msg_modulus;
  require_within_cap(checked_mul(real.count(), F), opts);

  // Flat answer buffer layout: offset[n][q].
  std::vector<std::vector<std::size_t>> offset(N);
  std::size_t width = 0;
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t q = 0; q < code.query_count(n); ++q) {
      offset[n].push_back(width);
      width += code.query(n, q).length;
    }
  }

  struct Failure {
    std::uint64_t r;
    std::size_t k;
    std::size_t f;
    std::vector<std::uint32_t> decoded;
  };
  const unsigned workers = std::max(1u, opts.workers);
  std::vector<std::optional<Failure>> first(workers);

  for_each_range(real.count(), workers, [&](std::uint64_t b, std::uint64_t e, unsigned w) {
    std::vector<std::size_t> idx;
    std::vector<std::uint32_t> answers(width);
    std::vector<std::uint32_t> tmp;
    std::vector<std::uint32_t> decoded(L);
    for (std::uint64_t r = b; r < e; ++r) {
      real.indices(r, idx);
      for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t q = 0; q < code.query_count(n); ++q) {
          tmp.clear();
          real.evaluate(Variable::answer(n, q), idx, tmp);
          std::copy(tmp.begin(), tmp.end(), answers.begin() + static_cast<std::ptrdiff_t>(offset[n][q]));
        }
      }
      for (std::size_t k = 0; k < K; ++k) {
        const auto expected = real.word(idx[k]);
        for (std::size_t f = 0; f < F; ++f) {
          const auto rows = code.decode_rows(k, f);
          bool ok = true;
          for (std::size_t j = 0; j < L; ++j) {
            std::uint64_t s = 0;
            for (const auto& t : rows[j]) {
              s += std::uint64_t{t.coeff} * answers[offset[t.server][code.query_index(t.server, k, f)] + t.index];
            }
            decoded[j] = static_cast<std::uint32_t>(s % m);
            ok = ok && decoded[j] == expected[j];
          }
          if (!ok && !first[w]) first[w] = Failure{r, k, f, decoded};
        }
      }
    }
  });

  const std::uint64_t checked = checked_mul(checked_mul(real.count(), K), F);
  for (const auto& fail : first) {
    if (!fail) continue;
    Witness wit;
    wit.messages = real.messages(fail->r);
    wit.key = fail->f;
    wit.target = fail->k;
    wit.queries = code.query_tuple(fail->k, fail->f);
    std::ostringstream os;
    os << "decoded (";
    for (std::size_t j = 0; j < fail->decoded.size(); ++j) os << (j ? "," : "") << fail->decoded[j];
    os << ") instead of W_" << fail->k;
    wit.description = os.str();
    return VerificationReport::fail("correctness", describe(code), checked, std::move(wit));
  }
  return VerificationReport::pass("correctness", describe(code), checked);
}

VerificationReport verify_privacy(const DecomposableCode& code, const EnumerationOptions& opts) {
  require_within_cap(checked_mul(code.key_count(), code.n_messages()), opts);
  std::uint64_t checked = 0;
  for (std::size_t n = 0; n < code.n_servers(); ++n) {
    const auto base = model::query_pmf(code, n, 0);
    for (std::size_t k = 1; k < code.n_messages(); ++k) {
      const auto other = model::query_pmf(code, n, k);
      for (std::size_t q = 0; q < base.probability.size(); ++q) {
        ++checked;
        if (base.probability[q] != other.probability[q]) {
          Witness wit;
          wit.target = k;
          wit.description = "server " + std::to_string(n) + " query " + code.query(n, q).label +
                            ": Pr under k=0 is " + to_string(base.probability[q]) + ", under k=" +
                            std::to_string(k) + " is " + to_string(other.probability[q]);
          return VerificationReport::fail("privacy", describe(code), checked, std::move(wit));
        }
      }
    }
  }
  return VerificationReport::pass("privacy", describe(code), checked);
}

ExactDistribution joint_pmf(const DecomposableCode& code, std::span<const Variable> variables,
                            const EnumerationOptions& opts) {
  validate_variables(code, variables);
  const Realizations real(code);
  require_within_cap(real.count(), opts);
  std::vector<std::size_t> widths;
  for (const auto& v : variables) widths.push_back(real.width(v));

  const unsigned workers = std::max(1u, opts.workers);
  std::vector<ExactDistribution> parts(workers, ExactDistribution(widths));
  for_each_range(real.count(), workers, [&](std::uint64_t b, std::uint64_t e, unsigned w) {
    std::vector<std::size_t> idx;
    std::vector<std::uint32_t> buf;
    for (std::uint64_t r = b; r < e; ++r) {
      real.indices(r, idx);
      buf.clear();
      for (const auto& v : variables) real.evaluate(v, idx, buf);
      parts[w].add(buf);
    }
  });
  ExactDistribution out(widths);
  for (const auto& p : parts) out.merge(p);
  return out;
}

std::vector<std::vector<std::size_t>> positive_probability_tuples(const DecomposableCode& code,
                                                                  std::size_t k) {
  if (k >= code.n_messages()) throw ContractError("message index out of range");
  std::vector<std::vector<std::size_t>> out;
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t f = 0; f < code.key_count(); ++f) {
    auto t = code.query_tuple(k, f);
    if (seen.insert(t).second) out.push_back(std::move(t));
  }
  return out;
}

VerificationReport check_P1(const DecomposableCode& code, std::size_t k,
                            std::span<const std::size_t> tuple, const EnumerationOptions& opts) {
  const auto d = tuple_pmf(code, k, tuple, Variable::Kind::kAnswer, opts);
  const auto params = tuple_params(code, k, tuple);
  const auto res = check_mutual_independence(d);
  if (res.independent) return VerificationReport::pass("P1", params, d.support_size());
  Witness w;
  w.target = k;
  w.queries.assign(tuple.begin(), tuple.end());
  w.description = "answers not independent: joint != product of marginals at " +
                  outcome_string(d, *res.witness);
  return VerificationReport::fail("P1", params, d.support_size(), std::move(w));
}

VerificationReport check_P2(const DecomposableCode& code, std::size_t k,
                            std::span<const std::size_t> tuple, const EnumerationOptions& opts) {
  const auto d = tuple_pmf(code, k, tuple, Variable::Kind::kResidual, opts);
  const auto params = tuple_params(code, k, tuple);
  const auto res = check_pairwise_determination(d);
  if (res.mutually_determining) return VerificationReport::pass("P2", params, d.support_size());
  Witness w;
  w.target = k;
  w.queries.assign(tuple.begin(), tuple.end());
  std::ostringstream os;
  os << "residual at server " << res.pair->first << " does not determine residual at server "
     << res.pair->second << " (value [";
  for (std::size_t i = 0; i < res.witness->size(); ++i) os << (i ? "," : "") << (*res.witness)[i];
  os << "] co-occurs with several values)";
  w.description = os.str();
  return VerificationReport::fail("P2", params, d.support_size(), std::move(w));
}

VerificationReport check_P3(const DecomposableCode& code, std::size_t k,
                            std::span<const std::size_t> tuple, const EnumerationOptions& opts) {
  const auto d = tuple_pmf(code, k, tuple, Variable::Kind::kRequested, opts);
  const auto params = tuple_params(code, k, tuple);
  const auto res = check_mutual_independence(d);
  if (res.independent) return VerificationReport::pass("P3", params, d.support_size());
  Witness w;
  w.target = k;
  w.queries.assign(tuple.begin(), tuple.end());
  w.description = "requested components not independent at " + outcome_string(d, *res.witness);
  return VerificationReport::fail("P3", params, d.support_size(), std::move(w));
}

double conditional_mutual_information(const DecomposableCode& code, std::size_t k,
                                      std::span<const std::size_t> about,
                                      std::span<const std::size_t> given,
                                      const EnumerationOptions& opts) {
  if (k >= code.n_messages()) throw ContractError("message index out of range");
  std::set<std::size_t> seen;
  for (auto s : {about, given}) {
    for (auto x : s) {
      if (x >= code.n_messages() || !seen.insert(x).second) {
        throw ContractError("message sets must be disjoint and in range");
      }
    }
  }
  require_within_cap(checked_mul(realization_count(code), code.key_count()), opts);

  std::vector<Variable> given_vars, both_vars;
  for (auto x : given) given_vars.push_back(Variable::message_of(x));
  both_vars = given_vars;
  for (auto x : about) both_vars.push_back(Variable::message_of(x));

  // H(W_C) and H(W_C, W_X) do not depend on the key.
  const double h_given = given_vars.empty() ? 0.0 : entropy_bits(joint_pmf(code, given_vars, opts));
  const double h_both = both_vars.empty() ? 0.0 : entropy_bits(joint_pmf(code, both_vars, opts));

  std::map<std::vector<std::size_t>, double> per_tuple;
  long double total = 0;
  for (std::size_t f = 0; f < code.key_count(); ++f) {
    const auto tuple = code.query_tuple(k, f);
    auto it = per_tuple.find(tuple);
    if (it == per_tuple.end()) {
      std::vector<Variable> a_given = given_vars, a_both = both_vars;
      for (std::size_t n = 0; n < tuple.size(); ++n) {
        a_given.push_back(Variable::answer(n, tuple[n]));
        a_both.push_back(Variable::answer(n, tuple[n]));
      }
      // I(X; A | C) = H(A, C) - H(C) - H(A, C, X) + H(C, X)
      const double v = entropy_bits(joint_pmf(code, a_given, opts)) - h_given -
                       entropy_bits(joint_pmf(code, a_both, opts)) + h_both;
      it = per_tuple.emplace(tuple, v).first;
    }
    total += it->second;
  }
  return static_cast<double>(total / static_cast<long double>(code.key_count()));
}

double check_lemma1_equality(const DecomposableCode& code, std::size_t k,
                             const EnumerationOptions& opts) {
  const auto& p = code.params();
  if (p.ans_modulus != p.msg_modulus) {
    throw UnsupportedError("lemma equality checks require answer modulus == message modulus");
  }
  if (k >= code.n_messages()) throw ContractError("message index out of range");
  std::vector<std::size_t> others;
  for (std::size_t j = 0; j < code.n_messages(); ++j) {
    if (j != k) others.push_back(j);
  }
  const std::size_t given[] = {k};
  const double mi = conditional_mutual_information(code, k, others, given, opts);
  const Rational R = rate(code);
  const Rational bound_symbols = Rational(p.msg_len) / R - Rational(p.msg_len);
  const double bound = static_cast<double>(bound_symbols) * std::log2(static_cast<double>(p.msg_modulus));
  return mi - bound;
}

double check_lemma2_equality(const DecomposableCode& code, std::size_t k,
                             std::span<const std::size_t> perm, const EnumerationOptions& opts) {
  const auto& p = code.params();
  const std::size_t K = code.n_messages();
  if (p.ans_modulus != p.msg_modulus) {
    throw UnsupportedError("lemma equality checks require answer modulus == message modulus");
  }
  if (K < 2 || k < 1 || k > K - 1) throw ContractError("lemma 2 needs 1 <= k <= K-1");
  if (perm.size() != K) throw ContractError("permutation must have K entries");
  {
    std::vector<std::size_t> sorted(perm.begin(), perm.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < K; ++i) {
      if (sorted[i] != i) throw ContractError("not a permutation of the message indices");
    }
  }
  auto image = [&](std::size_t b, std::size_t e) {
    std::vector<std::size_t> out;
    for (std::size_t i = b; i < e; ++i) out.push_back(perm[i]);
    return out;
  };
  const double lhs = conditional_mutual_information(code, perm[k - 1], image(k, K), image(0, k), opts);
  const double rhs = conditional_mutual_information(code, perm[k], image(k + 1, K), image(0, k + 1), opts);
  return static_cast<double>(p.n_servers) * lhs - rhs -
         p.msg_len * std::log2(static_cast<double>(p.msg_modulus));
}

}  // namespace pirlab::analysis
