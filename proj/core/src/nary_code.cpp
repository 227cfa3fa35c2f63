#include "pirlab/nary_code.hpp"

#include <numeric>

namespace pirlab::nary {

PaddedMessage PaddedMessage::from(const Message& msg) {
  std::vector<std::uint32_t> v;
  v.reserve(msg.size() + 1);
  v.push_back(0);
  v.insert(v.end(), msg.values().begin(), msg.values().end());
  return PaddedMessage(std::move(v), msg.modulus());
}

std::string message_letter(std::uint32_t k) {
  if (k < 26) return std::string(1, static_cast<char>('a' + k));
  return "m" + std::to_string(k);
}

NaryCode::NaryCode(CodeParams params) : params_(params) {
  query_set_size_ = checked_pow(params_.n_servers, params_.n_messages - 1);
}

NaryCode NaryCode::make(std::uint32_t servers, std::uint32_t messages, std::uint32_t modulus) {
  if (servers < 2) throw ContractError("N-ary code needs at least 2 servers");
  if (messages < 1) throw ContractError("N-ary code needs at least 1 message");
  if (modulus < 2) throw ContractError("modulus must be at least 2");
  if (checked_pow(servers, messages - 1) > (std::uint64_t{1} << 40)) {
    throw UnsupportedError("query sets larger than 2^40 are not supported");
  }
  CodeParams p{servers, messages, servers - 1, modulus, modulus};
  p.validate();
  return NaryCode(p);
}

void NaryCode::check_server(std::uint32_t n) const {
  if (n >= servers()) throw ContractError("server index " + std::to_string(n) + " out of range");
}

void NaryCode::check_key(const RandomKey& key) const {
  if (key.size() != messages() - 1 || key.radix() != servers()) {
    throw ContractError("key must have K-1 base-N digits");
  }
}

void NaryCode::check_query(std::uint32_t n, const QueryVector& q) const {
  check_server(n);
  if (q.size() != messages() || q.radix() != servers()) {
    throw ContractError("query must have K base-N digits");
  }
  if (q.digit_sum() != n) {
    throw ContractError("query " + to_string(q) + " does not belong to server " + std::to_string(n));
  }
}

std::vector<QueryVector> NaryCode::query_set(std::uint32_t n) const {
  check_server(n);
  std::vector<QueryVector> out;
  out.reserve(query_set_size_);
  for (std::uint64_t i = 0; i < query_set_size_; ++i) out.push_back(query_at(n, i));
  return out;
}

QueryVector NaryCode::query_at(std::uint32_t n, std::uint64_t index) const {
  check_server(n);
  if (index >= query_set_size_) throw ContractError("query index out of range");
  const std::uint32_t N = servers();
  std::vector<std::uint32_t> d(messages());
  std::uint64_t sum = 0;
  for (std::size_t j = messages() - 1; j-- > 0;) {
    d[j] = static_cast<std::uint32_t>(index % N);
    index /= N;
    sum += d[j];
  }
  d[messages() - 1] = static_cast<std::uint32_t>((n + N - sum % N) % N);
  return QueryVector(std::move(d), N);
}

std::uint64_t NaryCode::query_index(const QueryVector& q) const {
  check_query(q.digit_sum(), q);
  std::uint64_t idx = 0;
  for (std::size_t j = 0; j + 1 < q.size(); ++j) idx = idx * servers() + q[j];
  return idx;
}

RandomKey NaryCode::key_at(std::uint64_t index) const {
  if (index >= key_count()) throw ContractError("key index out of range");
  std::vector<std::uint32_t> d(messages() - 1);
  for (std::size_t j = d.size(); j-- > 0;) {
    d[j] = static_cast<std::uint32_t>(index % servers());
    index /= servers();
  }
  return RandomKey(std::move(d), servers());
}

std::uint64_t NaryCode::key_index(const RandomKey& key) const {
  check_key(key);
  std::uint64_t idx = 0;
  for (auto d : key.digits()) idx = idx * servers() + d;
  return idx;
}

RandomKey NaryCode::sample_key(std::mt19937_64& rng) const {
  std::uniform_int_distribution<std::uint32_t> digit(0, servers() - 1);
  std::vector<std::uint32_t> d(messages() - 1);
  for (auto& x : d) x = digit(rng);
  return RandomKey(std::move(d), servers());
}

std::uint32_t NaryCode::interference_server(const RandomKey& key) const {
  check_key(key);
  return key.digit_sum();
}

QueryVector NaryCode::query_vector(std::uint32_t n, std::uint32_t k, const RandomKey& key) const {
  check_server(n);
  check_key(key);
  if (k >= messages()) throw ContractError("message index out of range");
  const std::uint32_t N = servers();
  const std::uint32_t fstar = key.digit_sum();
  std::vector<std::uint32_t> d;
  d.reserve(messages());
  const auto kd = key.digits();
  for (std::uint32_t j = 0; j < messages(); ++j) {
    if (j < k) {
      d.push_back(kd[j]);
    } else if (j == k) {
      d.push_back((n + N - fstar) % N);
    } else {
      d.push_back(kd[j - 1]);
    }
  }
  return QueryVector(std::move(d), N);
}

std::size_t NaryCode::answer_length(std::uint32_t n, const QueryVector& q) const {
  check_query(n, q);
  return (n == 0 && q.is_zero()) ? 0 : 1;
}

AnswerVector NaryCode::answer(std::uint32_t n, const QueryVector& q, const MessageSet& msgs) const {
  check_query(n, q);
  msgs.check_dimensions(params_);
  if (answer_length(n, q) == 0) return AnswerVector(modulus());
  Symbol acc(0, modulus());
  for (std::uint32_t k = 0; k < messages(); ++k) acc = acc + PaddedMessage::from(msgs[k])[q[k]];
  return AnswerVector(std::vector<Symbol>{acc}, modulus());
}

Message NaryCode::reconstruct(std::span<const AnswerVector> answers, std::uint32_t k,
                              const RandomKey& key) const {
  check_key(key);
  if (k >= messages()) throw ContractError("message index out of range");
  if (answers.size() != servers()) {
    throw ContractError("expected " + std::to_string(servers()) + " answers, got " +
                        std::to_string(answers.size()));
  }
  for (std::uint32_t n = 0; n < servers(); ++n) {
    const auto expected = answer_length(n, query_vector(n, k, key));
    if (answers[n].size() != expected || answers[n].modulus() != modulus()) {
      throw ContractError("answer from server " + std::to_string(n) + " has length " +
                          std::to_string(answers[n].size()) + ", expected " +
                          std::to_string(expected));
    }
  }
  const std::uint32_t N = servers();
  const std::uint32_t fstar = key.digit_sum();
  const Symbol interference = answers[fstar].empty() ? Symbol(0, modulus()) : answers[fstar][0];
  std::vector<std::uint32_t> payload(N - 1, 0);
  for (std::uint32_t n = 0; n < N; ++n) {
    if (n == fstar) continue;
    const std::uint32_t pos = (n + N - fstar) % N;  // position in the padded message, never 0
    payload[pos - 1] = (answers[n][0] - interference).value();
  }
  return Message(std::move(payload), modulus());
}

Message NaryCode::retrieve(const MessageSet& msgs, std::uint32_t k, const RandomKey& key) const {
  std::vector<AnswerVector> answers;
  answers.reserve(servers());
  for (std::uint32_t n = 0; n < servers(); ++n) answers.push_back(answer(n, query_vector(n, k, key), msgs));
  return reconstruct(answers, k, key);
}

std::string NaryCode::answer_label(std::uint32_t n, const QueryVector& q) const {
  if (answer_length(n, q) == 0) return "0";
  std::string s;
  for (std::uint32_t k = 0; k < messages(); ++k) {
    if (k) s += "+";
    s += message_letter(k) + std::to_string(q[k]);
  }
  return s;
}

model::DecomposableCode NaryCode::export_decomposable() const {
  using model::ComponentTable;
  const std::uint32_t N = servers();
  const std::uint32_t K = messages();
  const std::uint32_t L = params_.msg_len;
  const std::uint32_t m = modulus();
  const auto dom = static_cast<std::size_t>(checked_pow(m, L));
  if (checked_mul(checked_mul(query_set_size_, N), checked_mul(K, dom)) > (std::uint64_t{1} << 28)) {
    throw UnsupportedError("exported code would exceed 2^28 table entries");
  }

  // Component for digit j: constant zero for the dummy coordinate, otherwise
  // projection onto payload symbol j-1.
  std::vector<ComponentTable> by_digit;
  by_digit.push_back(ComponentTable::constant(dom, 0, m));
  for (std::uint32_t j = 1; j < N; ++j) {
    std::vector<std::uint32_t> out(dom);
    for (std::size_t w = 0; w < dom; ++w) out[w] = model::word_at(w, L, m)[j - 1];
    by_digit.emplace_back(std::move(out), m);
  }

  std::vector<std::vector<model::QueryEntry>> queries(N);
  for (std::uint32_t n = 0; n < N; ++n) {
    for (std::uint64_t i = 0; i < query_set_size_; ++i) {
      const auto q = query_at(n, i);
      model::QueryEntry e;
      e.label = to_string(q);
      e.length = answer_length(n, q);
      for (std::size_t r = 0; r < e.length; ++r) {
        for (std::uint32_t k = 0; k < K; ++k) e.grid.push_back(by_digit[q[k]]);
      }
      queries[n].push_back(std::move(e));
    }
  }

  const auto F = static_cast<std::size_t>(key_count());
  std::vector<std::string> keys;
  for (std::size_t f = 0; f < F; ++f) keys.push_back(to_string(key_at(f)));

  std::vector<std::size_t> qmap(K * F * N);
  std::vector<std::vector<model::DecodeRow>> dec(K * F);
  for (std::uint32_t k = 0; k < K; ++k) {
    for (std::size_t f = 0; f < F; ++f) {
      const auto key = key_at(f);
      for (std::uint32_t n = 0; n < N; ++n) {
        qmap[(k * F + f) * N + n] = static_cast<std::size_t>(query_index(query_vector(n, k, key)));
      }
      const std::uint32_t fstar = key.digit_sum();
      const bool interference_empty = answer_length(fstar, query_vector(fstar, k, key)) == 0;
      std::vector<model::DecodeRow> rows(L);
      for (std::uint32_t n = 0; n < N; ++n) {
        if (n == fstar) continue;
        const std::uint32_t pos = (n + N - fstar) % N;
        model::DecodeRow row = {{n, 0, 1}};
        if (!interference_empty) row.push_back({fstar, 0, m - 1});
        rows[pos - 1] = std::move(row);
      }
      dec[k * F + f] = std::move(rows);
    }
  }
  return model::DecomposableCode(params_, std::move(queries), std::move(keys), std::move(qmap),
                                 std::move(dec));
}

MessageSet random_messages(const CodeParams& params, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> sym(0, params.msg_modulus - 1);
  std::vector<Message> msgs;
  for (std::uint32_t k = 0; k < params.n_messages; ++k) {
    std::vector<std::uint32_t> v(params.msg_len);
    for (auto& x : v) x = sym(rng);
    msgs.emplace_back(std::move(v), params.msg_modulus);
  }
  return MessageSet(std::move(msgs));
}

}  // namespace pirlab::nary
