#include "pirlab/code_model.hpp"

#include <algorithm>
#include <sstream>

namespace pirlab {

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << '/' << denominator(r);
  return os.str();
}

}  // namespace pirlab

namespace pirlab::model {

const char* to_string(TableKind kind) {
  switch (kind) {
    case TableKind::kConstant:
      return "CONSTANT";
    case TableKind::kBalanced:
      return "BALANCED";
    case TableKind::kNeither:
      return "NEITHER";
  }
  return "?";
}

ComponentTable::ComponentTable(std::vector<std::uint32_t> outputs, std::uint32_t modulus)
    : outputs_(std::move(outputs)), modulus_(modulus) {
  if (modulus < 2) throw ContractError("table modulus must be at least 2");
  if (outputs_.empty()) throw ContractError("component table must be non-empty");
  for (auto v : outputs_) {
    if (v >= modulus) throw ContractError("table output out of range");
  }
}

ComponentTable ComponentTable::constant(std::size_t domain_size, std::uint32_t value,
                                        std::uint32_t modulus) {
  return ComponentTable(std::vector<std::uint32_t>(domain_size, value), modulus);
}

TableKind ComponentTable::classify() const {
  if (std::all_of(outputs_.begin(), outputs_.end(), [&](auto v) { return v == outputs_[0]; })) {
    return TableKind::kConstant;
  }
  if (outputs_.size() % modulus_ != 0) return TableKind::kNeither;
  std::vector<std::size_t> hits(modulus_, 0);
  for (auto v : outputs_) ++hits[v];
  const std::size_t expected = outputs_.size() / modulus_;
  return std::all_of(hits.begin(), hits.end(), [&](auto h) { return h == expected; })
             ? TableKind::kBalanced
             : TableKind::kNeither;
}

ComponentTable ComponentTable::with_entry(std::size_t input_index, std::uint32_t value) const {
  auto out = outputs_;
  out.at(input_index) = value;
  return ComponentTable(std::move(out), modulus_);
}

DecomposableCode::DecomposableCode(CodeParams params, std::vector<std::vector<QueryEntry>> queries,
                                   std::vector<std::string> keys,
                                   std::vector<std::size_t> query_map,
                                   std::vector<std::vector<DecodeRow>> decoder)
    : params_(params),
      queries_(std::move(queries)),
      keys_(std::move(keys)),
      query_map_(std::move(query_map)),
      decoder_(std::move(decoder)) {
  params_.validate();
  const auto dom = checked_pow(params_.msg_modulus, params_.msg_len);
  if (dom > (std::uint64_t{1} << 26)) {
    throw UnsupportedError("component tables with m^L > 2^26 entries are not supported");
  }
  domain_size_ = static_cast<std::size_t>(dom);
  validate();
}

void DecomposableCode::validate() const {
  const std::size_t N = params_.n_servers;
  const std::size_t K = params_.n_messages;
  const std::size_t F = keys_.size();
  if (queries_.size() != N) throw ContractError("need one query set per server");
  if (F == 0) throw ContractError("key space must be non-empty");
  for (std::size_t n = 0; n < N; ++n) {
    if (queries_[n].empty()) throw ContractError("empty query set at server " + std::to_string(n));
    for (const auto& e : queries_[n]) {
      if (e.grid.size() != e.length * K) {
        throw ContractError("query " + e.label + " at server " + std::to_string(n) +
                            " needs " + std::to_string(e.length * K) + " component tables");
      }
      for (const auto& t : e.grid) {
        if (t.domain_size() != domain_size_) throw ContractError("component table has wrong domain");
        if (t.modulus() != params_.ans_modulus) throw ContractError("component table modulus != y");
      }
    }
  }
  if (query_map_.size() != K * F * N) throw ContractError("query map has wrong size");
  for (std::size_t i = 0; i < query_map_.size(); ++i) {
    if (query_map_[i] >= queries_[i % N].size()) throw ContractError("query map out of range");
  }
  if (decoder_.size() != K * F) throw ContractError("decoder has wrong size");
  if (params_.ans_modulus != params_.msg_modulus) {
    throw UnsupportedError("linear decoding requires answer modulus == message modulus");
  }
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t f = 0; f < F; ++f) {
      const auto& rows = decoder_[k * F + f];
      if (rows.size() != params_.msg_len) throw ContractError("decoder needs L rows");
      for (const auto& row : rows) {
        for (const auto& t : row) {
          if (t.server >= N) throw ContractError("decoder term references unknown server");
          const auto& e = queries_[t.server][query_map_[(k * F + f) * N + t.server]];
          if (t.index >= e.length) {
            throw ContractError("decoder term references answer symbol beyond answer length");
          }
          if (t.coeff >= params_.msg_modulus) throw ContractError("decoder coefficient out of range");
        }
      }
    }
  }
}

std::optional<std::size_t> DecomposableCode::find_query(std::size_t n, std::string_view label) const {
  const auto& qs = queries_.at(n);
  for (std::size_t q = 0; q < qs.size(); ++q) {
    if (qs[q].label == label) return q;
  }
  return std::nullopt;
}

std::size_t DecomposableCode::query_index(std::size_t n, std::size_t k, std::size_t f) const {
  if (n >= n_servers() || k >= n_messages() || f >= key_count()) {
    throw ContractError("query_index: index out of range");
  }
  return query_map_[(k * key_count() + f) * n_servers() + n];
}

std::vector<std::size_t> DecomposableCode::query_tuple(std::size_t k, std::size_t f) const {
  std::vector<std::size_t> t(n_servers());
  for (std::size_t n = 0; n < n_servers(); ++n) t[n] = query_index(n, k, f);
  return t;
}

std::span<const DecodeRow> DecomposableCode::decode_rows(std::size_t k, std::size_t f) const {
  if (k >= n_messages() || f >= key_count()) throw ContractError("decode_rows: index out of range");
  return decoder_[k * key_count() + f];
}

DecomposableCode DecomposableCode::with_table_entry(std::size_t n, std::size_t q, std::size_t i,
                                                    std::size_t k, std::size_t input_index,
                                                    std::uint32_t value) const {
  DecomposableCode copy = *this;
  auto& e = copy.queries_.at(n).at(q);
  if (i >= e.length || k >= n_messages()) throw ContractError("with_table_entry: index out of range");
  auto& t = e.grid[i * n_messages() + k];
  t = t.with_entry(input_index, value);
  return copy;
}

std::size_t word_index(std::span<const std::uint32_t> word, std::uint32_t modulus) {
  std::size_t idx = 0;
  for (auto w : word) idx = idx * modulus + w;
  return idx;
}

std::vector<std::uint32_t> word_at(std::size_t index, std::size_t length, std::uint32_t modulus) {
  std::vector<std::uint32_t> w(length);
  for (std::size_t j = length; j-- > 0;) {
    w[j] = static_cast<std::uint32_t>(index % modulus);
    index /= modulus;
  }
  return w;
}

AnswerVector eval_answer(const DecomposableCode& code, std::size_t n, std::size_t q,
                         const MessageSet& msgs) {
  const auto& p = code.params();
  msgs.check_dimensions(p);
  if (n >= code.n_servers() || q >= code.query_count(n)) {
    throw ContractError("eval_answer: unknown query");
  }
  const auto& e = code.query(n, q);
  std::vector<std::size_t> idx(code.n_messages());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = word_index(msgs[k].values(), p.msg_modulus);
  std::vector<std::uint32_t> out(e.length, 0);
  for (std::size_t i = 0; i < e.length; ++i) {
    std::uint64_t s = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) s += e.component(i, k, idx.size())(idx[k]);
    out[i] = static_cast<std::uint32_t>(s % p.ans_modulus);
  }
  return AnswerVector(std::move(out), p.ans_modulus);
}

Message decode(const DecomposableCode& code, std::size_t k, std::size_t f,
               std::span<const AnswerVector> answers) {
  const auto& p = code.params();
  if (answers.size() != code.n_servers()) throw ContractError("decode: need one answer per server");
  for (std::size_t n = 0; n < answers.size(); ++n) {
    const auto& e = code.query(n, code.query_index(n, k, f));
    if (answers[n].size() != e.length) {
      throw ContractError("decode: answer " + std::to_string(n) + " has length " +
                          std::to_string(answers[n].size()) + ", expected " +
                          std::to_string(e.length));
    }
  }
  std::vector<std::uint32_t> out;
  for (const auto& row : code.decode_rows(k, f)) {
    std::uint64_t s = 0;
    for (const auto& t : row) s += std::uint64_t{t.coeff} * answers[t.server].values()[t.index];
    out.push_back(static_cast<std::uint32_t>(s % p.msg_modulus));
  }
  return Message(std::move(out), p.msg_modulus);
}

UniformityReport is_uniformly_decomposable(const DecomposableCode& code) {
  UniformityReport r;
  const std::size_t K = code.n_messages();
  for (std::size_t n = 0; n < code.n_servers(); ++n) {
    for (std::size_t q = 0; q < code.query_count(n); ++q) {
      const auto& e = code.query(n, q);
      for (std::size_t i = 0; i < e.length; ++i) {
        for (std::size_t k = 0; k < K; ++k) {
          const auto kind = e.component(i, k, K).classify();
          if (kind == TableKind::kConstant) {
            ++r.constant_tables;
          } else if (kind == TableKind::kBalanced) {
            ++r.balanced_tables;
          } else {
            r.uniformly_decomposable = false;
            r.offenders.push_back({n, q, i, k, kind});
          }
        }
      }
    }
  }
  return r;
}

QueryPmf query_pmf(const DecomposableCode& code, std::size_t n, std::size_t k) {
  if (n >= code.n_servers() || k >= code.n_messages()) throw ContractError("query_pmf: out of range");
  std::vector<std::size_t> counts(code.query_count(n), 0);
  for (std::size_t f = 0; f < code.key_count(); ++f) ++counts[code.query_index(n, k, f)];
  QueryPmf pmf;
  pmf.probability.reserve(counts.size());
  for (auto c : counts) pmf.probability.emplace_back(Rational(c, code.key_count()));
  return pmf;
}

Rational expected_length(const DecomposableCode& code, std::size_t n, std::size_t k) {
  const auto pmf = query_pmf(code, n, k);
  Rational e = 0;
  for (std::size_t q = 0; q < pmf.probability.size(); ++q) {
    e += pmf.probability[q] * static_cast<long long>(code.query(n, q).length);
  }
  return e;
}

}  // namespace pirlab::model
