#include "pirlab/symmetrize.hpp"

#include <map>
#include <sstream>

namespace pirlab::sym {
namespace {

using model::ComponentTable;
using model::DecodeRow;
using model::DecodeTerm;
using model::QueryEntry;

std::string join(std::span<const std::string> parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string join_indices(std::span<const std::size_t> v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

void check_cap(std::uint64_t required, std::uint64_t cap) {
  if (required > cap) throw CapExceededError(required, cap);
}

// Mixed-radix counter over `radices`, first position most significant.
std::vector<std::vector<std::size_t>> cartesian(std::span<const std::size_t> radices, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (auto r : radices) total = checked_mul(total, r);
  check_cap(total, cap);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(total);
  std::vector<std::size_t> cur(radices.size(), 0);
  for (std::uint64_t t = 0; t < total; ++t) {
    out.push_back(cur);
    for (std::size_t i = cur.size(); i-- > 0;) {
      if (++cur[i] < radices[i]) break;
      cur[i] = 0;
    }
  }
  return out;
}

// The space-sharing product of `blocks`. server_tuples[n] lists the combined
// queries of server n as per-block query indices; key_tuples[f] gives the base
// key used by each block under combined key f.
DecomposableCode build_product(std::span<const DecomposableCode* const> blocks,
                               const std::vector<std::vector<std::vector<std::size_t>>>& server_tuples,
                               const std::vector<std::vector<std::size_t>>& key_tuples,
                               std::vector<std::string> key_labels, std::uint64_t cap) {
  const auto& p0 = blocks.front()->params();
  const std::size_t N = p0.n_servers;
  const std::size_t K = p0.n_messages;
  const std::size_t B = blocks.size();

  CodeParams params = p0;
  params.msg_len = 0;
  std::vector<std::size_t> offset(B);
  for (std::size_t b = 0; b < B; ++b) {
    offset[b] = params.msg_len;
    params.msg_len += blocks[b]->params().msg_len;
  }
  const std::uint64_t domain = checked_pow(params.msg_modulus, params.msg_len);
  check_cap(domain, cap);
  check_cap(checked_mul(checked_mul(key_tuples.size(), K), N), cap);

  std::uint64_t entries = 0;
  for (std::size_t n = 0; n < N; ++n) {
    for (const auto& t : server_tuples[n]) {
      std::uint64_t len = 0;
      for (std::size_t b = 0; b < B; ++b) len += blocks[b]->query(n, t[b]).length;
      entries = checked_mul(len, K) > UINT64_MAX - entries ? UINT64_MAX : entries + len * K;
    }
  }
  check_cap(checked_mul(entries, domain), cap);

  // Index of block b's sub-word inside every combined word.
  std::vector<std::vector<std::size_t>> sub(B, std::vector<std::size_t>(domain));
  for (std::size_t b = 0; b < B; ++b) {
    const std::uint64_t stride = checked_pow(params.msg_modulus, params.msg_len - offset[b] - blocks[b]->params().msg_len);
    const std::size_t dom_b = blocks[b]->domain_size();
    for (std::size_t idx = 0; idx < domain; ++idx) sub[b][idx] = (idx / stride) % dom_b;
  }

  std::vector<std::vector<QueryEntry>> queries(N);
  std::vector<std::map<std::vector<std::size_t>, std::size_t>> lookup(N);
  std::vector<std::uint32_t> buf(domain);
  for (std::size_t n = 0; n < N; ++n) {
    for (const auto& t : server_tuples[n]) {
      QueryEntry e;
      std::vector<std::string> labels;
      for (std::size_t b = 0; b < B; ++b) {
        const QueryEntry& base = blocks[b]->query(n, t[b]);
        labels.push_back(base.label);
        e.length += base.length;
      }
      e.label = join(labels, '|');
      e.grid.reserve(e.length * K);
      for (std::size_t b = 0; b < B; ++b) {
        const QueryEntry& base = blocks[b]->query(n, t[b]);
        for (std::size_t i = 0; i < base.length; ++i) {
          for (std::size_t k = 0; k < K; ++k) {
            const ComponentTable& tab = base.component(i, k, K);
            for (std::size_t idx = 0; idx < domain; ++idx) buf[idx] = tab(sub[b][idx]);
            e.grid.emplace_back(buf, params.ans_modulus);
          }
        }
      }
      if (!lookup[n].emplace(t, queries[n].size()).second) {
        throw ContractError("duplicate combined query at server " + std::to_string(n));
      }
      queries[n].push_back(std::move(e));
    }
  }

  const std::size_t F = key_tuples.size();
  std::vector<std::size_t> qmap(K * F * N);
  std::vector<std::vector<DecodeRow>> decoder(K * F);
  std::vector<std::size_t> t(B);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t f = 0; f < F; ++f) {
      const auto& kt = key_tuples[f];
      for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t b = 0; b < B; ++b) t[b] = blocks[b]->query_index(n, k, kt[b]);
        auto it = lookup[n].find(t);
        if (it == lookup[n].end()) {
          throw ContractError("key " + key_labels[f] + " reaches a query outside the query set of server " +
                              std::to_string(n));
        }
        qmap[(k * F + f) * N + n] = it->second;
      }
      // Answer symbols of block b start after the earlier blocks' symbols.
      std::vector<std::size_t> shift(N, 0);
      auto& rows = decoder[k * F + f];
      for (std::size_t b = 0; b < B; ++b) {
        for (const auto& row : blocks[b]->decode_rows(k, kt[b])) {
          DecodeRow r;
          for (const auto& term : row) r.push_back(DecodeTerm{term.server, term.index + shift[term.server], term.coeff});
          rows.push_back(std::move(r));
        }
        for (std::size_t n = 0; n < N; ++n) shift[n] += blocks[b]->query(n, blocks[b]->query_index(n, k, kt[b])).length;
      }
    }
  }
  return DecomposableCode(params, std::move(queries), std::move(key_labels), std::move(qmap), std::move(decoder));
}

}  // namespace

DecomposableCode server_permute(const DecomposableCode& code, std::span<const std::size_t> perm) {
  const std::size_t N = code.n_servers();
  const std::size_t K = code.n_messages();
  const std::size_t F = code.key_count();
  if (perm.size() != N || !comb::is_permutation(perm)) throw ContractError("server_permute needs a permutation of the servers");
  const auto inv = comb::inverse_permutation(perm);

  std::vector<std::vector<QueryEntry>> queries(N);
  for (std::size_t n = 0; n < N; ++n) {
    auto src = code.queries(perm[n]);
    queries[n].assign(src.begin(), src.end());
  }
  std::vector<std::size_t> qmap(K * F * N);
  std::vector<std::vector<DecodeRow>> decoder(K * F);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t n = 0; n < N; ++n) qmap[(k * F + f) * N + n] = code.query_index(perm[n], k, f);
      for (const auto& row : code.decode_rows(k, f)) {
        DecodeRow r = row;
        for (auto& term : r) term.server = inv[term.server];
        decoder[k * F + f].push_back(std::move(r));
      }
    }
  }
  auto keys = code.keys();
  return DecomposableCode(code.params(), std::move(queries), {keys.begin(), keys.end()}, std::move(qmap),
                          std::move(decoder));
}

DecomposableCode message_permute(const DecomposableCode& code, std::span<const std::size_t> perm) {
  const std::size_t N = code.n_servers();
  const std::size_t K = code.n_messages();
  const std::size_t F = code.key_count();
  if (perm.size() != K || !comb::is_permutation(perm)) throw ContractError("message_permute needs a permutation of the messages");
  const auto inv = comb::inverse_permutation(perm);

  std::vector<std::vector<QueryEntry>> queries(N);
  for (std::size_t n = 0; n < N; ++n) {
    for (const auto& base : code.queries(n)) {
      QueryEntry e = base;
      for (std::size_t i = 0; i < base.length; ++i) {
        for (std::size_t j = 0; j < K; ++j) e.grid[i * K + perm[j]] = base.component(i, j, K);
      }
      queries[n].push_back(std::move(e));
    }
  }
  std::vector<std::size_t> qmap(K * F * N);
  std::vector<std::vector<DecodeRow>> decoder(K * F);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t n = 0; n < N; ++n) qmap[(k * F + f) * N + n] = code.query_index(n, inv[k], f);
      auto rows = code.decode_rows(inv[k], f);
      decoder[k * F + f].assign(rows.begin(), rows.end());
    }
  }
  auto keys = code.keys();
  return DecomposableCode(code.params(), std::move(queries), {keys.begin(), keys.end()}, std::move(qmap),
                          std::move(decoder));
}

SpaceShareCode space_share(std::vector<Block> blocks, std::uint64_t cap) {
  if (blocks.empty()) throw ContractError("space_share needs at least one block");
  const auto& p0 = blocks.front().code.params();
  for (const auto& b : blocks) {
    const auto& p = b.code.params();
    if (p.n_servers != p0.n_servers || p.n_messages != p0.n_messages || p.msg_modulus != p0.msg_modulus ||
        p.ans_modulus != p0.ans_modulus) {
      throw ContractError("space_share blocks disagree on (N, K, m, y): " + to_string(p0) + " vs " + to_string(p));
    }
  }
  std::vector<const DecomposableCode*> codes;
  for (const auto& b : blocks) codes.push_back(&b.code);

  std::vector<std::vector<std::vector<std::size_t>>> server_tuples(p0.n_servers);
  for (std::size_t n = 0; n < p0.n_servers; ++n) {
    std::vector<std::size_t> radices;
    for (auto* c : codes) radices.push_back(c->query_count(n));
    server_tuples[n] = cartesian(radices, cap);
  }
  std::vector<std::size_t> key_radices;
  for (auto* c : codes) key_radices.push_back(c->key_count());
  auto key_tuples = cartesian(key_radices, cap);
  std::vector<std::string> labels;
  for (const auto& kt : key_tuples) {
    std::vector<std::string> parts;
    for (std::size_t b = 0; b < codes.size(); ++b) parts.push_back(codes[b]->key_label(kt[b]));
    labels.push_back(join(parts, '|'));
  }
  auto combined = build_product(codes, server_tuples, key_tuples, std::move(labels), cap);
  return SpaceShareCode(std::move(blocks), std::move(combined));
}

SpaceShareCode space_share(std::span<const DecomposableCode> blocks, std::uint64_t cap) {
  std::vector<Block> b;
  for (const auto& c : blocks) b.push_back(Block{c, "identity"});
  return space_share(std::move(b), cap);
}

SpaceShareCode server_symmetrize(const DecomposableCode& code, std::uint64_t cap) {
  const std::size_t N = code.n_servers();
  std::vector<Block> blocks;
  for (std::size_t c = 0; c < N; ++c) {
    std::vector<std::size_t> shift(N);
    for (std::size_t n = 0; n < N; ++n) shift[n] = (n + c) % N;
    blocks.push_back(Block{server_permute(code, shift), "server-shift " + std::to_string(c)});
  }
  return space_share(std::move(blocks), cap);
}

SpaceShareCode message_symmetrize(const DecomposableCode& code, std::uint64_t cap) {
  std::vector<Block> blocks;
  for (const auto& perm : comb::permutations(code.n_messages(), cap)) {
    blocks.push_back(Block{message_permute(code, perm), "message-perm " + join_indices(perm)});
  }
  return space_share(std::move(blocks), cap);
}

std::vector<std::size_t> query_composition(const DecomposableCode& code, std::size_t n) {
  std::vector<std::size_t> base;
  for (std::size_t k = 0; k < code.n_messages(); ++k) {
    std::vector<std::size_t> kappa(code.query_count(n), 0);
    for (std::size_t f = 0; f < code.key_count(); ++f) ++kappa[code.query_index(n, k, f)];
    if (k == 0) {
      base = std::move(kappa);
    } else if (kappa != base) {
      throw ContractError("query composition at server " + std::to_string(n) + " depends on the request (k=" +
                          std::to_string(k) + "); the code is not private");
    }
  }
  return base;
}

DecomposableCode variety_symmetrize(const DecomposableCode& code, std::uint64_t cap) {
  const std::size_t N = code.n_servers();
  const std::size_t F = code.key_count();
  std::vector<std::vector<std::vector<std::size_t>>> server_tuples(N);
  for (std::size_t n = 0; n < N; ++n) {
    server_tuples[n] = comb::ConstantCompositionSet(query_composition(code, n)).enumerate(cap);
  }
  auto sigmas = comb::permutations(F, cap);
  std::vector<std::string> labels;
  for (const auto& s : sigmas) {
    std::vector<std::string> parts;
    for (auto f : s) parts.push_back(code.key_label(f));
    labels.push_back(join(parts, '|'));
  }
  std::vector<const DecomposableCode*> blocks(F, &code);
  return build_product(blocks, server_tuples, sigmas, std::move(labels), cap);
}

}  // namespace pirlab::sym
