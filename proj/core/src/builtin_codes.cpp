#include <algorithm>
#include <array>
#include <map>
#include <numeric>

#include "pirlab/code_model.hpp"

namespace pirlab::model {
namespace {

// Table returning coordinate j of the message word.
ComponentTable projection(std::size_t length, std::size_t j, std::uint32_t modulus) {
  const auto dom = static_cast<std::size_t>(checked_pow(modulus, length));
  std::vector<std::uint32_t> out(dom);
  for (std::size_t w = 0; w < dom; ++w) out[w] = word_at(w, length, modulus)[j];
  return ComponentTable(std::move(out), modulus);
}

}  // namespace

DecomposableCode builtin_table1(std::uint32_t modulus) {
  const CodeParams p{2, 2, 1, modulus, modulus};
  const auto id = projection(1, 0, modulus);
  const auto zero = ComponentTable::constant(modulus, 0, modulus);
  const std::uint32_t minus = modulus - 1;

  std::vector<std::vector<QueryEntry>> queries(2);
  queries[0].push_back({"0", 0, {}});
  queries[0].push_back({"a+b", 1, {id, id}});
  queries[1].push_back({"a", 1, {id, zero}});
  queries[1].push_back({"b", 1, {zero, id}});

  // ((k * |F|) + f) * N + n
  std::vector<std::size_t> qmap = {
      0, 0,  // A, F=0: nothing, a
      1, 1,  // A, F=1: a+b, b
      0, 1,  // B, F=0: nothing, b
      1, 0,  // B, F=1: a+b, a
  };
  std::vector<std::vector<DecodeRow>> dec = {
      {{{1, 0, 1}}},
      {{{0, 0, 1}, {1, 0, minus}}},
      {{{1, 0, 1}}},
      {{{0, 0, 1}, {1, 0, minus}}},
  };
  return DecomposableCode(p, std::move(queries), {"0", "1"}, std::move(qmap), std::move(dec));
}

DecomposableCode builtin_sunjafar22(std::uint32_t modulus) {
  constexpr std::size_t L = 4;
  const CodeParams p{2, 2, L, modulus, modulus};
  const std::uint32_t minus = modulus - 1;

  std::array<ComponentTable, L> proj = {projection(L, 0, modulus), projection(L, 1, modulus),
                                        projection(L, 2, modulus), projection(L, 3, modulus)};

  // Queries at either server: ordered triples (x, y, z) of distinct positions,
  // answering (a_x, b_x, a_y + b_z).
  using Triple = std::array<std::size_t, 3>;
  std::vector<Triple> triples;
  {
    std::array<std::size_t, L> perm = {0, 1, 2, 3};
    do {
      Triple t = {perm[0], perm[1], perm[2]};
      if (std::find(triples.begin(), triples.end(), t) == triples.end()) triples.push_back(t);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  std::map<Triple, std::size_t> triple_index;
  std::vector<QueryEntry> entries;
  for (const auto& t : triples) {
    const auto zero = ComponentTable::constant(proj[0].domain_size(), 0, modulus);
    QueryEntry e;
    e.label = "a" + std::to_string(t[0] + 1) + ",b" + std::to_string(t[0] + 1) + ",a" +
              std::to_string(t[1] + 1) + "+b" + std::to_string(t[2] + 1);
    e.length = 3;
    e.grid = {proj[t[0]], zero, zero, proj[t[0]], proj[t[1]], proj[t[2]]};
    triple_index[t] = entries.size();
    entries.push_back(std::move(e));
  }
  std::vector<std::vector<QueryEntry>> queries = {entries, entries};

  // Keys: (square, diamond, club, heart) -> positions, lexicographic.
  std::vector<std::array<std::size_t, L>> keys;
  {
    std::array<std::size_t, L> perm = {0, 1, 2, 3};
    do keys.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));
  }
  std::vector<std::string> labels;
  for (const auto& key : keys) {
    std::string s = "pi=";
    for (auto v : key) s += std::to_string(v + 1);
    labels.push_back(s);
  }

  const std::size_t F = keys.size();
  std::vector<std::size_t> qmap(2 * F * 2);
  std::vector<std::vector<DecodeRow>> dec(2 * F);
  for (std::size_t f = 0; f < F; ++f) {
    const auto [sq, di, cl, he] = keys[f];
    // Requesting A: server 0 (a_sq, b_sq, a_cl + b_di), server 1 (a_di, b_di, a_he + b_sq).
    qmap[(0 * F + f) * 2 + 0] = triple_index.at({sq, cl, di});
    qmap[(0 * F + f) * 2 + 1] = triple_index.at({di, he, sq});
    // Requesting B: server 0 (a_sq, b_sq, a_di + b_cl), server 1 (a_di, b_di, a_sq + b_he).
    qmap[(1 * F + f) * 2 + 0] = triple_index.at({sq, di, cl});
    qmap[(1 * F + f) * 2 + 1] = triple_index.at({di, sq, he});

    std::vector<DecodeRow> rows_a(L), rows_b(L);
    rows_a[sq] = {{0, 0, 1}};
    rows_a[di] = {{1, 0, 1}};
    rows_a[cl] = {{0, 2, 1}, {1, 1, minus}};
    rows_a[he] = {{1, 2, 1}, {0, 1, minus}};
    rows_b[sq] = {{0, 1, 1}};
    rows_b[di] = {{1, 1, 1}};
    rows_b[cl] = {{0, 2, 1}, {1, 0, minus}};
    rows_b[he] = {{1, 2, 1}, {0, 0, minus}};
    dec[0 * F + f] = std::move(rows_a);
    dec[1 * F + f] = std::move(rows_b);
  }
  return DecomposableCode(p, std::move(queries), std::move(labels), std::move(qmap), std::move(dec));
}

}  // namespace pirlab::model
