#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pirlab/analysis.hpp"
#include "pirlab/code_model.hpp"
#include "pirlab/nary_code.hpp"

namespace pirlab::model {
namespace {

std::vector<std::string> symbolic_answer(const DecomposableCode& c, std::size_t n, std::size_t q, bool idx) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < c.query(n, q).length; ++i) out.push_back(oracle::symbolic_row(c, n, q, i, idx));
  return out;
}

TEST(ComponentTable, Classify) {
  EXPECT_EQ(ComponentTable({1, 1, 1, 1}, 2).classify(), TableKind::kConstant);
  EXPECT_EQ(ComponentTable({0, 1, 1, 0}, 2).classify(), TableKind::kBalanced);
  EXPECT_EQ(ComponentTable({0, 1, 1, 1}, 2).classify(), TableKind::kNeither);
  EXPECT_EQ(ComponentTable({0, 1, 2}, 3).classify(), TableKind::kBalanced);
  EXPECT_THROW(ComponentTable({0, 2}, 2), ContractError);
  EXPECT_EQ(ComponentTable({0, 1}, 2).with_entry(1, 0), ComponentTable({0, 0}, 2));
}

TEST(Words, IndexRoundTrip) {
  for (std::size_t idx = 0; idx < 27; ++idx) {
    const auto w = word_at(idx, 3, 3);
    EXPECT_EQ(word_index(w, 3), idx);
  }
  EXPECT_EQ(word_at(5, 3, 2), (std::vector<std::uint32_t>{1, 0, 1}));
}

TEST(Table1, MatchesReferenceRows) {
  const auto c = builtin_table1();
  // [request][key] -> (server 0, server 1)
  const std::pair<const char*, const char*> rows[2][2] = {
      {{"0", "a"}, {"a+b", "b"}},
      {{"0", "b"}, {"a+b", "a"}},
  };
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t f = 0; f < 2; ++f) {
      const auto t = c.query_tuple(k, f);
      const auto s0 = symbolic_answer(c, 0, t[0], false);
      const auto s1 = symbolic_answer(c, 1, t[1], false);
      EXPECT_EQ(s0.empty() ? "0" : s0.front(), std::string(rows[k][f].first));
      ASSERT_EQ(s1.size(), 1u);
      EXPECT_EQ(s1.front(), std::string(rows[k][f].second));
    }
  }
  EXPECT_EQ(analysis::rate(c), Rational(2, 3));
}

TEST(Table2, MatchesReferenceRowsForEveryKey) {
  const auto c = builtin_sunjafar22();
  ASSERT_EQ(c.key_count(), 24u);
  for (std::size_t f = 0; f < 24; ++f) {
    const std::string label = c.key_label(f);
    ASSERT_EQ(label.size(), 7u);
    const std::string sq(1, label[3]), di(1, label[4]), cl(1, label[5]), he(1, label[6]);
    const auto a = c.query_tuple(0, f);
    const auto b = c.query_tuple(1, f);
    EXPECT_EQ(symbolic_answer(c, 0, a[0], true), (std::vector<std::string>{"a" + sq, "b" + sq, "a" + cl + "+b" + di}));
    EXPECT_EQ(symbolic_answer(c, 1, a[1], true), (std::vector<std::string>{"a" + di, "b" + di, "a" + he + "+b" + sq}));
    EXPECT_EQ(symbolic_answer(c, 0, b[0], true), (std::vector<std::string>{"a" + sq, "b" + sq, "a" + di + "+b" + cl}));
    EXPECT_EQ(symbolic_answer(c, 1, b[1], true), (std::vector<std::string>{"a" + di, "b" + di, "a" + sq + "+b" + he}));
  }
  EXPECT_EQ(analysis::expected_download(c), Rational(6));
  EXPECT_EQ(analysis::rate(c), Rational(2, 3));
}

TEST(DecomposableCode, UniformDecomposability) {
  for (const auto& c : {builtin_table1(), builtin_sunjafar22(), nary::NaryCode::make(3, 3, 2).export_decomposable()}) {
    const auto r = is_uniformly_decomposable(c);
    EXPECT_TRUE(r.uniformly_decomposable);
    EXPECT_TRUE(r.offenders.empty());
    EXPECT_GT(r.balanced_tables, 0u);
  }
  const auto mutated = builtin_table1().with_table_entry(1, 0, 0, 0, 0, 1);  // "a" table becomes constant 1
  EXPECT_TRUE(is_uniformly_decomposable(mutated).uniformly_decomposable);
  const auto bad = nary::NaryCode::make(3, 2, 2).export_decomposable().with_table_entry(1, 0, 0, 1, 0, 1);
  const auto r = is_uniformly_decomposable(bad);
  EXPECT_FALSE(r.uniformly_decomposable);
  ASSERT_EQ(r.offenders.size(), 1u);
  EXPECT_EQ(r.offenders[0].server, 1u);
  EXPECT_EQ(r.offenders[0].message, 1u);
}

TEST(DecomposableCode, QueryPmfAndExpectedLength) {
  const auto c = builtin_table1();
  for (std::size_t n = 0; n < 2; ++n) {
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_EQ(query_pmf(c, n, k).probability, (std::vector<Rational>{Rational(1, 2), Rational(1, 2)}));
    }
  }
  EXPECT_EQ(expected_length(c, 0, 0), Rational(1, 2));
  EXPECT_EQ(expected_length(c, 1, 1), Rational(1));
  const auto n33 = nary::NaryCode::make(3, 3, 2).export_decomposable();
  EXPECT_EQ(expected_length(n33, 0, 2), Rational(8, 9));
  EXPECT_EQ(expected_length(n33, 2, 0), Rational(1));
}

TEST(DecomposableCode, ValidationErrors) {
  const CodeParams p{2, 1, 1, 2, 2};
  const auto id = ComponentTable({0, 1}, 2);
  std::vector<std::vector<QueryEntry>> q = {{{"a", 1, {id}}}, {{"0", 0, {}}}};
  std::vector<std::vector<DecodeRow>> dec = {{{{0, 0, 1}}}};
  EXPECT_NO_THROW(DecomposableCode(p, q, {"f"}, {0, 0}, dec));
  EXPECT_THROW(DecomposableCode(p, q, {"f"}, {0, 1}, dec), ContractError);           // query index out of range
  EXPECT_THROW(DecomposableCode(p, q, {"f"}, {0}, dec), ContractError);              // short query map
  std::vector<std::vector<DecodeRow>> bad_dec = {{{{1, 0, 1}}}};                     // server 1 sends nothing
  EXPECT_THROW(DecomposableCode(p, q, {"f"}, {0, 0}, bad_dec), ContractError);
  auto q2 = q;
  q2[0][0].grid = {ComponentTable({0, 1, 0}, 2)};
  EXPECT_THROW(DecomposableCode(p, q2, {"f"}, {0, 0}, dec), ContractError);        // wrong domain
  CodeParams py = p;
  py.ans_modulus = 3;
  std::vector<std::vector<QueryEntry>> q3 = {{{"a", 1, {ComponentTable({0, 1}, 3)}}}, {{"0", 0, {}}}};
  EXPECT_THROW(DecomposableCode(py, q3, {"f"}, {0, 0}, dec), UnsupportedError);
}

TEST(DecomposableCode, DecodeChecksAnswerShape) {
  const auto c = builtin_table1();
  std::vector<AnswerVector> answers{AnswerVector({1}, 2), AnswerVector({1}, 2)};
  EXPECT_THROW(decode(c, 0, 0, answers), ContractError);  // key 0 expects nothing from server 0
  answers[0] = AnswerVector(2);
  EXPECT_EQ(decode(c, 0, 0, answers), Message({1}, 2));
  std::vector<AnswerVector> one{AnswerVector(2)};
  EXPECT_THROW(decode(c, 0, 0, one), ContractError);
}

TEST(DecomposableCode, FindQueryAndEquality) {
  const auto c = builtin_table1();
  EXPECT_EQ(c.find_query(0, "a+b"), std::optional<std::size_t>(1));
  EXPECT_FALSE(c.find_query(1, "a+b").has_value());
  EXPECT_EQ(c, builtin_table1());
  EXPECT_NE(c, builtin_table1(3));
  EXPECT_NE(c, c.with_table_entry(0, 1, 0, 0, 1, 0));
}

}  // namespace
}  // namespace pirlab::model
