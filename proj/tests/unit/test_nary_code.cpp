#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "pirlab/code_model.hpp"
#include "pirlab/nary_code.hpp"

namespace pirlab::nary {
namespace {

// Rows of the (3,3) query/answer table: query digits and the symbolic answer,
// one column per server, rows sharing the first two digits.
struct Cell {
  const char* query;
  const char* answer;
};
constexpr Cell kTable33[9][3] = {
    {{"000", "0"}, {"001", "a0+b0+c1"}, {"002", "a0+b0+c2"}},
    {{"012", "a0+b1+c2"}, {"010", "a0+b1+c0"}, {"011", "a0+b1+c1"}},
    {{"021", "a0+b2+c1"}, {"022", "a0+b2+c2"}, {"020", "a0+b2+c0"}},
    {{"102", "a1+b0+c2"}, {"100", "a1+b0+c0"}, {"101", "a1+b0+c1"}},
    {{"111", "a1+b1+c1"}, {"112", "a1+b1+c2"}, {"110", "a1+b1+c0"}},
    {{"120", "a1+b2+c0"}, {"121", "a1+b2+c1"}, {"122", "a1+b2+c2"}},
    {{"201", "a2+b0+c1"}, {"202", "a2+b0+c2"}, {"200", "a2+b0+c0"}},
    {{"210", "a2+b1+c0"}, {"211", "a2+b1+c1"}, {"212", "a2+b1+c2"}},
    {{"222", "a2+b2+c2"}, {"220", "a2+b2+c0"}, {"221", "a2+b2+c1"}},
};

MessageSet messages(std::vector<std::vector<std::uint32_t>> v, std::uint32_t m) {
  std::vector<Message> out;
  for (auto& w : v) out.emplace_back(std::move(w), m);
  return MessageSet(std::move(out));
}

TEST(NaryCode, MakeValidates) {
  EXPECT_THROW(NaryCode::make(1, 2, 2), ContractError);
  EXPECT_THROW(NaryCode::make(2, 0, 2), ContractError);
  EXPECT_THROW(NaryCode::make(2, 2, 1), ContractError);
  const auto c = NaryCode::make(4, 3, 5);
  EXPECT_EQ(c.params(), (CodeParams{4, 3, 3, 5, 5}));
  EXPECT_EQ(c.query_set_size(), 16u);
}

TEST(NaryCode, AnswerTableForThreeServersThreeMessages) {
  const auto code = NaryCode::make(3, 3, 2);
  for (std::uint32_t n = 0; n < 3; ++n) {
    const auto qs = code.query_set(n);
    ASSERT_EQ(qs.size(), 9u);
    for (std::size_t r = 0; r < 9; ++r) {
      EXPECT_EQ(to_string(qs[r]), kTable33[r][n].query) << "server " << n << " row " << r;
      EXPECT_EQ(code.answer_label(n, qs[r]), kTable33[r][n].answer) << "server " << n << " row " << r;
    }
  }
}

TEST(NaryCode, WorkedRetrievalKey02) {
  const auto code = NaryCode::make(3, 3, 2);
  const RandomKey key({0, 2}, 3);
  EXPECT_EQ(code.interference_server(key), 2u);
  EXPECT_EQ(to_string(code.query_vector(0, 1, key)), "012");
  EXPECT_EQ(to_string(code.query_vector(1, 1, key)), "022");
  EXPECT_EQ(to_string(code.query_vector(2, 1, key)), "002");
  EXPECT_EQ(code.answer_label(0, code.query_vector(0, 1, key)), "a0+b1+c2");
  EXPECT_EQ(code.answer_label(1, code.query_vector(1, 1, key)), "a0+b2+c2");
  EXPECT_EQ(code.answer_label(2, code.query_vector(2, 1, key)), "a0+b0+c2");

  // Every message realization: A_0 = b1+c2, A_1 = b2+c2, A_2 = c2, W_1 recovered.
  for (std::uint32_t r = 0; r < 64; ++r) {
    auto bit = [&](int i) { return (r >> i) & 1u; };
    const auto msgs = messages({{bit(0), bit(1)}, {bit(2), bit(3)}, {bit(4), bit(5)}}, 2);
    const std::uint32_t b1 = bit(2), b2 = bit(3), c2 = bit(5);
    EXPECT_EQ(code.answer(0, code.query_vector(0, 1, key), msgs), AnswerVector({b1 ^ c2}, 2));
    EXPECT_EQ(code.answer(1, code.query_vector(1, 1, key), msgs), AnswerVector({b2 ^ c2}, 2));
    EXPECT_EQ(code.answer(2, code.query_vector(2, 1, key), msgs), AnswerVector({c2}, 2));
    EXPECT_EQ(code.retrieve(msgs, 1, key), Message({b1, b2}, 2));
  }
}

TEST(NaryCode, QuerySetsPartitionByDigitSum) {
  for (std::uint32_t N : {2u, 3u, 4u}) {
    for (std::uint32_t K : {1u, 2u, 3u}) {
      const auto code = NaryCode::make(N, K, 2);
      std::uint64_t expected_size = 1;
      for (std::uint32_t k = 1; k < K; ++k) expected_size *= N;
      std::set<std::vector<std::uint32_t>> all;
      for (std::uint32_t n = 0; n < N; ++n) {
        const auto qs = code.query_set(n);
        EXPECT_EQ(qs.size(), expected_size);
        for (std::size_t i = 0; i < qs.size(); ++i) {
          EXPECT_EQ(qs[i].digit_sum(), n);
          EXPECT_EQ(code.query_index(qs[i]), i);
          EXPECT_EQ(code.query_at(n, i), qs[i]);
          all.emplace(qs[i].digits().begin(), qs[i].digits().end());
        }
      }
      std::uint64_t total = 1;
      for (std::uint32_t k = 0; k < K; ++k) total *= N;
      EXPECT_EQ(all.size(), total) << "query sets must partition {0..N-1}^K";
    }
  }
}

TEST(NaryCode, KeysRoundTrip) {
  const auto code = NaryCode::make(3, 4, 2);
  EXPECT_EQ(code.key_count(), 27u);
  for (std::uint64_t f = 0; f < code.key_count(); ++f) {
    const auto key = code.key_at(f);
    EXPECT_EQ(key.digits().size(), 3u);
    EXPECT_EQ(code.key_index(key), f);
  }
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) EXPECT_LT(code.key_index(code.sample_key(rng)), 27u);
}

TEST(NaryCode, SingleMessageHasEmptyKey) {
  const auto code = NaryCode::make(3, 1, 2);
  EXPECT_EQ(code.key_count(), 1u);
  const RandomKey key({}, 3);
  const auto msgs = messages({{1, 1}}, 2);
  EXPECT_EQ(code.retrieve(msgs, 0, key), msgs[0]);
  EXPECT_EQ(code.answer_length(0, code.query_vector(0, 0, key)), 0u);
}

TEST(NaryCode, AnswerMatchesDefinitionOracle) {
  std::mt19937_64 rng(11);
  for (std::uint32_t N : {2u, 3u, 4u}) {
    for (std::uint32_t K : {1u, 2u, 3u}) {
      for (std::uint32_t m : {2u, 3u, 5u}) {
        const auto code = NaryCode::make(N, K, m);
        const auto msgs = random_messages(code.params(), rng);
        std::vector<std::vector<std::uint32_t>> raw;
        for (const auto& w : msgs) raw.emplace_back(w.values().begin(), w.values().end());
        for (std::uint32_t n = 0; n < N; ++n) {
          for (const auto& q : code.query_set(n)) {
            const std::vector<std::uint32_t> d(q.digits().begin(), q.digits().end());
            const auto a = code.answer(n, q, msgs);
            const auto expect = oracle::nary_answer(m, n, d, raw);
            EXPECT_EQ(std::vector<std::uint32_t>(a.values().begin(), a.values().end()), expect);
            EXPECT_EQ(code.answer_length(n, q), expect.size());
          }
        }
      }
    }
  }
}

TEST(NaryCode, QueryVectorMatchesDefinitionOracle) {
  for (std::uint32_t N : {2u, 3u, 4u}) {
    for (std::uint32_t K : {1u, 2u, 3u}) {
      const auto code = NaryCode::make(N, K, 2);
      for (std::uint64_t f = 0; f < code.key_count(); ++f) {
        const auto key = code.key_at(f);
        const std::vector<std::uint32_t> kd(key.digits().begin(), key.digits().end());
        for (std::uint32_t k = 0; k < K; ++k) {
          for (std::uint32_t n = 0; n < N; ++n) {
            const auto q = code.query_vector(n, k, key);
            EXPECT_EQ(std::vector<std::uint32_t>(q.digits().begin(), q.digits().end()),
                      oracle::nary_query(N, K, n, k, kd));
          }
        }
      }
    }
  }
}

TEST(NaryCode, RetrieveAllKeysAndTargets) {
  std::mt19937_64 rng(3);
  for (std::uint32_t N : {2u, 3u, 4u}) {
    for (std::uint32_t K : {1u, 2u, 3u}) {
      const auto code = NaryCode::make(N, K, 3);
      for (int trial = 0; trial < 5; ++trial) {
        const auto msgs = random_messages(code.params(), rng);
        for (std::uint64_t f = 0; f < code.key_count(); ++f) {
          for (std::uint32_t k = 0; k < K; ++k) EXPECT_EQ(code.retrieve(msgs, k, code.key_at(f)), msgs[k]);
        }
      }
    }
  }
}

TEST(NaryCode, OnlyServerZeroAllZeroQueryIsEmpty) {
  const auto code = NaryCode::make(3, 3, 2);
  for (std::uint32_t n = 0; n < 3; ++n) {
    for (const auto& q : code.query_set(n)) EXPECT_EQ(code.answer_length(n, q), (n == 0 && q.is_zero()) ? 0u : 1u);
  }
}

TEST(NaryCode, ReconstructRejectsBadAnswers) {
  const auto code = NaryCode::make(2, 2, 2);
  const RandomKey key({1}, 2);
  std::vector<AnswerVector> one{AnswerVector({1}, 2)};
  EXPECT_THROW(code.reconstruct(one, 0, key), ContractError);
  std::vector<AnswerVector> wrong_len{AnswerVector(2), AnswerVector(2)};
  EXPECT_THROW(code.reconstruct(wrong_len, 0, key), ContractError);
  EXPECT_THROW(code.query_vector(2, 0, key), ContractError);
  EXPECT_THROW(code.query_vector(0, 2, key), ContractError);
}

TEST(NaryCode, ExportMatchesDirectEvaluation) {
  std::mt19937_64 rng(5);
  for (auto [N, K, m] : {std::tuple{2u, 2u, 2u}, {3u, 3u, 2u}, {4u, 2u, 3u}, {2u, 3u, 3u}}) {
    const auto code = NaryCode::make(N, K, m);
    const auto dc = code.export_decomposable();
    ASSERT_EQ(dc.key_count(), code.key_count());
    for (int t = 0; t < 3; ++t) {
      const auto msgs = random_messages(code.params(), rng);
      for (std::uint32_t n = 0; n < N; ++n) {
        ASSERT_EQ(dc.query_count(n), code.query_set_size());
        for (std::uint64_t i = 0; i < code.query_set_size(); ++i) {
          const auto q = code.query_at(n, i);
          EXPECT_EQ(model::eval_answer(dc, n, i, msgs), code.answer(n, q, msgs));
          EXPECT_EQ(dc.query(n, i).label, to_string(q));
        }
      }
      for (std::uint64_t f = 0; f < code.key_count(); ++f) {
        for (std::uint32_t k = 0; k < K; ++k) {
          for (std::uint32_t n = 0; n < N; ++n) {
            EXPECT_EQ(dc.query_index(n, k, f), code.query_index(code.query_vector(n, k, code.key_at(f))));
          }
        }
      }
    }
  }
}

TEST(PaddedMessage, PrependsZero) {
  const auto p = PaddedMessage::from(Message({1, 2}, 3));
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[0], Symbol(0, 3));
  EXPECT_EQ(p[2], Symbol(2, 3));
  EXPECT_EQ(message_letter(0), "a");
  EXPECT_EQ(message_letter(25), "z");
  EXPECT_EQ(message_letter(26), "m26");
}

}  // namespace
}  // namespace pirlab::nary
