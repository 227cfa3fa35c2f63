#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pirlab/analysis.hpp"
#include "pirlab/nary_code.hpp"

namespace pirlab::analysis {
namespace {

DecomposableCode nary_dc(std::uint32_t N, std::uint32_t K, std::uint32_t m = 2) {
  return nary::NaryCode::make(N, K, m).export_decomposable();
}

// table1 variant that always uses key 0's tuple (nothing, a) when requesting
// A. Correct, but server 0 sees a+b only when B is requested.
DecomposableCode biased_table1() {
  const auto c = model::builtin_table1();
  std::vector<std::vector<model::QueryEntry>> queries;
  for (std::size_t n = 0; n < c.n_servers(); ++n) queries.emplace_back(c.queries(n).begin(), c.queries(n).end());
  std::vector<std::vector<model::DecodeRow>> dec(c.raw_decoder().begin(), c.raw_decoder().end());
  dec[1] = dec[0];
  return DecomposableCode(c.params(), queries, {c.keys().begin(), c.keys().end()}, {0, 0, 0, 0, 0, 1, 1, 0},
                          std::move(dec));
}

TEST(Capacity, MatchesDirectSum) {
  EXPECT_EQ(capacity(2, 2), Rational(2, 3));
  EXPECT_EQ(capacity(3, 3), Rational(9, 13));
  for (std::uint32_t N = 2; N <= 7; ++N) {
    EXPECT_EQ(capacity(N, 1), Rational(1));
    for (std::uint32_t K = 1; K <= 6; ++K) EXPECT_EQ(capacity(N, K), oracle::capacity_by_sum(N, K)) << N << "," << K;
  }
  EXPECT_THROW(capacity(1, 2), ContractError);
  EXPECT_THROW(capacity(2, 0), ContractError);
}

TEST(Rate, NaryAchievesCapacity) {
  for (std::uint32_t N : {2u, 3u, 4u}) {
    for (std::uint32_t K : {1u, 2u, 3u}) EXPECT_EQ(rate(nary_dc(N, K)), capacity(N, K)) << N << "," << K;
  }
  EXPECT_EQ(expected_download(nary_dc(3, 3)), Rational(26, 9));
}

TEST(Metrics, UploadAndMessageSize) {
  for (std::uint32_t N : {2u, 3u, 4u}) {
    for (std::uint32_t K : {1u, 2u, 3u}) {
      const auto c = nary_dc(N, K);
      EXPECT_NEAR(upload_cost_bits(c), N * (K - 1.0) * std::log2(static_cast<double>(N)), 1e-12);
      EXPECT_NEAR(message_size_bits(c), (N - 1.0), 1e-12);
      for (auto s : upload_cost(c).per_server) EXPECT_EQ(s, checked_pow(N, K - 1));
    }
  }
  EXPECT_NEAR(upload_cost_bits(nary_dc(3, 3)), 6 * std::log2(3.0), 1e-12);
  EXPECT_NEAR(message_size_bits(nary_dc(3, 2, 3)), 2 * std::log2(3.0), 1e-12);
  EXPECT_EQ(realization_count(nary_dc(3, 3)), 64u);
}

TEST(Verify, NaryGridPasses) {
  for (std::uint32_t N : {2u, 3u, 4u}) {
    for (std::uint32_t K : {1u, 2u, 3u}) {
      const auto c = nary_dc(N, K);
      const auto r = verify_correctness(c);
      EXPECT_TRUE(r.passed) << to_text(r);
      EXPECT_EQ(r.checked_count, realization_count(c) * c.key_count() * K);
      EXPECT_TRUE(verify_privacy(c).passed);
    }
  }
  EXPECT_TRUE(verify_correctness(nary_dc(2, 2, 3)).passed);
}

TEST(Verify, CorrectnessFailureHasWitness) {
  const auto bad = nary_dc(2, 2).with_table_entry(0, 1, 0, 0, 1, 0);
  const auto r = verify_correctness(bad);
  ASSERT_FALSE(r.passed);
  ASSERT_TRUE(r.witness.has_value());
  ASSERT_TRUE(r.witness->key.has_value());
  ASSERT_TRUE(r.witness->target.has_value());
  EXPECT_EQ(r.witness->messages.size(), 2u);
  // The witness reproduces: decoding that realization with that key is wrong.
  std::vector<Message> msgs;
  for (const auto& w : r.witness->messages) msgs.emplace_back(w, 2);
  const MessageSet ms(msgs);
  std::vector<AnswerVector> answers;
  const auto tuple = bad.query_tuple(*r.witness->target, *r.witness->key);
  for (std::size_t n = 0; n < 2; ++n) answers.push_back(model::eval_answer(bad, n, tuple[n], ms));
  EXPECT_NE(model::decode(bad, *r.witness->target, *r.witness->key, answers), ms[*r.witness->target]);
}

TEST(Verify, PrivacyFailureDetected) {
  const auto biased = biased_table1();
  EXPECT_TRUE(verify_correctness(biased).passed);
  const auto r = verify_privacy(biased);
  EXPECT_FALSE(r.passed);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness->target, std::optional<std::size_t>(1));
}

TEST(Verify, WorkerCountDoesNotChangeResults) {
  const auto c = nary_dc(3, 3);
  const auto bad = c.with_table_entry(2, 4, 0, 1, 2, 1);
  for (unsigned w : {2u, 3u, 7u}) {
    EXPECT_EQ(to_text(verify_correctness(c, {kDefaultEnumerationCap, w})), to_text(verify_correctness(c)));
    EXPECT_EQ(to_text(verify_correctness(bad, {kDefaultEnumerationCap, w})), to_text(verify_correctness(bad)));
    const std::vector<Variable> vars = {Variable::answer(0, 3), Variable::answer(1, 5), Variable::message_of(2)};
    EXPECT_EQ(joint_pmf(c, vars, {kDefaultEnumerationCap, w}), joint_pmf(c, vars));
  }
}

TEST(Verify, CapIsEnforced) {
  EXPECT_THROW(verify_correctness(nary_dc(3, 3), {100, 1}), CapExceededError);
  const std::vector<Variable> vars = {Variable::message_of(0)};
  EXPECT_THROW(joint_pmf(nary_dc(3, 3), vars, {10, 1}), CapExceededError);
}

TEST(JointPmf, MessagesAreUniform) {
  const auto c = nary_dc(3, 2, 3);
  const std::vector<Variable> vars = {Variable::message_of(1)};
  const auto d = joint_pmf(c, vars);
  EXPECT_EQ(d.support_size(), 9u);
  EXPECT_NEAR(entropy_bits(d), 2 * std::log2(3.0), 1e-12);
  const std::vector<Variable> bad = {Variable::answer(0, 99)};
  EXPECT_THROW(joint_pmf(c, bad), ContractError);
}

TEST(Properties, HoldOnNaryGrid) {
  for (auto [N, K] : {std::pair{2u, 2u}, {3u, 2u}, {2u, 3u}, {3u, 3u}}) {
    const auto c = nary_dc(N, K);
    for (std::size_t k = 0; k < K; ++k) {
      const auto tuples = positive_probability_tuples(c, k);
      EXPECT_EQ(tuples.size(), c.key_count());
      for (const auto& t : tuples) {
        EXPECT_TRUE(check_P1(c, k, t).passed);
        EXPECT_TRUE(check_P2(c, k, t).passed);
        EXPECT_TRUE(check_P3(c, k, t).passed);
      }
    }
  }
}

TEST(Properties, ZeroProbabilityTupleRejected) {
  const auto c = model::builtin_table1();
  const std::size_t tuple[] = {0, 0};  // (nothing, a) is never used to request B
  EXPECT_THROW(check_P1(c, 1, tuple), ContractError);
  EXPECT_TRUE(check_P1(c, 0, tuple).passed);
}

TEST(Properties, P2FailsWhenResidualsDisagree) {
  // Flip one input of the residual table at server 1 for the tuple used with key 1.
  const auto c = nary_dc(2, 2);
  const auto t = c.query_tuple(0, 1);
  const auto bad = c.with_table_entry(1, t[1], 0, 1, 0, 1);
  const auto r = check_P2(bad, 0, t);
  EXPECT_FALSE(r.passed);
  ASSERT_TRUE(r.witness.has_value());
}

TEST(Lemma1, MutualInformationMatchesIndependentOracle) {
  for (auto [N, K] : {std::pair{2u, 2u}, {3u, 2u}, {2u, 3u}, {3u, 3u}}) {
    const auto c = nary_dc(N, K);
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<std::size_t> others;
      for (std::size_t j = 0; j < K; ++j) {
        if (j != k) others.push_back(j);
      }
      const std::size_t given[] = {k};
      const double mi = conditional_mutual_information(c, k, others, given);
      EXPECT_NEAR(mi, oracle::nary_lemma1_mi(N, K, 2, static_cast<std::uint32_t>(k)), 1e-12);
      EXPECT_NEAR(check_lemma1_equality(c, k), 0.0, 1e-9);
    }
  }
  const std::size_t other[] = {1};
  const std::size_t given[] = {0};
  EXPECT_NEAR(conditional_mutual_information(nary_dc(2, 2), 0, other, given), 0.5, 1e-12);
  const std::size_t others33[] = {1, 2};
  EXPECT_NEAR(conditional_mutual_information(nary_dc(3, 3), 0, others33, given), 8.0 / 9.0, 1e-12);
}

TEST(Lemma2, ResidualVanishesForEveryPermutation) {
  const auto c = nary_dc(3, 3);
  std::vector<std::size_t> perm = {0, 1, 2};
  do {
    for (std::size_t k = 1; k < 3; ++k) EXPECT_NEAR(check_lemma2_equality(c, k, perm), 0.0, 1e-9);
  } while (std::next_permutation(perm.begin(), perm.end()));
  const std::size_t bad_perm[] = {0, 0, 1};
  EXPECT_THROW(check_lemma2_equality(c, 1, bad_perm), ContractError);
  const std::size_t id[] = {0, 1, 2};
  EXPECT_THROW(check_lemma2_equality(c, 0, id), ContractError);
  EXPECT_THROW(check_lemma2_equality(c, 3, id), ContractError);
}

TEST(Lemma1, DownloadEverythingMeetsBound) {
  // Server 0 always returns (a, b); server 1 returns nothing. Rate 1/2.
  const CodeParams p{2, 2, 1, 2, 2};
  const model::ComponentTable id({0, 1}, 2), zero({0, 0}, 2);
  const DecomposableCode c(p, {{{"ab", 2, {id, zero, zero, id}}}, {{"0", 0, {}}}}, {"f"}, {0, 0, 0, 0},
                           {{{{0, 0, 1}}}, {{{0, 1, 1}}}});
  EXPECT_EQ(rate(c), Rational(1, 2));
  EXPECT_TRUE(verify_correctness(c).passed);
  // I = 1 bit against L(1/R - 1) = 1 bit.
  EXPECT_NEAR(check_lemma1_equality(c, 0), 0.0, 1e-12);
  EXPECT_LT(rate(c), capacity(2, 2));
}

TEST(Mutation, TwentySeededMutationsAllDetected) {
  const auto base = nary_dc(2, 2);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    std::size_t n, q;
    do {
      n = rng() % base.n_servers();
      q = rng() % base.query_count(n);
    } while (base.query(n, q).length == 0);
    const std::size_t row = rng() % base.query(n, q).length;
    const std::size_t k = rng() % base.n_messages();
    const std::size_t input = rng() % base.domain_size();
    const auto& t = base.query(n, q).component(row, k, base.n_messages());
    const std::uint32_t value = (t(input) + 1 + rng() % (t.modulus() - 1)) % t.modulus();
    const auto bad = base.with_table_entry(n, q, row, k, input, value);

    bool detected = !verify_correctness(bad).passed;
    for (std::size_t kk = 0; kk < base.n_messages() && !detected; ++kk) {
      for (const auto& tup : positive_probability_tuples(bad, kk)) {
        detected = detected || !check_P1(bad, kk, tup).passed || !check_P2(bad, kk, tup).passed ||
                   !check_P3(bad, kk, tup).passed;
      }
    }
    EXPECT_TRUE(detected) << "mutation " << i << " at server " << n << " query " << q;
  }
}

TEST(Report, TextAndJson) {
  const auto r = verify_correctness(model::builtin_table1());
  EXPECT_EQ(to_text(r), "PASS correctness [N=2 K=2 L=1 m=2 y=2] checked=16");
  const auto j = to_json(r);
  EXPECT_NE(j.find("\"passed\":true"), std::string::npos);
  EXPECT_NE(j.find("\"witness\":null"), std::string::npos);
  const auto u = VerificationReport::unsupported("lemma1", "x", "why");
  EXPECT_EQ(to_text(u).substr(0, 4), "SKIP");
}

}  // namespace
}  // namespace pirlab::analysis
