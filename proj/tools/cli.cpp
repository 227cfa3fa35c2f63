#include "cli.hpp"

#include <signal.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pirlab/analysis.hpp"
#include "pirlab/code_io.hpp"
#include "pirlab/nary_code.hpp"
#include "pirlab/netsim.hpp"
#include "pirlab/symmetrize.hpp"

namespace pirlab::cli {
namespace {

using analysis::VerificationReport;
using model::DecomposableCode;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::uint32_t servers = 3;
  std::uint32_t messages = 3;
  std::uint32_t modulus = 2;
  std::uint64_t cap = kDefaultEnumerationCap;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> data_seed;
  unsigned workers = 1;
  bool json = false;
  std::string endpoints;
  std::string out_path;
  std::string transform;
  std::vector<std::string> source;
  std::optional<std::uint32_t> target;
  std::optional<std::string> key;
  std::optional<std::uint32_t> index;
  std::optional<std::uint16_t> port;
  std::string host = "127.0.0.1";
  std::uint32_t trials = 100;
};

std::uint32_t parse_u32(const std::string& s, const char* what) {
  std::size_t pos = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || s[0] == '-' || v > 0xffffffffUL) {
    throw UsageError(std::string("expected a non-negative integer for ") + what + ", got '" + s + "'");
  }
  return static_cast<std::uint32_t>(v);
}

struct Source {
  std::string name;
  DecomposableCode code;
};

// nary N K | table1 | table2 | file PATH
Source load_source(const std::vector<std::string>& src, const Options& o) {
  if (src.empty()) throw UsageError("missing code source (nary N K | table1 | table2 | file PATH)");
  const std::string& kind = src[0];
  auto expect_args = [&](std::size_t n) {
    if (src.size() != n + 1) {
      throw UsageError("'" + kind + "' takes " + std::to_string(n) + " argument(s)");
    }
  };
  if (kind == "nary") {
    expect_args(2);
    const auto N = parse_u32(src[1], "N");
    const auto K = parse_u32(src[2], "K");
    auto code = nary::NaryCode::make(N, K, o.modulus);
    return {"nary N=" + src[1] + " K=" + src[2] + " m=" + std::to_string(o.modulus), code.export_decomposable()};
  }
  if (kind == "table1") {
    expect_args(0);
    return {"table1 m=" + std::to_string(o.modulus), model::builtin_table1(o.modulus)};
  }
  if (kind == "table2") {
    expect_args(0);
    return {"table2 m=" + std::to_string(o.modulus), model::builtin_sunjafar22(o.modulus)};
  }
  if (kind == "file") {
    expect_args(1);
    return {"file " + src[1], model::load_code_file(src[1])};
  }
  throw UsageError("unknown code source '" + kind + "'");
}

std::string fmt_double(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

// ---- demo ------------------------------------------------------------------

std::vector<std::uint32_t> parse_digits(const std::string& s, std::uint32_t radix) {
  std::vector<std::uint32_t> out;
  if (s.find(',') != std::string::npos || radix > 10) {
    std::stringstream ss(s);
    std::string piece;
    while (std::getline(ss, piece, ',')) out.push_back(parse_u32(piece, "key digit"));
  } else {
    for (char c : s) {
      if (c < '0' || c > '9') throw UsageError("key digits must be decimal, got '" + s + "'");
      out.push_back(static_cast<std::uint32_t>(c - '0'));
    }
  }
  return out;
}

RandomKey resolve_key(const nary::NaryCode& code, const Options& o, std::mt19937_64& rng) {
  if (!o.key) return code.sample_key(rng);
  auto digits = parse_digits(*o.key, code.servers());
  if (digits.size() != code.messages() - 1) {
    throw UsageError("key needs K-1 = " + std::to_string(code.messages() - 1) + " digits");
  }
  for (auto d : digits) {
    if (d >= code.servers()) throw UsageError("key digit " + std::to_string(d) + " is not below N");
  }
  return RandomKey(std::move(digits), code.servers());
}

std::string symbolic_message(std::uint32_t k, std::uint32_t L) {
  std::string s = "W_" + std::to_string(k) + "=(";
  for (std::uint32_t j = 1; j <= L; ++j) s += (j > 1 ? "," : "") + nary::message_letter(k) + std::to_string(j);
  return s + ")";
}

int cmd_demo(const Options& o, std::ostream& out) {
  const auto code = nary::NaryCode::make(o.servers, o.messages, o.modulus);
  const std::uint32_t N = code.servers();
  const std::uint32_t K = code.messages();
  const std::uint64_t rows = code.query_set_size();
  if (checked_mul(rows, N) > o.cap) throw CapExceededError(checked_mul(rows, N), o.cap);

  out << "N-ary code " << to_string(code.params()) << ", |Q_n| = |F| = " << rows << "\n";
  out << "messages:";
  for (std::uint32_t k = 0; k < K; ++k) out << ' ' << symbolic_message(k, code.params().msg_len);
  out << "  (each padded with a dummy ";
  for (std::uint32_t k = 0; k < K; ++k) out << (k ? "=" : "") << nary::message_letter(k) << '0';
  out << "=0)\n\n";

  std::vector<std::vector<std::pair<std::string, std::string>>> cells(N);
  std::size_t qw = 0, aw = 0;
  for (std::uint32_t n = 0; n < N; ++n) {
    for (std::uint64_t r = 0; r < rows; ++r) {
      const auto q = code.query_at(n, r);
      cells[n].emplace_back(to_string(q), code.answer_label(n, q));
      qw = std::max(qw, cells[n].back().first.size());
      aw = std::max(aw, cells[n].back().second.size());
    }
  }
  qw = std::max<std::size_t>(qw, 3);
  aw = std::max<std::size_t>(aw, 6);
  for (std::uint32_t n = 0; n < N; ++n) {
    std::ostringstream head;
    head << "server-" << n;
    out << (n ? " | " : "") << std::left << std::setw(static_cast<int>(qw + 2 + aw)) << head.str();
  }
  out << "\n";
  for (std::uint32_t n = 0; n < N; ++n) {
    out << (n ? " | " : "") << std::left << std::setw(static_cast<int>(qw)) << "Q" << "  "
        << std::setw(static_cast<int>(aw)) << "answer";
  }
  out << "\n";
  for (std::uint64_t r = 0; r < rows; ++r) {
    for (std::uint32_t n = 0; n < N; ++n) {
      out << (n ? " | " : "") << std::left << std::setw(static_cast<int>(qw)) << cells[n][r].first << "  "
          << std::setw(static_cast<int>(aw)) << cells[n][r].second;
    }
    out << "\n";
  }

  std::mt19937_64 rng(o.seed);
  const auto msgs = nary::random_messages(code.params(), rng);
  const std::uint32_t k = o.target.value_or(std::min<std::uint32_t>(1, K - 1));
  if (k >= K) throw UsageError("target must be below K");
  const auto key = resolve_key(code, o, rng);

  out << "\nretrieval of W_" << k << " with key F=" << to_string(key) << " (F* = " << code.interference_server(key)
      << ")\n";
  out << "messages:";
  for (std::uint32_t j = 0; j < K; ++j) out << " W_" << j << "=" << to_string(msgs[j]);
  out << "\n";
  std::vector<AnswerVector> answers;
  for (std::uint32_t n = 0; n < N; ++n) {
    const auto q = code.query_vector(n, k, key);
    answers.push_back(code.answer(n, q, msgs));
    out << "  server-" << n << ": query " << to_string(q) << "  answer " << code.answer_label(n, q) << " = "
        << (answers.back().empty() ? std::string("(nothing)") : to_string(answers.back())) << "\n";
  }
  const auto got = code.reconstruct(answers, k, key);
  const bool ok = got == msgs[k];
  out << "reconstructed W_" << k << " = " << to_string(got) << (ok ? "  matches" : "  MISMATCH") << "\n";
  return ok ? kExitPass : kExitFailure;
}

// ---- metrics ---------------------------------------------------------------

int cmd_metrics(const Options& o, std::ostream& out) {
  const auto code = nary::NaryCode::make(o.servers, o.messages, o.modulus);
  const std::uint32_t N = code.servers();
  const std::uint32_t K = code.messages();
  const std::uint64_t F = code.key_count();
  if (checked_mul(checked_mul(F, K), N) > o.cap) throw CapExceededError(checked_mul(checked_mul(F, K), N), o.cap);

  // Exact expected lengths by enumerating keys.
  std::vector<Rational> expected(N);
  Rational download = 0;
  for (std::uint32_t k = 0; k < K; ++k) {
    Rational total = 0;
    for (std::uint32_t n = 0; n < N; ++n) {
      std::uint64_t sum = 0;
      for (std::uint64_t f = 0; f < F; ++f) sum += code.answer_length(n, code.query_vector(n, k, code.key_at(f)));
      const Rational e{BigInt(sum), BigInt(F)};
      if (k == 0) expected[n] = e;
      total += e;
    }
    download = std::max(download, total);
  }
  const Rational rate = Rational(code.params().msg_len) / download;
  const Rational cap = analysis::capacity(N, K);
  const double upload = N * std::log2(static_cast<double>(code.query_set_size()));
  const double msg_bits = code.params().msg_len * std::log2(static_cast<double>(code.modulus()));
  const bool at_capacity = rate == cap;

  if (o.json) {
    nlohmann::json j;
    j["params"] = to_string(code.params());
    j["capacity"] = to_string(cap);
    j["rate"] = to_string(rate);
    j["rate_equals_capacity"] = at_capacity;
    j["message_size_symbols"] = code.params().msg_len;
    j["message_size_bits"] = msg_bits;
    j["upload_bits"] = upload;
    j["query_set_sizes"] = std::vector<std::uint64_t>(N, code.query_set_size());
    std::vector<std::string> el;
    for (const auto& e : expected) el.push_back(to_string(e));
    j["expected_lengths"] = el;
    out << j.dump(2) << "\n";
  } else {
    out << "metrics nary " << to_string(code.params()) << "\n";
    out << "  capacity          " << to_string(cap) << "\n";
    out << "  rate              " << to_string(rate) << "\n";
    out << "  rate == capacity  " << (at_capacity ? "yes" : "NO") << "\n";
    out << "  message size      " << code.params().msg_len << " symbols = " << fmt_double(msg_bits) << " bits\n";
    out << "  upload cost       " << fmt_double(upload) << " bits\n";
    out << "  |Q_n|            ";
    for (std::uint32_t n = 0; n < N; ++n) out << ' ' << code.query_set_size();
    out << "\n  E(ell_n)         ";
    for (const auto& e : expected) out << ' ' << to_string(e);
    out << "\n";
  }
  return at_capacity ? kExitPass : kExitFailure;
}

// ---- verify ----------------------------------------------------------------

struct CheckRunner {
  std::string params;
  std::vector<VerificationReport> reports;
  bool cap_hit = false;

  template <class Fn>
  void run(const std::string& name, Fn&& fn) {
    try {
      reports.push_back(fn());
    } catch (const CapExceededError& e) {
      cap_hit = true;
      reports.push_back(VerificationReport::unsupported(name, params, e.what()));
    } catch (const UnsupportedError& e) {
      reports.push_back(VerificationReport::unsupported(name, params, e.what()));
    }
  }
};

VerificationReport residual_report(const std::string& name, const std::string& params, double residual,
                                   std::uint64_t checked) {
  auto r = VerificationReport::pass(name, params, checked);
  r.residual = residual;
  if (!(std::abs(residual) < analysis::kEntropyTolerance)) {
    r.passed = false;
    r.witness = analysis::Witness{{}, {}, {}, {}, "equality violated by " + fmt_double(residual, 12) + " bits"};
  }
  return r;
}

std::string perm_string(const std::vector<std::size_t>& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + std::to_string(p[i]);
  return s;
}

std::vector<VerificationReport> run_all_checks(const Source& src, const analysis::EnumerationOptions& eo,
                                               bool& cap_hit) {
  const auto& code = src.code;
  CheckRunner run{src.name, {}, false};
  run.run("correctness", [&] { return analysis::verify_correctness(code, eo); });
  run.run("privacy", [&] { return analysis::verify_privacy(code, eo); });
  run.run("uniform-decomposability", [&] {
    const auto u = model::is_uniformly_decomposable(code);
    const std::uint64_t tables = u.constant_tables + u.balanced_tables + u.offenders.size();
    if (u.uniformly_decomposable) return VerificationReport::pass("uniform-decomposability", src.name, tables);
    const auto& t = u.offenders.front();
    analysis::Witness w;
    w.target = t.message;
    w.description = "table for server " + std::to_string(t.server) + " query " + code.query(t.server, t.query).label +
                    " row " + std::to_string(t.row) + " is neither constant nor balanced";
    return VerificationReport::fail("uniform-decomposability", src.name, tables, std::move(w));
  });

  using CheckFn = VerificationReport (*)(const DecomposableCode&, std::size_t, std::span<const std::size_t>,
                                         const analysis::EnumerationOptions&);
  const std::pair<const char*, CheckFn> props[] = {
      {"P1", &analysis::check_P1}, {"P2", &analysis::check_P2}, {"P3", &analysis::check_P3}};
  for (const auto& [name, fn] : props) {
    run.run(name, [&, name = name, fn = fn] {
      std::uint64_t tuples = 0;
      for (std::size_t k = 0; k < code.n_messages(); ++k) {
        for (const auto& t : analysis::positive_probability_tuples(code, k)) {
          auto r = fn(code, k, t, eo);
          ++tuples;
          if (!r.passed) {
            r.checked_count = tuples;
            return r;
          }
        }
      }
      return VerificationReport::pass(name, src.name + " all k, all positive-probability tuples", tuples);
    });
  }

  for (std::size_t k = 0; k < code.n_messages(); ++k) {
    const std::string params = src.name + " k=" + std::to_string(k);
    run.run("lemma1", [&] {
      return residual_report("lemma1", params, analysis::check_lemma1_equality(code, k, eo), 1);
    });
  }
  const std::size_t K = code.n_messages();
  std::vector<std::vector<std::size_t>> perms;
  std::vector<std::size_t> id(K);
  for (std::size_t i = 0; i < K; ++i) id[i] = i;
  perms.push_back(id);
  if (K > 1) perms.emplace_back(id.rbegin(), id.rend());
  for (const auto& perm : perms) {
    for (std::size_t k = 1; k < K; ++k) {
      const std::string params = src.name + " k=" + std::to_string(k) + " perm=" + perm_string(perm);
      run.run("lemma2", [&] {
        return residual_report("lemma2", params, analysis::check_lemma2_equality(code, k, perm, eo), 1);
      });
    }
  }
  cap_hit = run.cap_hit;
  return std::move(run.reports);
}

int summarize(const std::vector<VerificationReport>& reports, bool cap_hit, bool json, const std::string& name,
              std::ostream& out) {
  std::size_t passed = 0, failed = 0, skipped = 0;
  for (const auto& r : reports) {
    if (!r.supported) {
      ++skipped;
    } else if (r.passed) {
      ++passed;
    } else {
      ++failed;
    }
  }
  if (json) {
    out << analysis::to_json(reports) << "\n";
  } else {
    for (const auto& r : reports) out << analysis::to_text(r) << "\n";
    out << "verify " << name << ": " << passed << " passed, " << failed << " failed, " << skipped << " skipped\n";
  }
  if (failed) return kExitFailure;
  return cap_hit ? kExitCap : kExitPass;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const Source src = load_source(o.source, o);
  bool cap_hit = false;
  const auto reports = run_all_checks(src, {o.cap, o.workers}, cap_hit);
  return summarize(reports, cap_hit, o.json, src.name, out);
}

// ---- symmetrize ------------------------------------------------------------

struct CodeStats {
  std::size_t msg_len;
  double msg_bits;
  std::size_t keys;
  std::string rate;
  std::vector<std::size_t> query_counts;
  std::vector<std::string> expected;
  std::vector<std::pair<std::size_t, std::size_t>> length_range;
};

CodeStats stats_of(const DecomposableCode& code) {
  CodeStats s;
  s.msg_len = code.params().msg_len;
  s.msg_bits = analysis::message_size_bits(code);
  s.keys = code.key_count();
  try {
    s.rate = to_string(analysis::rate(code));
  } catch (const Error&) {
    s.rate = "n/a";
  }
  for (std::size_t n = 0; n < code.n_servers(); ++n) {
    s.query_counts.push_back(code.query_count(n));
    s.expected.push_back(to_string(model::expected_length(code, n, 0)));
    std::size_t lo = SIZE_MAX, hi = 0;
    for (const auto& q : code.queries(n)) {
      lo = std::min(lo, q.length);
      hi = std::max(hi, q.length);
    }
    s.length_range.emplace_back(lo, hi);
  }
  return s;
}

int cmd_symmetrize(const Options& o, std::ostream& out) {
  const Source src = load_source(o.source, o);
  std::optional<DecomposableCode> result;
  if (o.transform == "server") {
    result = sym::server_symmetrize(src.code, o.cap).code();
  } else if (o.transform == "message") {
    result = sym::message_symmetrize(src.code, o.cap).code();
  } else if (o.transform == "variety") {
    result = sym::variety_symmetrize(src.code, o.cap);
  } else if (o.transform == "identity") {
    result = src.code;
  } else {
    throw UsageError("transform must be server, message, variety or identity");
  }

  const auto before = stats_of(src.code);
  const auto after = stats_of(*result);
  auto row = [&](const std::string& label, const std::string& a, const std::string& b) {
    out << "  " << std::left << std::setw(16) << label << std::setw(14) << a << b << "\n";
  };
  out << "symmetrize " << o.transform << " " << src.name << "\n";
  row("", "before", "after");
  row("L", std::to_string(before.msg_len), std::to_string(after.msg_len));
  row("message bits", fmt_double(before.msg_bits), fmt_double(after.msg_bits));
  row("keys", std::to_string(before.keys), std::to_string(after.keys));
  row("rate", before.rate, after.rate);
  for (std::size_t n = 0; n < result->n_servers(); ++n) {
    const std::string sn = std::to_string(n);
    row("|Q_" + sn + "|", std::to_string(before.query_counts[n]), std::to_string(after.query_counts[n]));
    row("E(ell_" + sn + ")", before.expected[n], after.expected[n]);
    auto range = [](std::pair<std::size_t, std::size_t> r) {
      return std::to_string(r.first) + ".." + std::to_string(r.second);
    };
    row("ell_" + sn + " range", range(before.length_range[n]), range(after.length_range[n]));
  }

  const analysis::EnumerationOptions eo{o.cap, o.workers};
  CheckRunner run{src.name + " after " + o.transform, {}, false};
  run.run("correctness", [&] { return analysis::verify_correctness(*result, eo); });
  run.run("privacy", [&] { return analysis::verify_privacy(*result, eo); });
  bool failed = false;
  for (const auto& r : run.reports) {
    out << analysis::to_text(r) << "\n";
    failed = failed || (r.supported && !r.passed);
  }
  if (!o.out_path.empty()) {
    model::save_code_file(o.out_path, *result);
    out << "wrote " << o.out_path << "\n";
  }
  if (failed) return kExitFailure;
  return run.cap_hit ? kExitCap : kExitPass;
}

// ---- network ---------------------------------------------------------------

std::uint16_t resolve_port(const Options& o) {
  if (o.port) return *o.port;
  if (const char* env = std::getenv("PIRLAB_PORT")) {
    const auto v = parse_u32(env, "PIRLAB_PORT");
    if (v > 65535) throw UsageError("PIRLAB_PORT out of range");
    return static_cast<std::uint16_t>(v);
  }
  return 0;
}

int cmd_serve(const Options& o, std::ostream& out) {
  if (!o.index) throw UsageError("serve needs --index");
  // Handle termination signals synchronously on this thread.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  net::TcpServer server(*o.index, resolve_port(o), o.host);
  out << "server " << *o.index << " listening on " << o.host << ":" << server.port() << std::endl;
  int sig = 0;
  sigwait(&set, &sig);
  server.stop();
  out << "server " << *o.index << " stopped" << std::endl;
  return kExitPass;
}

std::vector<net::Endpoint> endpoints_for(const Options& o, std::uint32_t N) {
  if (o.endpoints.empty()) throw UsageError("--endpoints is required");
  std::vector<net::Endpoint> eps;
  try {
    eps = net::parse_endpoints(o.endpoints);
  } catch (const ContractError& e) {
    throw UsageError(e.what());
  }
  if (eps.size() != N) {
    throw UsageError("need " + std::to_string(N) + " endpoints in server order, got " + std::to_string(eps.size()));
  }
  return eps;
}

MessageSet messages_from_seed(const CodeParams& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return nary::random_messages(p, rng);
}

int cmd_setup(const Options& o, std::ostream& out) {
  const auto code = nary::NaryCode::make(o.servers, o.messages, o.modulus);
  const auto eps = endpoints_for(o, code.servers());
  const auto msgs = messages_from_seed(code.params(), o.data_seed.value_or(o.seed));
  net::client_setup(eps, net::SetupPayload{code.params(), msgs});
  out << "setup " << to_string(code.params()) << " sent to " << eps.size() << " servers\n";
  for (std::uint32_t k = 0; k < code.messages(); ++k) out << "  W_" << k << " = " << to_string(msgs[k]) << "\n";
  return kExitPass;
}

int cmd_retrieve(const Options& o, std::ostream& out) {
  const auto code = nary::NaryCode::make(o.servers, o.messages, o.modulus);
  const auto eps = endpoints_for(o, code.servers());
  const std::uint32_t k = o.target.value_or(0);
  if (k >= code.messages()) throw UsageError("target must be below K");
  std::mt19937_64 rng(o.seed);
  const auto key = resolve_key(code, o, rng);
  const auto got = net::client_retrieve(eps, code, k, key);
  out << "W_" << k << " = " << to_string(got) << "  (key " << to_string(key) << ")\n";
  if (o.data_seed) {
    const auto msgs = messages_from_seed(code.params(), *o.data_seed);
    const bool ok = got == code.retrieve(msgs, k, key);
    out << "local oracle: " << (ok ? "match" : "MISMATCH") << "\n";
    return ok ? kExitPass : kExitFailure;
  }
  return kExitPass;
}

int cmd_loopback(const Options& o, std::ostream& out) {
  const auto code = nary::NaryCode::make(o.servers, o.messages, o.modulus);
  const std::uint32_t N = code.servers();
  std::vector<std::unique_ptr<net::TcpServer>> servers;
  std::vector<net::Endpoint> eps;
  for (std::uint32_t n = 0; n < N; ++n) {
    servers.push_back(std::make_unique<net::TcpServer>(n, 0, o.host));
    eps.push_back({o.host, servers.back()->port()});
  }
  std::mt19937_64 rng(o.seed);
  const auto msgs = nary::random_messages(code.params(), rng);
  net::Client client(eps);
  client.setup(net::SetupPayload{code.params(), msgs});
  std::uniform_int_distribution<std::uint32_t> pick(0, code.messages() - 1);
  std::uint32_t matched = 0;
  for (std::uint32_t t = 0; t < o.trials; ++t) {
    const std::uint32_t k = pick(rng);
    const auto key = code.sample_key(rng);
    const auto got = client.retrieve(code, k, key);
    if (got == code.retrieve(msgs, k, key)) {
      ++matched;
    } else {
      out << "trial " << t << ": k=" << k << " key " << to_string(key) << " got " << to_string(got) << "\n";
    }
  }
  for (auto& s : servers) s->stop();
  out << "loopback " << to_string(code.params()) << ": " << matched << "/" << o.trials
      << " retrievals matched the local oracle\n";
  return matched == o.trials ? kExitPass : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"N-ary PIR codes, exhaustive verification, symmetrization and a loopback network", "pirlab"};
  app.require_subcommand(1);
  Options o;

  auto add_params = [&](CLI::App* c) {
    c->add_option("--servers,-N", o.servers, "number of servers N")->check(CLI::Range(2u, 255u));
    c->add_option("--messages,-K", o.messages, "number of messages K")->check(CLI::Range(1u, 65535u));
    c->add_option("--modulus,-m", o.modulus, "message alphabet size m")->check(CLI::Range(2u, 256u));
  };
  auto add_cap = [&](CLI::App* c) {
    c->add_option("--cap", o.cap, "enumeration cap (evaluations)");
    c->add_option("--workers", o.workers, "analysis threads")->check(CLI::Range(1u, 256u));
  };
  auto add_source = [&](CLI::App* c) {
    c->add_option("source", o.source, "nary N K | table1 | table2 | file PATH")->required()->expected(1, 3);
    c->add_option("--modulus,-m", o.modulus, "alphabet size for built-in codes")->check(CLI::Range(2u, 256u));
  };

  auto* demo = app.add_subcommand("demo", "print the query/answer table and run one retrieval");
  add_params(demo);
  demo->add_option("--cap", o.cap, "cap on printed table cells");
  demo->add_option("--seed", o.seed, "seed for messages and key");
  demo->add_option("--key", o.key, "key digits, e.g. 02");
  demo->add_option("--target", o.target, "requested message index");

  auto* metrics = app.add_subcommand("metrics", "capacity, rate, message size and upload cost");
  add_params(metrics);
  metrics->add_option("--cap", o.cap, "enumeration cap");
  metrics->add_flag("--json", o.json, "JSON output");

  auto* verify = app.add_subcommand("verify", "exhaustively verify a code");
  add_source(verify);
  add_cap(verify);
  verify->add_flag("--json", o.json, "JSON output");

  auto* symm = app.add_subcommand("symmetrize", "apply server, message or variety symmetrization");
  symm->add_option("transform", o.transform, "server | message | variety | identity")->required();
  add_source(symm);
  add_cap(symm);
  symm->add_option("--out", o.out_path, "write the result as a pir-code v1 file");

  auto* serve = app.add_subcommand("serve", "run one server (PIRLAB_PORT is used when --port is absent)");
  serve->add_option("--index", o.index, "server index n")->required();
  serve->add_option("--port", o.port, "listen port (0 picks a free port)");
  serve->add_option("--host", o.host, "IPv4 listen address");

  auto* setup = app.add_subcommand("setup", "send seeded random messages to the servers");
  add_params(setup);
  setup->add_option("--endpoints", o.endpoints, "host:port list in server order")->required();
  setup->add_option("--seed,--data-seed", o.seed, "message seed");

  auto* retrieve = app.add_subcommand("retrieve", "privately retrieve one message");
  add_params(retrieve);
  retrieve->add_option("--endpoints", o.endpoints, "host:port list in server order")->required();
  retrieve->add_option("--target,-k", o.target, "requested message index");
  retrieve->add_option("--key", o.key, "key digits; sampled from --seed when absent");
  retrieve->add_option("--seed", o.seed, "key seed");
  retrieve->add_option("--data-seed", o.data_seed, "message seed used at setup; enables the oracle check");

  auto* loop = app.add_subcommand("loopback", "start N in-process servers and run seeded retrievals");
  add_params(loop);
  loop->add_option("--trials", o.trials, "number of retrievals");
  loop->add_option("--seed", o.seed, "seed for messages, targets and keys");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*demo) return cmd_demo(o, out);
    if (*metrics) return cmd_metrics(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*symm) return cmd_symmetrize(o, out);
    if (*serve) return cmd_serve(o, out);
    if (*setup) return cmd_setup(o, out);
    if (*retrieve) return cmd_retrieve(o, out);
    if (*loop) return cmd_loopback(o, out);
  } catch (const CapExceededError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCap;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const model::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const net::RetrievalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace pirlab::cli
