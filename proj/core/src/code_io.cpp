#include "pirlab/code_io.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace pirlab::model {

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("pir-code line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

void check_label(const std::string& label) {
  if (label.empty()) throw ContractError("labels must be non-empty to serialize");
  for (char c : label) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      throw ContractError("label '" + label + "' contains whitespace");
    }
  }
}

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  // Next non-empty, non-comment line split into tokens.
  std::vector<std::string> next() {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      std::istringstream ls(line);
      std::vector<std::string> tokens;
      std::string t;
      while (ls >> t) tokens.push_back(t);
      if (tokens.empty() || tokens[0][0] == '#') continue;
      return tokens;
    }
    throw ParseError(line_no_, "unexpected end of input");
  }

  std::vector<std::string> expect(const std::string& keyword, std::size_t min_tokens) {
    auto t = next();
    if (t[0] != keyword) fail("expected '" + keyword + "', got '" + t[0] + "'");
    if (t.size() < min_tokens) fail("too few fields after '" + keyword + "'");
    return t;
  }

  std::uint64_t number(const std::string& s) const {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      fail("expected a non-negative integer, got '" + s + "'");
    }
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      fail("integer out of range: '" + s + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_no_, what); }
  std::size_t line() const { return line_no_; }

 private:
  std::istream& is_;
  std::size_t line_no_ = 0;
};

}  // namespace

void write_code(std::ostream& os, const DecomposableCode& code) {
  const auto& p = code.params();
  const std::size_t N = code.n_servers();
  const std::size_t K = code.n_messages();
  const std::size_t F = code.key_count();
  os << "pir-code v1 " << p.n_servers << ' ' << p.n_messages << ' ' << p.msg_len << ' '
     << p.msg_modulus << ' ' << p.ans_modulus << '\n';
  os << "keys " << F << '\n';
  for (const auto& k : code.keys()) {
    check_label(k);
    os << "key " << k << '\n';
  }
  for (std::size_t n = 0; n < N; ++n) {
    os << "server " << n << ' ' << code.query_count(n) << '\n';
    for (const auto& e : code.queries(n)) {
      check_label(e.label);
      os << "query " << e.label << ' ' << e.length << '\n';
      for (const auto& t : e.grid) {
        os << "table";
        for (auto v : t.outputs()) os << ' ' << v;
        os << '\n';
      }
    }
  }
  os << "querymap\n";
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t f = 0; f < F; ++f) {
      os << "map " << k << ' ' << f;
      for (std::size_t n = 0; n < N; ++n) os << ' ' << code.query_index(n, k, f);
      os << '\n';
    }
  }
  os << "decoder\n";
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t f = 0; f < F; ++f) {
      const auto rows = code.decode_rows(k, f);
      for (std::size_t j = 0; j < rows.size(); ++j) {
        os << "row " << k << ' ' << f << ' ' << j << ' ' << rows[j].size();
        for (const auto& t : rows[j]) os << ' ' << t.server << ' ' << t.index << ' ' << t.coeff;
        os << '\n';
      }
    }
  }
  os << "end\n";
}

std::string emit_code(const DecomposableCode& code) {
  std::ostringstream os;
  write_code(os, code);
  return os.str();
}

DecomposableCode read_code(std::istream& is) {
  LineReader r(is);
  auto h = r.next();
  if (h.size() != 7 || h[0] != "pir-code" || h[1] != "v1") {
    r.fail("expected header 'pir-code v1 N K L m y'");
  }
  CodeParams p;
  p.n_servers = static_cast<std::uint32_t>(r.number(h[2]));
  p.n_messages = static_cast<std::uint32_t>(r.number(h[3]));
  p.msg_len = static_cast<std::uint32_t>(r.number(h[4]));
  p.msg_modulus = static_cast<std::uint32_t>(r.number(h[5]));
  p.ans_modulus = static_cast<std::uint32_t>(r.number(h[6]));
  try {
    p.validate();
  } catch (const ContractError& e) {
    r.fail(e.what());
  }
  const std::uint64_t dom = checked_pow(p.msg_modulus, p.msg_len);
  if (dom > (std::uint64_t{1} << 26)) r.fail("m^L too large");
  const std::size_t N = p.n_servers;
  const std::size_t K = p.n_messages;

  auto kh = r.expect("keys", 2);
  const auto F = static_cast<std::size_t>(r.number(kh[1]));
  if (F == 0) r.fail("key space must be non-empty");
  std::vector<std::string> keys;
  for (std::size_t f = 0; f < F; ++f) {
    auto t = r.expect("key", 2);
    if (t.size() != 2) r.fail("key label must be a single token");
    keys.push_back(t[1]);
  }

  std::vector<std::vector<QueryEntry>> queries(N);
  for (std::size_t n = 0; n < N; ++n) {
    auto s = r.expect("server", 3);
    if (r.number(s[1]) != n) r.fail("servers must appear in order");
    const auto count = r.number(s[2]);
    if (count == 0) r.fail("empty query set");
    for (std::uint64_t q = 0; q < count; ++q) {
      auto qt = r.expect("query", 3);
      if (qt.size() != 3) r.fail("query line must be 'query <label> <ell>'");
      QueryEntry e;
      e.label = qt[1];
      e.length = static_cast<std::size_t>(r.number(qt[2]));
      for (std::size_t i = 0; i < e.length * K; ++i) {
        auto tt = r.expect("table", 1);
        if (tt.size() != dom + 1) {
          r.fail("table needs " + std::to_string(dom) + " values, got " + std::to_string(tt.size() - 1));
        }
        std::vector<std::uint32_t> out;
        out.reserve(dom);
        for (std::size_t j = 1; j < tt.size(); ++j) {
          const auto v = r.number(tt[j]);
          if (v >= p.ans_modulus) r.fail("table value out of range");
          out.push_back(static_cast<std::uint32_t>(v));
        }
        e.grid.emplace_back(std::move(out), p.ans_modulus);
      }
      queries[n].push_back(std::move(e));
    }
  }

  r.expect("querymap", 1);
  std::vector<std::size_t> qmap(K * F * N);
  std::vector<bool> seen_map(K * F, false);
  for (std::size_t i = 0; i < K * F; ++i) {
    auto t = r.expect("map", 3 + N);
    if (t.size() != 3 + N) r.fail("map line needs k, f and one query per server");
    const auto k = r.number(t[1]);
    const auto f = r.number(t[2]);
    if (k >= K || f >= F) r.fail("map index out of range");
    if (seen_map[k * F + f]) r.fail("duplicate map entry");
    seen_map[k * F + f] = true;
    for (std::size_t n = 0; n < N; ++n) {
      const auto q = r.number(t[3 + n]);
      if (q >= queries[n].size()) r.fail("query index out of range");
      qmap[(k * F + f) * N + n] = static_cast<std::size_t>(q);
    }
  }

  r.expect("decoder", 1);
  std::vector<std::vector<DecodeRow>> dec(K * F, std::vector<DecodeRow>(p.msg_len));
  std::vector<bool> seen_row(K * F * p.msg_len, false);
  for (std::size_t i = 0; i < K * F * p.msg_len; ++i) {
    auto t = r.expect("row", 5);
    const auto k = r.number(t[1]);
    const auto f = r.number(t[2]);
    const auto j = r.number(t[3]);
    const auto terms = r.number(t[4]);
    if (k >= K || f >= F || j >= p.msg_len) r.fail("row index out of range");
    if (t.size() != 5 + 3 * terms) r.fail("row term count does not match");
    const std::size_t slot = (k * F + f) * p.msg_len + j;
    if (seen_row[slot]) r.fail("duplicate decoder row");
    seen_row[slot] = true;
    DecodeRow row;
    for (std::uint64_t x = 0; x < terms; ++x) {
      row.push_back({static_cast<std::size_t>(r.number(t[5 + 3 * x])),
                     static_cast<std::size_t>(r.number(t[6 + 3 * x])),
                     static_cast<std::uint32_t>(r.number(t[7 + 3 * x]))});
    }
    dec[k * F + f][j] = std::move(row);
  }
  r.expect("end", 1);

  try {
    return DecomposableCode(p, std::move(queries), std::move(keys), std::move(qmap), std::move(dec));
  } catch (const ContractError& e) {
    throw ParseError(r.line(), e.what());
  } catch (const UnsupportedError& e) {
    throw ParseError(r.line(), e.what());
  }
}

DecomposableCode parse_code(const std::string& text) {
  std::istringstream is(text);
  return read_code(is);
}

DecomposableCode load_code_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open code file '" + path + "'");
  return read_code(in);
}

void save_code_file(const std::string& path, const DecomposableCode& code) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write code file '" + path + "'");
  write_code(out, code);
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace pirlab::model
