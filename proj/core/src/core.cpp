#include "pirlab/core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace pirlab {

CapExceededError::CapExceededError(std::uint64_t required, std::uint64_t cap)
    : Error("enumeration requires " +
            (required == std::numeric_limits<std::uint64_t>::max() ? std::string("more than 2^64")
                                                                    : std::to_string(required)) +
            " evaluations, cap is " + std::to_string(cap)),
      required_(required),
      cap_(cap) {}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

void CodeParams::validate() const {
  if (n_servers < 2) throw ContractError("need at least 2 servers");
  if (n_messages < 1) throw ContractError("need at least 1 message");
  if (msg_len < 1) throw ContractError("message length must be positive");
  if (msg_modulus < 2) throw ContractError("message modulus must be at least 2");
  if (ans_modulus < 2) throw ContractError("answer modulus must be at least 2");
}

std::string to_string(const CodeParams& p) {
  std::ostringstream os;
  os << "N=" << p.n_servers << " K=" << p.n_messages << " L=" << p.msg_len << " m=" << p.msg_modulus
     << " y=" << p.ans_modulus;
  return os.str();
}

Symbol::Symbol(std::uint32_t value, std::uint32_t modulus) : value_(value), modulus_(modulus) {
  if (modulus < 2) throw ContractError("symbol modulus must be at least 2");
  if (value >= modulus) {
    throw ContractError("symbol value " + std::to_string(value) + " out of range for modulus " +
                        std::to_string(modulus));
  }
}

namespace {

void require_same_modulus(const Symbol& a, const Symbol& b) {
  if (a.modulus() != b.modulus()) {
    throw ContractError("modulus mismatch: " + std::to_string(a.modulus()) + " vs " +
                        std::to_string(b.modulus()));
  }
}

}  // namespace

Symbol mod_add(Symbol a, Symbol b) {
  require_same_modulus(a, b);
  const std::uint64_t s = std::uint64_t{a.value()} + b.value();
  return Symbol(static_cast<std::uint32_t>(s % a.modulus()), a.modulus());
}

Symbol mod_sub(Symbol a, Symbol b) {
  require_same_modulus(a, b);
  const std::uint64_t s = std::uint64_t{a.value()} + (a.modulus() - b.value());
  return Symbol(static_cast<std::uint32_t>(s % a.modulus()), a.modulus());
}

SymbolVector::SymbolVector(std::uint32_t modulus) : modulus_(modulus) {
  if (modulus < 2) throw ContractError("modulus must be at least 2");
}

SymbolVector::SymbolVector(std::vector<std::uint32_t> values, std::uint32_t modulus)
    : values_(std::move(values)), modulus_(modulus) {
  if (modulus < 2) throw ContractError("modulus must be at least 2");
  for (auto v : values_) {
    if (v >= modulus) {
      throw ContractError("symbol value " + std::to_string(v) + " out of range for modulus " +
                          std::to_string(modulus));
    }
  }
}

SymbolVector::SymbolVector(std::span<const Symbol> symbols, std::uint32_t modulus)
    : modulus_(modulus) {
  if (modulus < 2) throw ContractError("modulus must be at least 2");
  values_.reserve(symbols.size());
  for (const auto& s : symbols) {
    if (s.modulus() != modulus) throw ContractError("modulus mismatch in symbol vector");
    values_.push_back(s.value());
  }
}

std::string to_string(const SymbolVector& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v.values()[i];
  }
  os << ')';
  return os.str();
}

MessageSet::MessageSet(std::vector<Message> messages) : messages_(std::move(messages)) {}

void MessageSet::check_dimensions(const CodeParams& params) const {
  if (messages_.size() != params.n_messages) {
    throw ContractError("expected " + std::to_string(params.n_messages) + " messages, got " +
                        std::to_string(messages_.size()));
  }
  for (const auto& m : messages_) {
    if (m.size() != params.msg_len) {
      throw ContractError("expected message length " + std::to_string(params.msg_len) + ", got " +
                          std::to_string(m.size()));
    }
    if (m.modulus() != params.msg_modulus) throw ContractError("message modulus mismatch");
  }
}

MessageSet MessageSet::zeros(const CodeParams& params) {
  std::vector<Message> msgs;
  for (std::uint32_t k = 0; k < params.n_messages; ++k) {
    msgs.emplace_back(std::vector<std::uint32_t>(params.msg_len, 0), params.msg_modulus);
  }
  return MessageSet(std::move(msgs));
}

namespace {

void check_digits(std::span<const std::uint32_t> digits, std::uint32_t radix) {
  if (radix < 1) throw ContractError("radix must be positive");
  for (auto d : digits) {
    if (d >= radix) {
      throw ContractError("digit " + std::to_string(d) + " out of range for radix " +
                          std::to_string(radix));
    }
  }
}

std::uint32_t sum_mod(std::span<const std::uint32_t> digits, std::uint32_t radix) {
  std::uint64_t s = 0;
  for (auto d : digits) s += d;
  return static_cast<std::uint32_t>(s % radix);
}

std::string digit_string(std::span<const std::uint32_t> digits, std::uint32_t radix) {
  std::ostringstream os;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (radix > 10 && i) os << '.';
    os << digits[i];
  }
  return os.str();
}

}  // namespace

QueryVector::QueryVector(std::vector<std::uint32_t> digits, std::uint32_t radix)
    : digits_(std::move(digits)), radix_(radix) {
  check_digits(digits_, radix_);
}

QueryVector QueryVector::for_server(std::vector<std::uint32_t> digits, std::uint32_t radix,
                                    std::uint32_t server) {
  QueryVector q(std::move(digits), radix);
  if (q.digit_sum() != server) {
    throw ContractError("query " + to_string(q) + " has digit sum " + std::to_string(q.digit_sum()) +
                        " mod " + std::to_string(radix) + ", expected server " +
                        std::to_string(server));
  }
  return q;
}

std::uint32_t QueryVector::digit_sum() const { return sum_mod(digits_, radix_); }

bool QueryVector::is_zero() const {
  return std::all_of(digits_.begin(), digits_.end(), [](auto d) { return d == 0; });
}

std::string to_string(const QueryVector& q) { return digit_string(q.digits(), q.radix()); }

RandomKey::RandomKey(std::vector<std::uint32_t> digits, std::uint32_t radix)
    : digits_(std::move(digits)), radix_(radix) {
  check_digits(digits_, radix_);
}

std::uint32_t RandomKey::digit_sum() const { return sum_mod(digits_, radix_); }

std::string to_string(const RandomKey& key) {
  return "(" + digit_string(key.digits(), key.radix()) + ")";
}

}  // namespace pirlab
