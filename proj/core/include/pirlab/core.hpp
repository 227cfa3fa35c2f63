#pragma once

// Modular-group symbols, message/key/query containers and the error types
// shared by every other part of the library.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pirlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an argument violates a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Raised when an exhaustive enumeration would exceed the configured budget.
class CapExceededError : public Error {
 public:
  CapExceededError(std::uint64_t required, std::uint64_t cap);
  std::uint64_t required() const { return required_; }
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t required_;
  std::uint64_t cap_;
};

// Raised for inputs a routine deliberately does not handle.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 24;

// Saturating integer power; returns UINT64_MAX on overflow.
std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp);
// Saturating product.
std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b);

struct CodeParams {
  std::uint32_t n_servers = 2;
  std::uint32_t n_messages = 1;
  std::uint32_t msg_len = 1;
  std::uint32_t msg_modulus = 2;
  std::uint32_t ans_modulus = 2;

  // Throws ContractError unless N >= 2, K >= 1, L >= 1, m >= 2, y >= 2.
  void validate() const;

  friend bool operator==(const CodeParams&, const CodeParams&) = default;
};

std::string to_string(const CodeParams& p);

// An element of Z_modulus.
class Symbol {
 public:
  Symbol(std::uint32_t value, std::uint32_t modulus);

  std::uint32_t value() const { return value_; }
  std::uint32_t modulus() const { return modulus_; }

  friend bool operator==(const Symbol&, const Symbol&) = default;

 private:
  std::uint32_t value_;
  std::uint32_t modulus_;
};

// Both throw ContractError when the moduli differ.
Symbol mod_add(Symbol a, Symbol b);
Symbol mod_sub(Symbol a, Symbol b);

inline Symbol operator+(Symbol a, Symbol b) { return mod_add(a, b); }
inline Symbol operator-(Symbol a, Symbol b) { return mod_sub(a, b); }

// A fixed-modulus vector of symbols. Used for messages and answers.
class SymbolVector {
 public:
  explicit SymbolVector(std::uint32_t modulus);
  SymbolVector(std::vector<std::uint32_t> values, std::uint32_t modulus);
  SymbolVector(std::span<const Symbol> symbols, std::uint32_t modulus);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::uint32_t modulus() const { return modulus_; }
  Symbol operator[](std::size_t i) const { return Symbol(values_.at(i), modulus_); }
  std::span<const std::uint32_t> values() const { return values_; }

  friend bool operator==(const SymbolVector&, const SymbolVector&) = default;

 private:
  std::vector<std::uint32_t> values_;
  std::uint32_t modulus_;
};

std::string to_string(const SymbolVector& v);

// L message symbols over Z_m.
class Message : public SymbolVector {
 public:
  using SymbolVector::SymbolVector;
};

// Answer symbols over Z_y; may be empty (nothing transmitted).
class AnswerVector : public SymbolVector {
 public:
  using SymbolVector::SymbolVector;
};

class MessageSet {
 public:
  MessageSet() = default;
  explicit MessageSet(std::vector<Message> messages);

  std::size_t size() const { return messages_.size(); }
  const Message& operator[](std::size_t k) const { return messages_.at(k); }
  auto begin() const { return messages_.begin(); }
  auto end() const { return messages_.end(); }

  // Throws ContractError unless there are K messages of length L over Z_m.
  void check_dimensions(const CodeParams& params) const;

  static MessageSet zeros(const CodeParams& params);

  friend bool operator==(const MessageSet&, const MessageSet&) = default;

 private:
  std::vector<Message> messages_;
};

// Length-K vector of base-N digits.
class QueryVector {
 public:
  QueryVector(std::vector<std::uint32_t> digits, std::uint32_t radix);
  // Additionally checks that the digit sum mod radix equals `server`.
  static QueryVector for_server(std::vector<std::uint32_t> digits, std::uint32_t radix,
                                std::uint32_t server);

  std::span<const std::uint32_t> digits() const { return digits_; }
  std::uint32_t radix() const { return radix_; }
  std::size_t size() const { return digits_.size(); }
  std::uint32_t operator[](std::size_t i) const { return digits_.at(i); }
  std::uint32_t digit_sum() const;  // mod radix
  bool is_zero() const;

  friend bool operator==(const QueryVector&, const QueryVector&) = default;

 private:
  std::vector<std::uint32_t> digits_;
  std::uint32_t radix_;
};

// Digit string such as "012".
std::string to_string(const QueryVector& q);

// K-1 base-N digits; empty when K = 1.
class RandomKey {
 public:
  RandomKey(std::vector<std::uint32_t> digits, std::uint32_t radix);

  std::span<const std::uint32_t> digits() const { return digits_; }
  std::uint32_t radix() const { return radix_; }
  std::size_t size() const { return digits_.size(); }
  std::uint32_t digit_sum() const;  // mod radix

  friend bool operator==(const RandomKey&, const RandomKey&) = default;

 private:
  std::vector<std::uint32_t> digits_;
  std::uint32_t radix_;
};

std::string to_string(const RandomKey& key);

}  // namespace pirlab
