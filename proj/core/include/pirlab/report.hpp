#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pirlab::analysis {

// Counterexample attached to a failed check.
struct Witness {
  std::vector<std::vector<std::uint32_t>> messages;  // message realization, if relevant
  std::optional<std::size_t> key;
  std::optional<std::size_t> target;
  std::vector<std::size_t> queries;  // per-server query indices, if relevant
  std::string description;
};

struct VerificationReport {
  std::string name;
  std::string params;
  bool passed = true;
  bool supported = true;  // false when the check does not apply to the code
  std::uint64_t checked_count = 0;
  std::optional<double> residual;
  std::optional<Witness> witness;

  static VerificationReport pass(std::string name, std::string params, std::uint64_t checked);
  static VerificationReport fail(std::string name, std::string params, std::uint64_t checked,
                                 Witness witness);
  static VerificationReport unsupported(std::string name, std::string params, std::string why);
};

// "PASS correctness [nary N=3 K=3] checked=1728"
std::string to_text(const VerificationReport& r);
// One JSON object per report: name, params, passed, supported, checked,
// residual, witness.
std::string to_json(const VerificationReport& r);
std::string to_json(const std::vector<VerificationReport>& reports);

}  // namespace pirlab::analysis
