#include "pirlab/report.hpp"

#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace pirlab::analysis {

VerificationReport VerificationReport::pass(std::string name, std::string params,
                                            std::uint64_t checked) {
  VerificationReport r;
  r.name = std::move(name);
  r.params = std::move(params);
  r.checked_count = checked;
  return r;
}

VerificationReport VerificationReport::fail(std::string name, std::string params,
                                            std::uint64_t checked, Witness witness) {
  VerificationReport r = pass(std::move(name), std::move(params), checked);
  r.passed = false;
  r.witness = std::move(witness);
  return r;
}

VerificationReport VerificationReport::unsupported(std::string name, std::string params,
                                                   std::string why) {
  VerificationReport r = pass(std::move(name), std::move(params), 0);
  r.supported = false;
  r.witness = Witness{{}, {}, {}, {}, std::move(why)};
  return r;
}

namespace {

std::string join(const std::vector<std::size_t>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

}  // namespace

std::string to_text(const VerificationReport& r) {
  std::ostringstream os;
  os << (!r.supported ? "SKIP" : r.passed ? "PASS" : "FAIL") << ' ' << r.name << " [" << r.params
     << "] checked=" << r.checked_count;
  if (r.residual) os << " residual=" << std::setprecision(12) << *r.residual;
  if (r.witness) {
    const auto& w = *r.witness;
    os << " witness={";
    bool first = true;
    auto sep = [&] {
      if (!first) os << "; ";
      first = false;
    };
    if (w.target) sep(), os << "k=" << *w.target;
    if (w.key) sep(), os << "key=" << *w.key;
    if (!w.queries.empty()) sep(), os << "queries=" << join(w.queries);
    if (!w.messages.empty()) {
      sep();
      os << "messages=";
      for (const auto& m : w.messages) {
        os << '(';
        for (std::size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
        os << ')';
      }
    }
    if (!w.description.empty()) sep(), os << w.description;
    os << '}';
  }
  return os.str();
}

namespace {

nlohmann::json json_of(const VerificationReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["params"] = r.params;
  j["passed"] = r.passed;
  j["supported"] = r.supported;
  j["checked"] = r.checked_count;
  j["residual"] = r.residual ? nlohmann::json(*r.residual) : nlohmann::json(nullptr);
  if (r.witness) {
    nlohmann::json w;
    w["messages"] = r.witness->messages;
    w["key"] = r.witness->key ? nlohmann::json(*r.witness->key) : nlohmann::json(nullptr);
    w["target"] = r.witness->target ? nlohmann::json(*r.witness->target) : nlohmann::json(nullptr);
    w["queries"] = r.witness->queries;
    w["description"] = r.witness->description;
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

}  // namespace

std::string to_json(const VerificationReport& r) { return json_of(r).dump(); }

std::string to_json(const std::vector<VerificationReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(json_of(r));
  return arr.dump(2);
}

}  // namespace pirlab::analysis
