#pragma once

// Text interchange format for DecomposableCode ("pir-code v1").
//
//   pir-code v1 <N> <K> <L> <m> <y>
//   keys <|F|>
//   key <label>                                  (|F| lines)
//   server <n> <|Q_n|>                           (for n = 0 .. N-1, in order)
//   query <label> <ell>                          (|Q_n| blocks)
//   table <v_0> ... <v_{m^L - 1}>                (ell * K lines: row i, then message k)
//   querymap
//   map <k> <f> <q_0> ... <q_{N-1}>              (K * |F| lines)
//   decoder
//   row <k> <f> <j> <T> (<server> <index> <coeff>){T}   (K * |F| * L lines)
//   end
//
// Tokens are separated by whitespace. Labels are single tokens. Blank lines
// and lines starting with '#' are ignored. Table values are listed in
// row-major input order (see code_model.hpp).

#include <iosfwd>
#include <string>

#include "pirlab/code_model.hpp"

namespace pirlab::model {

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

void write_code(std::ostream& os, const DecomposableCode& code);
std::string emit_code(const DecomposableCode& code);

DecomposableCode read_code(std::istream& is);
DecomposableCode parse_code(const std::string& text);

DecomposableCode load_code_file(const std::string& path);
void save_code_file(const std::string& path, const DecomposableCode& code);

}  // namespace pirlab::model
