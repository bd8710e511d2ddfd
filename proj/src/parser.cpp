#include "weylsys/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "weylsys/errors.hpp"

namespace weylsys {
namespace {

class Parser {
 public:
  Parser(std::string_view text, int num_vars) : text_(text), num_vars_(num_vars) {}

  Form run(std::optional<int> degree) {
    std::map<std::vector<int>, Integer> terms;
    std::optional<int> seen_degree;
    std::size_t term_start = 0;
    skip_space();
    if (at_end()) throw ParseError("empty polynomial", pos_);
    bool first = true;
    while (!at_end()) {
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
        skip_space();
      } else if (!first) {
        throw ParseError("expected '+' or '-'", pos_);
      }
      term_start = pos_;
      auto [coeff, indices] = term();
      first = false;
      if (coeff == 0 && indices.empty()) continue;  // a literal 0 term
      const int term_degree = static_cast<int>(indices.size());
      if (seen_degree && *seen_degree != term_degree) {
        throw ParseError("inhomogeneous polynomial: term of degree " + std::to_string(term_degree) +
                             " after degree " + std::to_string(*seen_degree),
                         term_start);
      }
      seen_degree = term_degree;
      std::sort(indices.begin(), indices.end());
      terms[indices] += sign * coeff;
    }
    if (!seen_degree && !degree) throw InputError("cannot infer the degree of a zero polynomial");
    const int d = degree.value_or(*seen_degree);
    if (seen_degree && *seen_degree != d) {
      throw InputError("polynomial has degree " + std::to_string(*seen_degree) + ", expected " + std::to_string(d));
    }
    std::vector<Monomial> monomials;
    for (auto& [idx, c] : terms) {
      if (c == 0) continue;
      if (!c.fits_slong_p()) throw InputError("coefficient exceeds 64-bit range");
      monomials.push_back(Monomial{idx, c.get_si()});
    }
    return Form::from_monomials(std::move(monomials), num_vars_, d);
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  Integer number() {
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) throw ParseError("expected a number", pos_);
    return Integer(std::string(text_.substr(start, pos_ - start)));
  }

  std::pair<Integer, std::vector<int>> term() {
    Integer coeff = 1;
    std::vector<int> indices;
    for (;;) {
      skip_space();
      if (at_end()) throw ParseError("expected a factor", pos_);
      const char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c))) {
        coeff *= number();
      } else if (c == 'x' || c == 'X') {
        const std::size_t var_pos = pos_;
        ++pos_;
        if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
          throw ParseError("expected a variable index after 'x'", pos_);
        const Integer k = number();
        if (k < 1 || k > num_vars_) {
          throw ParseError("variable index " + k.get_str() + " out of range 1.." + std::to_string(num_vars_), var_pos);
        }
        long e = 1;
        skip_space();
        if (!at_end() && peek() == '^') {
          ++pos_;
          skip_space();
          const std::size_t exp_pos = pos_;
          const Integer ev = number();
          if (ev < 1 || ev > 64) throw ParseError("exponent must lie in 1..64", exp_pos);
          e = ev.get_si();
        }
        for (long i = 0; i < e; ++i) indices.push_back(static_cast<int>(k.get_si()) - 1);
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
      }
      skip_space();
      if (at_end() || peek() == '+' || peek() == '-') break;
      if (peek() != '*') {
        throw ParseError(std::isalnum(static_cast<unsigned char>(peek())) ? "implicit multiplication is not allowed"
                                                                          : "expected '*', '+' or '-'",
                         pos_);
      }
      ++pos_;
    }
    return {coeff, indices};
  }

  std::string_view text_;
  int num_vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Form parse_polynomial(std::string_view text, int num_vars, std::optional<int> degree) {
  if (num_vars < 1) throw InputError("variable count must be positive");
  return Parser(text, num_vars).run(degree);
}

std::string format_polynomial(const Form& form) {
  if (form.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& m : form.monomials()) {
    const std::int64_t c = m.coefficient;
    if (first)
      out << (c < 0 ? "-" : "");
    else
      out << (c < 0 ? " - " : " + ");
    const Integer mag = abs(Integer(static_cast<long>(c)));
    if (mag != 1) out << mag.get_str() << "*";
    for (std::size_t i = 0; i < m.indices.size();) {
      std::size_t j = i;
      while (j < m.indices.size() && m.indices[j] == m.indices[i]) ++j;
      if (i > 0) out << "*";
      out << "x" << m.indices[i] + 1;
      if (j - i > 1) out << "^" << j - i;
      i = j;
    }
    first = false;
  }
  return out.str();
}

}  // namespace weylsys
