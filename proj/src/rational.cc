/* rational.cc -- parsing and formatting of exact rationals */
#include "cpa/rational.hh"

#include <cctype>

#include "cpa/errors.hh"

namespace cpa {

namespace {

bool is_integer_token(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Rat parse_rat(const std::string& text) {
  std::string num = text, den = "1";
  if (auto slash = text.find('/'); slash != std::string::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  if (!is_integer_token(num) || !is_integer_token(den))
    throw ValidationError("malformed rational '" + text + "'");
  if (num[0] == '+') num.erase(0, 1);  // set_str takes '-' but not '+'
  if (den[0] == '+') den.erase(0, 1);
  Rat q;
  if (q.set_str(num + "/" + den, 10) != 0)
    throw ValidationError("malformed rational '" + text + "'");
  if (sgn(q.get_den()) == 0)
    throw ValidationError("zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

std::string rat_str(const Rat& q) {
  Rat c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

mpz_class common_denominator(const std::vector<Rat>& qs) {
  mpz_class l = 1;
  for (const Rat& q : qs) {
    Rat c = q;
    c.canonicalize();
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
    l = l / g * c.get_den();
  }
  return l;
}

}  // namespace cpa
