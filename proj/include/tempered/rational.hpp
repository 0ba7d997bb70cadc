#pragma once

// Exact integer / rational arithmetic, backed by GMP.
// All correctness-critical computation in this project is exact; floating
// point never appears outside of timing output.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace tempered {

using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(long num, long den = 1) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

inline Rat to_rat(const Int& n) { return Rat(n); }

inline int sign(const Rat& q) { return sgn(q); }
inline int sign(const Int& n) { return sgn(n); }

// floor(num/den) for exact integers, den != 0.
inline Int floor_div(const Int& num, const Int& den) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

inline Int ceil_div(const Int& num, const Int& den) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

inline Int rat_floor(const Rat& q) {
  return floor_div(q.get_num(), q.get_den());
}

inline Int rat_ceil(const Rat& q) {
  return ceil_div(q.get_num(), q.get_den());
}

// floor(sqrt(q)) for q >= 0.  Uses floor(sqrt(p*d))/d >= ... computed as
// isqrt(p*d) div d, which is exact for the floor of the real square root.
inline Int rat_sqrt_floor(const Rat& q) {
  if (sign(q) < 0) throw std::domain_error("rat_sqrt_floor: negative");
  Int pd = q.get_num() * q.get_den();
  Int r;
  mpz_sqrt(r.get_mpz_t(), pd.get_mpz_t());
  return r / q.get_den();
}

inline Rat rat_abs(const Rat& q) { return sign(q) < 0 ? Rat(-q) : q; }

inline std::string rat_str(const Rat& q) {
  // canonical "p/q" with q omitted when 1
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline std::optional<Rat> rat_parse(const std::string& s) {
  try {
    Rat q(s);
    q.canonicalize();
    return q;
  } catch (...) {
    return std::nullopt;
  }
}

inline Rat rat_pow(const Rat& base, long e) {
  if (e == 0) return Rat(1);
  if (e < 0) {
    if (sign(base) == 0) throw std::domain_error("rat_pow: 0^negative");
    return Rat(1) / rat_pow(base, -e);
  }
  Rat half = rat_pow(base, e / 2);
  Rat r = half * half;
  if (e % 2) r *= base;
  return r;
}

}  // namespace tempered
