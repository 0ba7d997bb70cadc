#pragma once

// Field abstraction for the cohomology pipeline: exact rationals or a prime
// field F_p (good primes only; bad primes are rejected upstream).  Dense
// elimination, kernels and solves are generic over the field object.

#include "tempered/rational.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tempered {

struct RatField {
  using Elem = Rat;
  Elem zero() const { return Rat(0); }
  Elem one() const { return Rat(1); }
  Elem from_rat(const Rat& q) const { return q; }
  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
  Elem div(const Elem& a, const Elem& b) const { return a / b; }
  Elem neg(const Elem& a) const { return -a; }
  bool is_zero(const Elem& a) const { return sign(a) == 0; }
  bool eq(const Elem& a, const Elem& b) const { return a == b; }
  std::string str(const Elem& a) const { return rat_str(a); }
  std::string name() const { return "Q"; }
};

struct FpField {
  uint64_t p;
  using Elem = uint64_t;
  explicit FpField(uint64_t prime) : p(prime) {
    if (p < 2) throw std::invalid_argument("FpField: bad prime");
  }
  Elem zero() const { return 0; }
  Elem one() const { return 1 % p; }
  Elem add(Elem a, Elem b) const { return (a + b) % p; }
  Elem sub(Elem a, Elem b) const { return (a + p - b % p) % p; }
  Elem mul(Elem a, Elem b) const { return (__uint128_t)a * b % p; }
  Elem neg(Elem a) const { return (p - a % p) % p; }
  Elem inv(Elem a) const {
    // extended euclid
    int64_t t = 0, nt = 1;
    int64_t r = (int64_t)p, nr = (int64_t)(a % p);
    while (nr != 0) {
      int64_t q = r / nr;
      std::swap(t -= q * nt, nt);
      std::swap(r -= q * nr, nr);
    }
    if (r != 1) throw std::domain_error("FpField: not invertible");
    return (Elem)((t % (int64_t)p + (int64_t)p) % (int64_t)p);
  }
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  bool is_zero(Elem a) const { return a % p == 0; }
  bool eq(Elem a, Elem b) const { return a % p == b % p; }
  Elem from_rat(const Rat& q) const {
    Int num = q.get_num() % Int((unsigned long)p);
    Int den = q.get_den() % Int((unsigned long)p);
    if (den == 0) throw std::domain_error("FpField: denominator divisible by p");
    uint64_t n = mpz_get_ui(Int(num < 0 ? num + Int((unsigned long)p) : num).get_mpz_t());
    uint64_t d = mpz_get_ui(den.get_mpz_t());
    return div(n % p, d % p);
  }
  std::string str(Elem a) const { return std::to_string(a % p); }
  std::string name() const { return "Fp:" + std::to_string(p); }
};

template <class F>
using FMat = std::vector<std::vector<typename F::Elem>>;
template <class F>
using FVec = std::vector<typename F::Elem>;

template <class F>
FMat<F> f_zero(const F& f, int r, int c) {
  return FMat<F>(r, FVec<F>(c, f.zero()));
}

template <class F>
FMat<F> f_identity(const F& f, int n) {
  FMat<F> m = f_zero(f, n, n);
  for (int i = 0; i < n; i++) m[i][i] = f.one();
  return m;
}

template <class F>
FMat<F> f_from_qmat(const F& f, const std::vector<std::vector<Rat>>& q) {
  FMat<F> m;
  for (const auto& row : q) {
    FVec<F> r;
    for (const auto& x : row) r.push_back(f.from_rat(x));
    m.push_back(r);
  }
  return m;
}

template <class F>
FMat<F> f_mul(const F& f, const FMat<F>& a, const FMat<F>& b) {
  int m = (int)a.size(), k = a.empty() ? 0 : (int)a[0].size();
  int n = b.empty() ? 0 : (int)b[0].size();
  FMat<F> c = f_zero(f, m, n);
  for (int i = 0; i < m; i++)
    for (int l = 0; l < k; l++) {
      if (f.is_zero(a[i][l])) continue;
      for (int j = 0; j < n; j++)
        c[i][j] = f.add(c[i][j], f.mul(a[i][l], b[l][j]));
    }
  return c;
}

template <class F>
FVec<F> f_apply(const F& f, const FMat<F>& a, const FVec<F>& x) {
  FVec<F> y((int)a.size(), f.zero());
  for (size_t i = 0; i < a.size(); i++)
    for (size_t j = 0; j < x.size(); j++)
      y[i] = f.add(y[i], f.mul(a[i][j], x[j]));
  return y;
}

template <class F>
FMat<F> f_add(const F& f, const FMat<F>& a, const FMat<F>& b) {
  FMat<F> c = a;
  for (size_t i = 0; i < a.size(); i++)
    for (size_t j = 0; j < a[i].size(); j++) c[i][j] = f.add(a[i][j], b[i][j]);
  return c;
}

template <class F>
FMat<F> f_scale(const F& f, const typename F::Elem& s, const FMat<F>& a) {
  FMat<F> c = a;
  for (auto& row : c)
    for (auto& x : row) x = f.mul(s, x);
  return c;
}

template <class F>
bool f_is_zero_mat(const F& f, const FMat<F>& a) {
  for (const auto& row : a)
    for (const auto& x : row)
      if (!f.is_zero(x)) return false;
  return true;
}

// row echelon in place; returns pivot columns
template <class F>
std::vector<int> f_row_echelon(const F& f, FMat<F>& a) {
  std::vector<int> pivots;
  int m = (int)a.size(), n = m ? (int)a[0].size() : 0;
  int r = 0;
  for (int c = 0; c < n && r < m; c++) {
    int p = -1;
    for (int i = r; i < m; i++)
      if (!f.is_zero(a[i][c])) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(a[r], a[p]);
    typename F::Elem inv = f.div(f.one(), a[r][c]);
    for (int j = c; j < n; j++) a[r][j] = f.mul(a[r][j], inv);
    for (int i = 0; i < m; i++) {
      if (i == r || f.is_zero(a[i][c])) continue;
      typename F::Elem fac = a[i][c];
      for (int j = c; j < n; j++)
        a[i][j] = f.sub(a[i][j], f.mul(fac, a[r][j]));
    }
    pivots.push_back(c);
    r++;
  }
  return pivots;
}

template <class F>
int f_rank(const F& f, FMat<F> a) {
  return (int)f_row_echelon(f, a).size();
}

// basis of { x : a x = 0 } as rows
template <class F>
FMat<F> f_right_kernel(const F& f, FMat<F> a) {
  auto piv = f_row_echelon(f, a);
  int n = a.empty() ? 0 : (int)a[0].size();
  std::vector<bool> is_piv(n, false);
  for (int c : piv) is_piv[c] = true;
  FMat<F> basis;
  for (int c = 0; c < n; c++) {
    if (is_piv[c]) continue;
    FVec<F> x(n, f.zero());
    x[c] = f.one();
    for (size_t r = 0; r < piv.size(); r++) x[piv[r]] = f.neg(a[r][c]);
    basis.push_back(x);
  }
  return basis;
}

// particular solution of a x = b, if consistent
template <class F>
std::optional<FVec<F>> f_solve(const F& f, FMat<F> a, FVec<F> b) {
  int m = (int)a.size(), n = m ? (int)a[0].size() : 0;
  for (int i = 0; i < m; i++) a[i].push_back(b[i]);
  auto piv = f_row_echelon(f, a);
  if (!piv.empty() && piv.back() == n) return std::nullopt;
  FVec<F> x(n, f.zero());
  for (size_t r = 0; r < piv.size(); r++) x[piv[r]] = a[r][n];
  return x;
}

// independent columns of a (indices), via echelon of the transpose-free scan
template <class F>
std::vector<int> f_column_basis(const F& f, const FMat<F>& a) {
  FMat<F> copy = a;
  return f_row_echelon(f, copy);
}

template <class F>
FMat<F> f_transpose(const F& f, const FMat<F>& a) {
  int m = (int)a.size(), n = m ? (int)a[0].size() : 0;
  FMat<F> t = f_zero(f, n, m);
  for (int i = 0; i < m; i++)
    for (int j = 0; j < n; j++) t[j][i] = a[i][j];
  return t;
}

}  // namespace tempered
