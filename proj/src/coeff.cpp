#include "tempered/coeff.hpp"

#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tempered {

CoefficientModule CoefficientModule::trivial(int n) {
  CoefficientModule m;
  m.kind = Kind::Trivial;
  m.n = n;
  return m;
}

CoefficientModule CoefficientModule::sym_power(int n, int k, long det_twist) {
  CoefficientModule m;
  m.kind = Kind::SymPower;
  m.n = n;
  m.k = k;
  m.det_twist = det_twist;
  return m;
}

CoefficientModule CoefficientModule::sym_power_default(int n, int k) {
  // twist -k makes a semigroup element act through its adjugate,
  // Sym^k(det(a) a^{-1}), which is integral and reproduces the classical
  // Hecke normalization (T_2 on Sym^10 sees -24 and 2049)
  return sym_power(n, k, -k);
}

int CoefficientModule::dim() const {
  if (kind == Kind::Trivial) return 1;
  // monomials of degree k in n variables
  long num = 1, den = 1;
  for (int i = 1; i < n; i++) {
    num *= k + i;
    den *= i;
  }
  return (int)(num / den);
}

std::string CoefficientModule::str() const {
  if (kind == Kind::Trivial) return "trivial";
  std::ostringstream os;
  os << "sym:" << k;
  if (det_twist != 0) os << ":det^" << det_twist;
  return os.str();
}

std::vector<std::vector<int>> CoefficientModule::monomial_basis() const {
  std::vector<std::vector<int>> basis;
  std::vector<int> cur(n, 0);
  // lexicographic enumeration of exponent vectors summing to k
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == n - 1) {
      cur[pos] = left;
      basis.push_back(cur);
      return;
    }
    for (int e = left; e >= 0; e--) {
      cur[pos] = e;
      rec(pos + 1, left - e);
    }
  };
  rec(0, k);
  return basis;
}

namespace {

using Poly = std::map<std::vector<int>, Rat>;

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(ea.size());
      for (size_t i = 0; i < e.size(); i++) e[i] = ea[i] + eb[i];
      out[e] += ca * cb;
    }
  for (auto it = out.begin(); it != out.end();)
    it = sign(it->second) == 0 ? out.erase(it) : std::next(it);
  return out;
}

Poly poly_pow(const Poly& a, int e, int n) {
  Poly out;
  out[std::vector<int>(n, 0)] = Rat(1);
  Poly base = a;
  while (e > 0) {
    if (e & 1) out = poly_mul(out, base);
    base = poly_mul(base, base);
    e >>= 1;
  }
  return out;
}

}  // namespace

QMat CoefficientModule::gamma_matrix(const IMat& gamma) const {
  return gamma_matrix_q(to_qmat(gamma));
}

QMat CoefficientModule::gamma_matrix_q(const QMat& gamma) const {
  if (kind == Kind::Trivial) return q_identity(1);
  auto basis = monomial_basis();
  std::map<std::vector<int>, int> index;
  for (size_t i = 0; i < basis.size(); i++) index[basis[i]] = (int)i;
  int d = (int)basis.size();
  QMat out = q_zero(d, d);
  // substituted variable j is (x * gamma)_j = sum_i x_i gamma[i][j]
  std::vector<Poly> vars(n);
  for (int j = 0; j < n; j++) {
    for (int i = 0; i < n; i++) {
      if (sign(gamma[i][j]) == 0) continue;
      std::vector<int> e(n, 0);
      e[i] = 1;
      vars[j][e] = gamma[i][j];
    }
  }
  for (int col = 0; col < d; col++) {
    Poly image;
    image[std::vector<int>(n, 0)] = Rat(1);
    for (int j = 0; j < n; j++) {
      if (basis[col][j] == 0) continue;
      image = poly_mul(image, poly_pow(vars[j], basis[col][j], n));
    }
    for (const auto& [e, c] : image) {
      auto it = index.find(e);
      if (it == index.end()) throw std::logic_error("gamma_matrix: degree drift");
      out[it->second][col] = c;
    }
  }
  return out;
}

QMat CoefficientModule::semigroup_matrix(const IMat& a) const {
  if (kind == Kind::Trivial) return q_identity(1);
  QMat m = gamma_matrix(a);
  if (det_twist != 0) {
    Rat factor = rat_pow(Rat(i_det(a)), det_twist);
    m = q_scale(factor, m);
  }
  return m;
}

QMat CoefficientModule::transport_matrix(const IMat& h) const {
  // transports act on signatures on the right; the group element acting on
  // the left is gamma = h^{-1}, and values move by rho(h^{-1}), which is
  // anti-multiplicative in h exactly as cochain equivariance requires.
  // Semigroup transports additionally pick up the determinant twist.
  if (kind == Kind::Trivial) return q_identity(1);
  auto hinv = q_inverse(to_qmat(h));
  if (!hinv) throw std::invalid_argument("transport_matrix: singular transport");
  QMat m = gamma_matrix_q(*hinv);
  if (det_twist != 0) {
    Rat d = q_det(*hinv);
    m = q_scale(rat_pow(d, det_twist), m);
  }
  return m;
}

}  // namespace tempered
