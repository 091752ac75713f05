#include "affine/algebra.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "affine/error.hpp"

namespace affine {

Weight Weight::zero(std::size_t rank) { return Weight(0, RationalVector(rank), 0); }

Weight& Weight::operator+=(const Weight& o) {
  if (o.z.size() != z.size()) throw DomainError("weight rank mismatch");
  k += o.k;
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += o.z[i];
  b += o.b;
  return *this;
}

Weight& Weight::operator-=(const Weight& o) {
  if (o.z.size() != z.size()) throw DomainError("weight rank mismatch");
  k -= o.k;
  for (std::size_t i = 0; i < z.size(); ++i) z[i] -= o.z[i];
  b -= o.b;
  return *this;
}

Weight& Weight::operator*=(const Rational& c) {
  k *= c;
  for (auto& x : z) x *= c;
  b *= c;
  return *this;
}

bool operator<(const Weight& a, const Weight& b) {
  if (a.k != b.k) return a.k < b.k;
  if (a.b != b.b) return a.b < b.b;
  return a.z < b.z;
}

std::string Weight::to_string() const {
  std::ostringstream os;
  os << k.get_str() << "*L0";
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] == 0) continue;
    os << (z[i] < 0 ? " - " : " + ") << Rational(abs(z[i])).get_str() << "*a" << (i + 1);
  }
  if (b != 0) os << (b < 0 ? " - " : " + ") << Rational(abs(b)).get_str() << "*d";
  return os.str();
}

namespace {

IntVector positive_null_vector(const IntMatrix& m, const char* what) {
  auto basis = null_space(to_rational(m));
  if (basis.size() != 1)
    throw NotAffineError(std::string("not affine: ") + what + " has corank " + std::to_string(basis.size()));
  IntVector v = primitive_integer(basis[0]);
  for (long x : v)
    if (x <= 0) throw NotAffineError(std::string("not affine: ") + what + " has no positive null vector");
  return v;
}

IntMatrix transpose_int(const IntMatrix& m) {
  IntMatrix t(m.size(), IntVector(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) t[j][i] = m[i][j];
  return t;
}

// Roots of the finite part as W-orbits of the simple roots (root coordinates).
std::set<IntVector> finite_root_set(const IntMatrix& fin) {
  const std::size_t l = fin.size();
  std::set<IntVector> roots;
  std::vector<IntVector> stack;
  for (std::size_t i = 0; i < l; ++i) {
    IntVector e(l, 0);
    e[i] = 1;
    roots.insert(e);
    stack.push_back(e);
  }
  while (!stack.empty()) {
    IntVector v = stack.back();
    stack.pop_back();
    for (std::size_t i = 0; i < l; ++i) {
      long p = 0;
      for (std::size_t j = 0; j < l; ++j) p += fin[i][j] * v[j];
      if (p == 0) continue;
      IntVector w = v;
      w[i] -= p;
      if (roots.insert(w).second) stack.push_back(w);
    }
    if (roots.size() > 100000) throw CapExceededError("finite root system too large");
  }
  std::set<IntVector> all = roots;
  for (auto v : roots) {
    for (auto& x : v) x = -x;
    all.insert(v);
  }
  return all;
}

}  // namespace

AffineAlgebra::AffineAlgebra(CartanMatrix cartan, std::string name) : cartan_(std::move(cartan)), name_(std::move(name)) {
  const std::size_t n = cartan_.entries.size();
  if (n < 2 || cartan_.rank + 1 != n) throw NotAffineError("not affine: matrix must be (l+1)x(l+1) with l >= 1");
  for (std::size_t i = 0; i < n; ++i) {
    if (cartan_.entries[i].size() != n) throw NotAffineError("not affine: matrix is not square");
    for (std::size_t j = 0; j < n; ++j) {
      long a = cartan_.entries[i][j];
      if (i == j && a != 2) throw NotAffineError("not affine: diagonal entries must be 2");
      if (i != j && a > 0) throw NotAffineError("not affine: off-diagonal entries must be <= 0");
      if (i != j && (a == 0) != (cartan_.entries[j][i] == 0))
        throw NotAffineError("not affine: a_ij = 0 must imply a_ji = 0");
    }
  }
  marks_ = positive_null_vector(cartan_.entries, "matrix");
  comarks_ = positive_null_vector(transpose_int(cartan_.entries), "transpose");
  if (comarks_[0] != 1)
    throw NotAffineError("unsupported labelling: comark a_0^vee must be 1 (reorder the nodes)");
  coxeter_ = std::accumulate(marks_.begin(), marks_.end(), 0L);
  dual_coxeter_ = std::accumulate(comarks_.begin(), comarks_.end(), 0L);

  const std::size_t l = cartan_.rank;
  finite_cartan_.assign(l, IntVector(l));
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j) finite_cartan_[i][j] = cartan_.entries[i + 1][j + 1];

  // (alpha_i|alpha_j) = (a_i^vee / a_i) a_ij
  finite_gram_.assign(l, RationalVector(l));
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j)
      finite_gram_[i][j] = Rational(comarks_[i + 1], marks_[i + 1]) * finite_cartan_[i][j];
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j)
      if (finite_gram_[i][j] != finite_gram_[j][i]) throw NotAffineError("not affine: matrix is not symmetrizable");
  finite_gram_real_ = to_real(finite_gram_);
  try {
    cholesky(finite_gram_real_);
  } catch (const DomainError&) {
    throw NotAffineError("not affine: finite part is not of finite type");
  }
  finite_cartan_inv_ = inverse(to_rational(finite_cartan_));

  gram_hstar_.assign(l + 2, RationalVector(l + 2));
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j) gram_hstar_[i + 1][j + 1] = finite_gram_[i][j];
  gram_hstar_[0][l + 1] = gram_hstar_[l + 1][0] = 1;

  // theta = sum_{i>=1} a_i alpha_i must be the highest root when a_0 = 1
  auto roots = finite_root_set(finite_cartan_);
  finite_roots_.assign(roots.begin(), roots.end());
  for (const auto& r : finite_roots_)
    if (std::all_of(r.begin(), r.end(), [](long x) { return x >= 0; })) positive_roots_.push_back(r);
  if (marks_[0] == 1) {
    IntVector theta(marks_.begin() + 1, marks_.end());
    long top = 0;
    for (const auto& r : roots) top = std::max(top, std::accumulate(r.begin(), r.end(), 0L));
    untwisted_ = roots.count(theta) > 0 && std::accumulate(theta.begin(), theta.end(), 0L) == top;
  }

  RationalVector ones(l + 1, Rational(1));
  rho_ = from_pairings(ones, 0);
  if (rho_.k != dual_coxeter_) throw ConsistencyError("rho level differs from the dual Coxeter number");
}

Weight AffineAlgebra::lambda0() const { return Weight(1, RationalVector(rank()), 0); }
Weight AffineAlgebra::delta() const { return Weight(0, RationalVector(rank()), 1); }

Weight AffineAlgebra::alpha(std::size_t i) const {
  if (i > rank()) throw DomainError("simple root index out of range");
  Weight w = Weight::zero(rank());
  if (i == 0) {
    // alpha_0 = (delta - sum_{i>=1} a_i alpha_i) / a_0
    Rational inv(1, marks_[0]);
    for (std::size_t j = 0; j < rank(); ++j) w.z[j] = -Rational(marks_[j + 1]) * inv;
    w.b = inv;
  } else {
    w.z[i - 1] = 1;
  }
  return w;
}

Weight AffineAlgebra::fundamental(std::size_t i) const {
  if (i > rank()) throw DomainError("fundamental weight index out of range");
  RationalVector p(rank() + 1);
  p[i] = 1;
  return from_pairings(p, 0);
}

Weight AffineAlgebra::from_pairings(const RationalVector& pairings, const Rational& delta_coeff) const {
  const std::size_t l = rank();
  if (pairings.size() != l + 1) throw DomainError("from_pairings: expected l+1 values");
  RationalVector fin(pairings.begin() + 1, pairings.end());
  RationalVector z = mat_vec(finite_cartan_inv_, fin);
  // lambda(alpha_0^vee) = k + sum_j a_0j z_j
  Rational k = pairings[0];
  for (std::size_t j = 0; j < l; ++j) k -= Rational(cartan_.entries[0][j + 1]) * z[j];
  return Weight(k, std::move(z), delta_coeff);
}

void AffineAlgebra::check_weight(const Weight& w) const {
  if (w.z.size() != rank())
    throw DomainError("weight has rank " + std::to_string(w.z.size()) + ", algebra has rank " + std::to_string(rank()));
}

Rational AffineAlgebra::inner(const Weight& a, const Weight& b) const {
  check_weight(a);
  check_weight(b);
  return finite_inner(a.z, b.z) + a.k * b.b + a.b * b.k;
}

Rational AffineAlgebra::finite_inner(const RationalVector& a, const RationalVector& b) const {
  if (a.size() != rank() || b.size() != rank()) throw DomainError("finite_inner: dimension mismatch");
  return bilinear(finite_gram_, a, b);
}

double AffineAlgebra::finite_inner(const RealVector& a, const RealVector& b) const {
  return bilinear(finite_gram_real_, a, b);
}

Rational AffineAlgebra::pairing(const Weight& w, std::size_t i) const {
  check_weight(w);
  if (i > rank()) throw DomainError("coroot index out of range");
  Rational p = i == 0 ? w.k : Rational(0);
  for (std::size_t j = 0; j < rank(); ++j) p += Rational(cartan_.entries[i][j + 1]) * w.z[j];
  return p;
}

RationalVector AffineAlgebra::pairings(const Weight& w) const {
  RationalVector out(rank() + 1);
  for (std::size_t i = 0; i <= rank(); ++i) out[i] = pairing(w, i);
  return out;
}

WeightClass AffineAlgebra::classify(const Weight& w) const {
  WeightClass c;
  c.level = w.k;
  c.integral = true;
  c.dominant = true;
  for (std::size_t i = 0; i <= rank(); ++i) {
    Rational p = pairing(w, i);
    if (!is_integer(p)) c.integral = false;
    if (p < 0) c.dominant = false;
  }
  c.dominant = c.dominant && c.integral;
  return c;
}

bool AffineAlgebra::is_dominant_integral(const Weight& w) const { return classify(w).dominant; }

CartanMatrix affine_type_a(std::size_t l) {
  if (l == 0) throw DomainError("type A requires rank >= 1");
  CartanMatrix m;
  m.rank = l;
  m.entries.assign(l + 1, IntVector(l + 1, 0));
  if (l == 1) {
    m.entries = {{2, -2}, {-2, 2}};
    return m;
  }
  for (std::size_t i = 0; i <= l; ++i) {
    m.entries[i][i] = 2;
    m.entries[i][(i + 1) % (l + 1)] = -1;
    m.entries[i][(i + l) % (l + 1)] = -1;
  }
  return m;
}

CartanMatrix cartan_by_name(const std::string& name) {
  if (name.size() >= 3 && name.front() == 'A' && name.back() == '~') {
    std::string digits = name.substr(1, name.size() - 2);
    if (!digits.empty() && std::all_of(digits.begin(), digits.end(), ::isdigit)) {
      long l = std::stol(digits);
      if (l >= 1 && l <= 64) return affine_type_a(static_cast<std::size_t>(l));
    }
  }
  throw DomainError("unknown algebra '" + name + "' (expected A1~, A2~, ...)");
}

CartanMatrix cartan_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("invalid Cartan JSON: ") + e.what());
  }
  if (!j.contains("rank") || !j.contains("matrix")) throw DomainError("Cartan JSON needs 'rank' and 'matrix'");
  CartanMatrix m;
  m.rank = j.at("rank").get<std::size_t>();
  m.entries = j.at("matrix").get<IntMatrix>();
  return m;
}

AlgebraPtr make_algebra(const std::string& name) {
  return std::make_shared<const AffineAlgebra>(cartan_by_name(name), name);
}

}  // namespace affine
