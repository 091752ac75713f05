#include "affine/weyl.hpp"

#include <cmath>
#include <algorithm>
#include <deque>
#include <limits>

#include <nlohmann/json.hpp>

#include "affine/error.hpp"

namespace affine {

const WeylGroup& AffineAlgebra::weyl() const {
  std::call_once(weyl_once_, [this] { weyl_ = std::make_shared<const WeylGroup>(*this); });
  return *weyl_;
}

WeylGroup::WeylGroup(const AffineAlgebra& alg, std::size_t order_cap) : rank_(alg.rank()) {
  const std::size_t l = rank_;
  const IntMatrix& a = alg.finite_cartan();
  std::vector<IntMatrix> gens(l);
  for (std::size_t i = 0; i < l; ++i) {
    gens[i] = identity_int(l);
    for (std::size_t j = 0; j < l; ++j) gens[i][i][j] -= a[i][j];
  }

  elements_.push_back({identity_int(l), {}, 1});
  index_[elements_[0].matrix] = 0;
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    std::size_t cur = queue.front();
    queue.pop_front();
    for (std::size_t i = 0; i < l; ++i) {
      IntMatrix m = mat_mul(elements_[cur].matrix, gens[i]);
      if (index_.count(m)) continue;
      if (elements_.size() >= order_cap)
        throw CapExceededError("finite Weyl group exceeds order cap " + std::to_string(order_cap));
      FiniteWeylElement e{m, elements_[cur].word, -elements_[cur].sign};
      e.word.push_back(static_cast<int>(i + 1));
      index_[m] = elements_.size();
      queue.push_back(elements_.size());
      elements_.push_back(std::move(e));
    }
  }
  inverse_.resize(elements_.size());
  for (std::size_t w = 0; w < elements_.size(); ++w) {
    IntMatrix m = identity_int(l);
    for (auto it = elements_[w].word.rbegin(); it != elements_[w].word.rend(); ++it) m = mat_mul(m, gens[*it - 1]);
    inverse_[w] = index_of(m);
  }

  // M is the Z-span of the orbit of nu(theta^vee) = sum_{i>=1} a_i alpha_i.
  IntVector theta(alg.marks().begin() + 1, alg.marks().end());
  IntMatrix orbit;
  for (const auto& e : elements_) orbit.push_back(mat_vec(e.matrix, theta));
  basis_ = hermite_normal_form(orbit);
  if (basis_.size() != l) throw ConsistencyError("lattice M does not have full rank");

  RationalMatrix bt = transpose(to_rational(basis_));
  basis_inv_ = affine::inverse(bt);
  lattice_gram_ = mat_mul(mat_mul(to_rational(basis_), alg.finite_gram()), bt);
  lattice_gram_inv_ = to_real(affine::inverse(lattice_gram_));

  for (const auto& e : elements_) {
    RationalMatrix act = mat_mul(mat_mul(basis_inv_, to_rational(e.matrix)), bt);
    IntMatrix ia(l, IntVector(l));
    for (std::size_t i = 0; i < l; ++i)
      for (std::size_t j = 0; j < l; ++j) ia[i][j] = to_long_exact(act[i][j]);
    lattice_action_.push_back(std::move(ia));
    real_.push_back(to_real(to_rational(e.matrix)));
  }

  double sum_len = 0;
  for (std::size_t r = 0; r < l; ++r) sum_len += std::sqrt(lattice_gram_[r][r].get_d());
  covering_radius_ = 0.5 * sum_len;
  // det of the Gram matrix through Cholesky
  RealMatrix chol = cholesky(to_real(lattice_gram_));
  covolume_ = 1.0;
  for (std::size_t r = 0; r < l; ++r) covolume_ *= chol[r][r];
}

std::size_t WeylGroup::index_of(const IntMatrix& m) const {
  auto it = index_.find(m);
  if (it == index_.end()) throw ConsistencyError("matrix is not a finite Weyl group element");
  return it->second;
}

std::size_t WeylGroup::multiply(std::size_t a, std::size_t b) const {
  return index_of(mat_mul(elements_[a].matrix, elements_[b].matrix));
}

IntVector WeylGroup::to_root_coords(const IntVector& c) const {
  IntVector v(rank_, 0);
  for (std::size_t r = 0; r < rank_; ++r)
    for (std::size_t j = 0; j < rank_; ++j) v[j] += c[r] * basis_[r][j];
  return v;
}

IntVector WeylGroup::to_lattice_coords(const RationalVector& v) const {
  RationalVector c = mat_vec(basis_inv_, v);
  IntVector out(rank_);
  for (std::size_t r = 0; r < rank_; ++r) {
    if (!is_integer(c[r])) throw DomainError("translation vector is not in the lattice M");
    out[r] = to_long_exact(c[r]);
  }
  return out;
}

std::vector<IntVector> WeylGroup::lattice_ball(double radius) const {
  std::vector<IntVector> out;
  if (radius < 0) return out;
  const std::size_t l = rank_;
  IntVector bound(l);
  for (std::size_t r = 0; r < l; ++r)
    bound[r] = static_cast<long>(std::floor(radius * std::sqrt(lattice_gram_inv_[r][r]) + 1e-9));
  RealMatrix g = to_real(lattice_gram_);
  const double r2 = radius * radius * (1 + 1e-12) + 1e-12;
  IntVector c(l);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == l) {
      double n2 = 0;
      for (std::size_t p = 0; p < l; ++p)
        for (std::size_t q = 0; q < l; ++q) n2 += c[p] * g[p][q] * c[q];
      if (n2 <= r2) out.push_back(c);
      return;
    }
    for (long v = -bound[i]; v <= bound[i]; ++v) {
      c[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

const std::vector<FiniteWeylElement>& finite_group(const AffineAlgebra& alg) { return alg.weyl().finite(); }

Weight reflect(const AffineAlgebra& alg, std::size_t i, const Weight& w) {
  if (i > alg.rank()) throw DomainError("reflection index out of range");
  return w - alg.pairing(w, i) * alg.alpha(i);
}

const IntMatrix& lattice_basis(const AffineAlgebra& alg) { return alg.weyl().lattice_basis(); }

Weight translate(const AffineAlgebra& alg, const RationalVector& alpha, const Weight& w) {
  alg.check_weight(w);
  if (alpha.size() != alg.rank()) throw DomainError("translation has wrong dimension");
  alg.weyl().to_lattice_coords(alpha);
  Weight out = w;
  for (std::size_t i = 0; i < alpha.size(); ++i) out.z[i] += w.k * alpha[i];
  out.b -= alg.finite_inner(w.z, alpha) + Rational(1, 2) * alg.finite_inner(alpha, alpha) * w.k;
  return out;
}

Weight apply_finite(const AffineAlgebra& alg, std::size_t finite, const Weight& w) {
  alg.check_weight(w);
  const IntMatrix& m = alg.weyl().finite().at(finite).matrix;
  Weight out = w;
  for (std::size_t i = 0; i < w.z.size(); ++i) {
    Rational s = 0;
    for (std::size_t j = 0; j < w.z.size(); ++j)
      if (m[i][j] != 0) s += Rational(m[i][j]) * w.z[j];
    out.z[i] = s;
  }
  return out;
}

RationalVector translation_vector(const AffineAlgebra& alg, const AffineWeylElement& e) {
  return to_rational(alg.weyl().to_root_coords(e.translation));
}

Weight apply(const AffineAlgebra& alg, const AffineWeylElement& e, const Weight& w) {
  Weight v = apply_finite(alg, e.finite, w);
  bool zero = true;
  for (long c : e.translation) zero = zero && c == 0;
  if (zero) return v;
  return translate(alg, translation_vector(alg, e), v);
}

int sign(const AffineAlgebra& alg, const AffineWeylElement& e) { return alg.weyl().finite().at(e.finite).sign; }

AffineWeylElement compose(const AffineAlgebra& alg, const AffineWeylElement& a, const AffineWeylElement& b) {
  // (t_x u)(t_y v) = t_{x + u y} (u v)
  const WeylGroup& g = alg.weyl();
  IntVector uy = mat_vec(g.lattice_action(a.finite), b.translation);
  AffineWeylElement out;
  out.translation.resize(uy.size());
  for (std::size_t i = 0; i < uy.size(); ++i) out.translation[i] = a.translation[i] + uy[i];
  out.finite = g.multiply(a.finite, b.finite);
  return out;
}

AffineWeylElement inverse(const AffineAlgebra& alg, const AffineWeylElement& a) {
  // (t_x u)^{-1} = t_{-u^{-1} x} u^{-1}
  const WeylGroup& g = alg.weyl();
  AffineWeylElement out;
  out.finite = g.inverse(a.finite);
  out.translation = mat_vec(g.lattice_action(out.finite), a.translation);
  for (auto& x : out.translation) x = -x;
  return out;
}

AffineWeylElement translation_element(const AffineAlgebra& alg, const IntVector& lattice_coords) {
  if (lattice_coords.size() != alg.rank()) throw DomainError("translation has wrong dimension");
  return AffineWeylElement{lattice_coords, 0};
}

std::vector<AffineWeylElement> enumerate_bounded(const AffineAlgebra& alg, double radius) {
  const WeylGroup& g = alg.weyl();
  std::vector<AffineWeylElement> out;
  for (const auto& c : g.lattice_ball(radius))
    for (std::size_t w = 0; w < g.order(); ++w) out.push_back({c, w});
  return out;
}

std::string to_json(const AffineAlgebra& alg, const AffineWeylElement& e) {
  nlohmann::json j;
  j["alpha"] = e.translation;
  j["word"] = alg.weyl().finite().at(e.finite).word;
  return j.dump();
}

double log_add(double x, double y) {
  if (std::isinf(x) && x < 0) return y;
  if (std::isinf(y) && y < 0) return x;
  double m = std::max(x, y);
  return m + std::log1p(std::exp(std::min(x, y) - m));
}

double gaussian_tail_log(const WeylGroup& group, double a, double g, double c, double radius) {
  if (!(a > 0)) throw DomainError("gaussian_tail_log: quadratic coefficient must be positive");
  const double l = static_cast<double>(group.rank());
  const double log_vol = 0.5 * l * std::log(M_PI) - std::lgamma(0.5 * l + 1) - std::log(group.covolume());
  const double rc = group.covering_radius();
  double r = std::max({radius, g / (2 * a), 0.0});
  double total = -std::numeric_limits<double>::infinity();
  // the piece (radius, r] below the peak: count times the peak value
  if (r > radius) total = log_vol + l * std::log(r + rc) + c + g * g / (4 * a);
  double step = std::clamp(0.25 / std::sqrt(a), 0.01, 1.0);
  for (int j = 0; j < 100000; ++j) {
    double lo = r + j * step, hi = lo + step;
    double term = log_vol + l * std::log(hi + rc) + c + g * lo - a * lo * lo;
    total = log_add(total, term);
    if (term < total - 50 && j > 4) break;
  }
  return total;
}

double gaussian_tail_radius(const WeylGroup& group, double a, double g, double c, double log_tol) {
  const double peak = std::max(0.0, g / (2 * a));
  if (gaussian_tail_log(group, a, g, c, peak) <= log_tol) return peak;
  // solve c + g R - a R^2 + slack = log_tol for R, then verify and grow
  const double l = static_cast<double>(group.rank());
  const double log_vol = 0.5 * l * std::log(M_PI) - std::lgamma(0.5 * l + 1) - std::log(group.covolume());
  double r = peak + 1;
  for (int it = 0; it < 3; ++it) {
    double slack = log_vol + l * std::log(r + group.covering_radius() + 1) + std::log(8.0);
    double d = g * g + 4 * a * std::max(0.0, c - log_tol + slack);
    r = std::max(peak, (g + std::sqrt(d)) / (2 * a));
  }
  while (gaussian_tail_log(group, a, g, c, r) > log_tol) r = 1.05 * r + 0.01;
  return r;
}

}  // namespace affine
