#include "affine/highest_weight.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "affine/error.hpp"
#include "affine/weyl.hpp"

namespace affine {

void require_untwisted_dominant(const AffineAlgebra& alg, const Weight& w, const char* what) {
  if (!alg.untwisted()) throw DomainError(std::string(what) + ": only untwisted algebras are supported");
  alg.check_weight(w);
  if (!alg.is_dominant_integral(w)) throw DomainError(std::string(what) + ": weight " + w.to_string() + " is not dominant integral");
}

std::vector<RootEntry> root_datum(const AffineAlgebra& alg, long depth) {
  if (!alg.untwisted()) throw DomainError("root_datum: only untwisted algebras are supported");
  const std::size_t l = alg.rank();
  std::vector<RootEntry> out;
  Weight delta = alg.delta();
  for (long m = 0; m <= depth; ++m) {
    const auto& betas = m == 0 ? alg.positive_finite_roots() : alg.finite_roots();
    for (const auto& beta : betas) {
      RootEntry r;
      r.root = Weight(0, to_rational(beta), m);
      r.finite = beta;
      r.m = m;
      out.push_back(std::move(r));
    }
  }
  for (long m = 1; m <= depth; ++m) {
    RootEntry r;
    r.root = Rational(m) * delta;
    r.finite = IntVector(l, 0);
    r.m = m;
    r.imaginary = true;
    r.mult = static_cast<long>(l);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------- table

MultiplicityTable::MultiplicityTable(Weight top, long depth, std::string tag)
    : top_(std::move(top)), depth_(depth), tag_(std::move(tag)), layers_(depth + 1) {}

BigInt MultiplicityTable::at(long d, const IntVector& o) const {
  if (d < 0 || d > depth_) return 0;
  auto it = layers_[d].find(o);
  return it == layers_[d].end() ? BigInt(0) : it->second;
}

bool MultiplicityTable::key_of(const Weight& w, long& d, IntVector& o) const {
  if (w.k != top_.k || w.z.size() != top_.z.size()) return false;
  Rational dd = top_.b - w.b;
  if (!is_integer(dd)) return false;
  o.resize(w.z.size());
  for (std::size_t i = 0; i < w.z.size(); ++i) {
    Rational x = w.z[i] - top_.z[i];
    if (!is_integer(x)) return false;
    o[i] = to_long_exact(x);
  }
  d = to_long_exact(dd);
  return true;
}

BigInt MultiplicityTable::at(const Weight& w) const {
  long d;
  IntVector o;
  if (!key_of(w, d, o) || d < 0) return 0;
  if (d > depth_) throw TruncationError("weight " + w.to_string() + " is deeper than the table depth " + std::to_string(depth_));
  return at(d, o);
}

void MultiplicityTable::set(long d, const IntVector& o, const BigInt& value) {
  if (d < 0 || d > depth_) throw DomainError("table depth out of range");
  if (value == 0)
    layers_[d].erase(o);
  else
    layers_[d][o] = value;
}

void MultiplicityTable::add(long d, const IntVector& o, const BigInt& value) {
  if (d < 0 || d > depth_) throw DomainError("table depth out of range");
  BigInt& slot = layers_[d][o];
  slot += value;
  if (slot == 0) layers_[d].erase(o);
}

Weight MultiplicityTable::weight(long d, const IntVector& o) const {
  Weight w = top_;
  w.b -= d;
  for (std::size_t i = 0; i < o.size(); ++i) w.z[i] += o[i];
  return w;
}

std::size_t MultiplicityTable::size() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.size();
  return n;
}

BigInt MultiplicityTable::layer_mass(long d) const {
  BigInt s = 0;
  for (const auto& [o, m] : layers_.at(d)) s += m;
  return s;
}

MultiplicityTable MultiplicityTable::truncated(long d) const {
  MultiplicityTable t(top_, std::min(d, depth_), tag_);
  for (long i = 0; i <= t.depth_; ++i) t.layers_[i] = layers_[i];
  return t;
}

std::string MultiplicityTable::to_csv() const {
  std::ostringstream os;
  os << "depth";
  for (std::size_t i = 0; i < top_.z.size(); ++i) os << ",o" << (i + 1);
  os << ",multiplicity\n";
  for (long d = 0; d <= depth_; ++d)
    for (const auto& [o, m] : layers_[d]) {
      os << d;
      for (long x : o) os << ',' << x;
      os << ',' << m.get_str() << '\n';
    }
  return os.str();
}

bool operator==(const MultiplicityTable& a, const MultiplicityTable& b) {
  return a.top_ == b.top_ && a.depth_ == b.depth_ && a.layers_ == b.layers_;
}

// ---------------------------------------------------------------- Freudenthal

namespace {

BigInt lcm_den(BigInt acc, const Rational& q) {
  BigInt d = q.get_den();
  mpz_lcm(acc.get_mpz_t(), acc.get_mpz_t(), d.get_mpz_t());
  return acc;
}

long scaled(const Rational& q, const BigInt& n) { return to_long_exact(q * Rational(n)); }

// Integer offsets o with |c + o|^2 < r2 plus the coordinate caps o_i <= cap_i.
struct OffsetBox {
  IntVector lo, hi;
  bool empty = false;
};

OffsetBox ball_box(const RealVector& center, double r2, const RealMatrix& ginv, const IntVector& cap) {
  OffsetBox b;
  const std::size_t l = center.size();
  b.lo.resize(l);
  b.hi.resize(l);
  double r = std::sqrt(std::max(r2, 0.0));
  for (std::size_t i = 0; i < l; ++i) {
    double w = r * std::sqrt(ginv[i][i]);
    b.lo[i] = static_cast<long>(std::ceil(-center[i] - w - 1e-9));
    b.hi[i] = std::min(cap[i], static_cast<long>(std::floor(-center[i] + w + 1e-9)));
    if (b.lo[i] > b.hi[i]) b.empty = true;
  }
  return b;
}

struct DenseLayer {
  IntVector lo, hi;
  std::vector<std::size_t> stride;
  std::vector<BigInt> value;
  bool empty = true;

  bool index(const IntVector& o, std::size_t& idx) const {
    if (empty) return false;
    idx = 0;
    for (std::size_t i = 0; i < o.size(); ++i) {
      if (o[i] < lo[i] || o[i] > hi[i]) return false;
      idx += static_cast<std::size_t>(o[i] - lo[i]) * stride[i];
    }
    return true;
  }
};

template <class F>
void for_each_in_box(const IntVector& lo, const IntVector& hi, F&& f) {
  const std::size_t l = lo.size();
  IntVector o = lo;
  while (true) {
    f(o);
    std::size_t i = l;
    while (i > 0) {
      --i;
      if (o[i] < hi[i]) {
        ++o[i];
        for (std::size_t j = i + 1; j < l; ++j) o[j] = lo[j];
        goto next;
      }
    }
    return;
  next:;
  }
}

}  // namespace

MultiplicityTable freudenthal_table(const AffineAlgebra& alg, const Weight& lambda, long depth) {
  require_untwisted_dominant(alg, lambda, "freudenthal_table");
  if (depth < 0) throw DomainError("freudenthal_table: depth must be >= 0");
  const std::size_t l = alg.rank();
  const long k = to_long_exact(lambda.k);
  const long hv = alg.dual_coxeter();
  IntVector a(alg.marks().begin() + 1, alg.marks().end());
  const RationalMatrix& G = alg.finite_gram();

  RationalVector c(l);
  for (std::size_t i = 0; i < l; ++i) c[i] = lambda.z[i] + alg.rho().z[i];
  RationalVector cz(l), cr(l);
  for (std::size_t i = 0; i < l; ++i) {
    RationalVector e(l);
    e[i] = 1;
    cz[i] = alg.finite_inner(lambda.z, e);
    cr[i] = alg.finite_inner(c, e);
  }
  BigInt N = 1;
  for (std::size_t i = 0; i < l; ++i) {
    N = lcm_den(N, cz[i]);
    N = lcm_den(N, cr[i]);
    for (std::size_t j = 0; j < l; ++j) N = lcm_den(N, G[i][j]);
  }
  IntMatrix g(l, IntVector(l));
  IntVector czN(l), crN(l);
  for (std::size_t i = 0; i < l; ++i) {
    czN[i] = scaled(cz[i], N);
    crN[i] = scaled(cr[i], N);
    for (std::size_t j = 0; j < l; ++j) g[i][j] = scaled(G[i][j], N);
  }
  const long n_scale = to_long_exact(Rational(N));

  struct RootInfo {
    IntVector beta;
    long norm;  // N (beta|beta)
  };
  auto make_roots = [&](const std::vector<IntVector>& src) {
    std::vector<RootInfo> r;
    for (const auto& b : src) {
      IntVector gb = mat_vec(g, b);
      long nb = 0;
      for (std::size_t i = 0; i < l; ++i) nb += b[i] * gb[i];
      r.push_back({b, nb});
    }
    return r;
  };
  const auto pos_roots = make_roots(alg.positive_finite_roots());
  const auto all_roots = make_roots(alg.finite_roots());

  std::vector<long> sigma(depth + 1, 0);
  for (long m = 1; m <= depth; ++m)
    for (long s = m; s <= depth; s += m) sigma[s] += m;

  const RealVector c_real = to_real(c);
  const double c2 = alg.finite_inner(c_real, c_real);
  const RealMatrix ginv = to_real(inverse(G));

  std::vector<DenseLayer> dense(depth + 1);
  auto lookup = [&](long d, const IntVector& o) -> const BigInt* {
    if (d < 0) return nullptr;
    std::size_t idx;
    if (!dense[d].index(o, idx)) return nullptr;
    return &dense[d].value[idx];
  };

  MultiplicityTable table(lambda, depth, "V(" + lambda.to_string() + ")");
  IntVector o2(l), go(l);
  for (long d = 0; d <= depth; ++d) {
    IntVector cap(l);
    for (std::size_t i = 0; i < l; ++i) cap[i] = d * a[i];
    OffsetBox box = ball_box(c_real, c2 + 2.0 * (k + hv) * d, ginv, cap);
    if (box.empty) continue;
    DenseLayer& layer = dense[d];
    layer.lo = box.lo;
    layer.hi = box.hi;
    layer.stride.assign(l, 1);
    std::size_t total = 1;
    for (std::size_t i = l; i-- > 0;) {
      layer.stride[i] = total;
      total *= static_cast<std::size_t>(box.hi[i] - box.lo[i] + 1);
    }
    layer.value.assign(total, BigInt(0));
    layer.empty = false;

    // candidates: |lambda+rho|^2 - |mu+rho|^2 > 0 (scaled by N), plus the top itself
    std::vector<std::pair<long, IntVector>> cands;
    for_each_in_box(box.lo, box.hi, [&](const IntVector& o) {
      IntVector go_ = mat_vec(g, o);
      long den = 2 * n_scale * (k + hv) * d;
      for (std::size_t i = 0; i < l; ++i) den -= 2 * o[i] * crN[i] + o[i] * go_[i];
      bool top = d == 0 && std::all_of(o.begin(), o.end(), [](long x) { return x == 0; });
      if (den > 0 || top) {
        long h = d;
        for (std::size_t i = 0; i < l; ++i) h += d * a[i] - o[i];
        cands.emplace_back(h, o);
      }
    });
    std::sort(cands.begin(), cands.end());

    for (const auto& [height, o] : cands) {
      std::size_t idx;
      layer.index(o, idx);
      if (height == 0) {
        layer.value[idx] = 1;
        table.set(0, o, 1);
        continue;
      }
      go = mat_vec(g, o);
      long den = 2 * n_scale * (k + hv) * d;
      for (std::size_t i = 0; i < l; ++i) den -= 2 * o[i] * crN[i] + o[i] * go[i];
      if (den == 0) throw ConsistencyError("freudenthal_table: zero denominator at " + table.weight(d, o).to_string());

      BigInt num = 0;
      // imaginary roots m*delta, multiplicity l: 2 l k sum_s sigma(s) mult(mu + s delta)
      for (long s = 1; s <= d; ++s) {
        const BigInt* v = lookup(d - s, o);
        if (v && *v != 0) {
          BigInt t = *v * (2L * static_cast<long>(l) * n_scale * k * sigma[s]);
          num += t;
        }
      }
      for (long m = 0; m <= d; ++m) {
        const auto& roots = m == 0 ? pos_roots : all_roots;
        for (const auto& r : roots) {
          long base = n_scale * k * m;
          for (std::size_t i = 0; i < l; ++i) base += r.beta[i] * (czN[i] + go[i]);
          for (long j = 1;; ++j) {
            long dd = d - j * m;
            if (dd < 0) break;
            for (std::size_t i = 0; i < l; ++i) o2[i] = o[i] + j * r.beta[i];
            const BigInt* v = lookup(dd, o2);
            if (!v) {
              if (m == 0) break;
              continue;
            }
            if (*v == 0) continue;
            long coef = 2 * (base + j * r.norm);
            if (coef >= 0)
              mpz_addmul_ui(num.get_mpz_t(), v->get_mpz_t(), static_cast<unsigned long>(coef));
            else
              mpz_submul_ui(num.get_mpz_t(), v->get_mpz_t(), static_cast<unsigned long>(-coef));
          }
        }
      }
      BigInt q, rem;
      BigInt dz = den;
      mpz_tdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), dz.get_mpz_t());
      if (rem != 0) throw ConsistencyError("freudenthal_table: inexact division at " + table.weight(d, o).to_string());
      if (q < 0) throw ConsistencyError("freudenthal_table: negative multiplicity at " + table.weight(d, o).to_string());
      layer.value[idx] = q;
      if (q != 0) table.set(d, o, q);
    }
  }
  return table;
}

// ---------------------------------------------------------------- series oracle

MultiplicityTable character_series_oracle(const AffineAlgebra& alg, const Weight& lambda, long depth) {
  require_untwisted_dominant(alg, lambda, "character_series_oracle");
  if (depth < 0) throw DomainError("character_series_oracle: depth must be >= 0");
  const std::size_t l = alg.rank();
  const long k = to_long_exact(lambda.k);
  const long hv = alg.dual_coxeter();
  IntVector a(alg.marks().begin() + 1, alg.marks().end());
  const Weight big = lambda + alg.rho();  // Lambda = lambda + rho
  const long K = k + hv;

  // Exponent box: k_0 <= depth and k_fin,i <= kmax_i, a downward closed set, so
  // truncated products and quotients are exact inside it. kmax comes from
  // |lambda+rho|^2 > |mu+rho|^2 for every weight mu != lambda.
  RealVector c = to_real(big.z);
  double c2 = alg.finite_inner(c, c);
  RealMatrix ginv = to_real(inverse(alg.finite_gram()));
  IntVector kmax(l, 0);
  for (long d = 0; d <= depth; ++d) {
    double r = std::sqrt(c2 + 2.0 * K * d);
    for (std::size_t i = 0; i < l; ++i) {
      long lo = static_cast<long>(std::ceil(-c[i] - r * std::sqrt(ginv[i][i]) - 1e-9));
      kmax[i] = std::max(kmax[i], d * a[i] - lo);
    }
  }
  std::vector<std::size_t> dims(l + 1), stride(l + 1);
  dims[0] = static_cast<std::size_t>(depth + 1);
  for (std::size_t i = 0; i < l; ++i) dims[i + 1] = static_cast<std::size_t>(kmax[i] + 1);
  std::size_t total = 1;
  for (std::size_t i = l + 1; i-- > 0;) {
    stride[i] = total;
    total *= dims[i];
  }
  std::vector<BigInt> series(total, BigInt(0));
  auto flat = [&](const IntVector& e, std::size_t& idx) {
    idx = 0;
    for (std::size_t i = 0; i <= l; ++i) {
      if (e[i] < 0 || e[i] >= static_cast<long>(dims[i])) return false;
      idx += static_cast<std::size_t>(e[i]) * stride[i];
    }
    return true;
  };

  // numerator sum_w det(w) e^{w Lambda - Lambda}; delta-depth of Lambda - w Lambda is
  // (w0 Lambda|alpha) + K|alpha|^2/2 >= K r^2/2 - |Lambda| r
  const double radius = (std::sqrt(c2) + std::sqrt(c2 + 2.0 * K * depth)) / K + 1e-9;
  for (const auto& w : enumerate_bounded(alg, radius)) {
    Weight diff = big - apply(alg, w, big);
    if (!is_integer(diff.b)) throw ConsistencyError("character_series_oracle: non-integral exponent");
    IntVector e(l + 1);
    e[0] = to_long_exact(diff.b);
    for (std::size_t i = 0; i < l; ++i) e[i + 1] = to_long_exact(diff.z[i] + Rational(e[0] * a[i]));
    std::size_t idx;
    if (flat(e, idx)) series[idx] += sign(alg, w);
  }

  // divide by prod (1 - e^{-alpha})^{mult alpha}
  std::vector<IntVector> coord(total, IntVector(l + 1));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t i = 0; i <= l; ++i) {
      coord[idx][i] = static_cast<long>(rem / stride[i]);
      rem %= stride[i];
    }
  }
  for (const auto& root : root_datum(alg, depth)) {
    IntVector e(l + 1);
    e[0] = root.m;
    bool inside = true;
    for (std::size_t i = 0; i < l; ++i) {
      e[i + 1] = root.finite[i] + root.m * a[i];
      if (e[i + 1] < 0) throw ConsistencyError("character_series_oracle: root with negative exponent");
      if (e[i + 1] >= static_cast<long>(dims[i + 1])) inside = false;
    }
    if (!inside) continue;
    std::size_t shift = 0;
    for (std::size_t i = 0; i <= l; ++i) shift += static_cast<std::size_t>(e[i]) * stride[i];
    for (long rep = 0; rep < root.mult; ++rep) {
      for (std::size_t idx = shift; idx < total; ++idx) {
        const IntVector& x = coord[idx];
        bool ok = true;
        for (std::size_t i = 0; i <= l && ok; ++i) ok = x[i] >= e[i];
        if (ok) series[idx] += series[idx - shift];
      }
    }
  }

  MultiplicityTable table(lambda, depth, "V(" + lambda.to_string() + ")");
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (series[idx] == 0) continue;
    if (series[idx] < 0) throw ConsistencyError("character_series_oracle: negative coefficient");
    const IntVector& x = coord[idx];
    long d = x[0];
    IntVector o(l);
    for (std::size_t i = 0; i < l; ++i) o[i] = d * a[i] - x[i + 1];
    table.set(d, o, series[idx]);
  }
  return table;
}

// ---------------------------------------------------------------- tensor powers

MultiplicityTable multiply_tables(const MultiplicityTable& a, const MultiplicityTable& b, long depth) {
  depth = std::min({depth, a.depth(), b.depth()});
  MultiplicityTable out(a.top() + b.top(), depth, a.tag() + "*" + b.tag());
  IntVector o;
  for (long d1 = 0; d1 <= depth; ++d1)
    for (const auto& [o1, m1] : a.layer(d1))
      for (long d2 = 0; d1 + d2 <= depth; ++d2)
        for (const auto& [o2, m2] : b.layer(d2)) {
          o = o1;
          for (std::size_t i = 0; i < o.size(); ++i) o[i] += o2[i];
          out.add(d1 + d2, o, m1 * m2);
        }
  return out;
}

MultiplicityTable tensor_power_table(const AffineAlgebra& alg, const Weight& omega, long n, long depth) {
  if (n < 0) throw DomainError("tensor_power_table: n must be >= 0");
  if (depth < 0) throw DomainError("tensor_power_table: depth must be >= 0");
  require_untwisted_dominant(alg, omega, "tensor_power_table");
  const std::string tag = "V(" + omega.to_string() + ")^" + std::to_string(n);
  MultiplicityTable acc(Weight::zero(alg.rank()), depth, tag);
  acc.set(0, IntVector(alg.rank(), 0), 1);
  if (n == 0) return acc;
  MultiplicityTable base = freudenthal_table(alg, omega, depth);
  acc = base;
  for (long i = 1; i < n; ++i) acc = multiply_tables(acc, base, depth);
  MultiplicityTable t(acc.top(), acc.depth(), tag);
  for (long d = 0; d <= acc.depth(); ++d)
    for (const auto& [o, m] : acc.layer(d)) t.set(d, o, m);
  return t;
}

// ---------------------------------------------------------------- Brauer-Klimyk

namespace {

struct BranchingScan {
  std::vector<std::pair<AffineWeylElement, Weight>> terms;  // w and gamma = w(beta+rho) - (lambda+rho)
  long max_depth = -1;
};

// Every w with |gamma|^2 <= |n omega|^2, the necessary condition for gamma to be a
// weight of V(omega)^{(x) n}. The admissible set is a bounded ball in alpha per finite
// part; the shell just outside it is scanned to confirm it contributes nothing.
BranchingScan scan_branching(const AffineAlgebra& alg, const Weight& lambda, const Weight& omega, long n,
                             const Weight& beta) {
  const WeylGroup& W = alg.weyl();
  BranchingScan scan;
  Weight top = Rational(n) * omega;
  Weight lam_rho = lambda + alg.rho();
  Weight big = beta + alg.rho();
  const Rational K = big.k, KL = lam_rho.k;
  const Rational top2 = alg.inner(top, top);
  const Rational base = top2 - alg.inner(big, big) - alg.inner(lam_rho, lam_rho);

  double shell = 0;
  for (std::size_t r = 0; r < alg.rank(); ++r) shell = std::max(shell, std::sqrt(W.lattice_gram()[r][r].get_d()));

  for (std::size_t u = 0; u < W.order(); ++u) {
    Weight ub = apply_finite(alg, u, big);
    // f(alpha) = const + 2 (K lam - KL ub | alpha) - KL K |alpha|^2
    Rational cst = base + 2 * (alg.finite_inner(ub.z, lam_rho.z) + K * lam_rho.b + KL * big.b);
    RationalVector gv(alg.rank());
    for (std::size_t i = 0; i < gv.size(); ++i) gv[i] = K * lam_rho.z[i] - KL * ub.z[i];
    double g = std::sqrt(std::max(0.0, alg.finite_inner(gv, gv).get_d()));
    double q = Rational(KL * K).get_d();
    double disc = g * g + q * cst.get_d();
    double radius = disc < 0 ? -1 : (g + std::sqrt(disc)) / q;
    radius = radius < 0 ? -1 : radius * (1 + 1e-9) + 1e-9;
    for (const auto& c : W.lattice_ball(std::max(radius, 0.0) + shell)) {
      AffineWeylElement w{c, u};
      Weight gamma = apply(alg, w, big) - lam_rho;
      Rational f = top2 - alg.inner(gamma, gamma);
      RationalVector av = to_rational(W.to_root_coords(c));
      double len = std::sqrt(alg.finite_inner(av, av).get_d());
      if (f < 0) continue;
      if (len > radius + 1e-9) throw ConsistencyError("branching_mult: admissible term outside the certified radius");
      // gamma must lie in n omega - Q_+ with integral coordinates
      Rational dd = top.b - gamma.b;
      bool integral = is_integer(dd);
      for (std::size_t i = 0; i < gamma.z.size() && integral; ++i) integral = is_integer(gamma.z[i] - top.z[i]);
      if (!integral || dd < 0) continue;
      scan.max_depth = std::max(scan.max_depth, to_long_exact(dd));
      scan.terms.emplace_back(w, gamma);
    }
  }
  return scan;
}

void check_branching_args(const AffineAlgebra& alg, const Weight& lambda, const Weight& omega, long n,
                          const Weight& beta) {
  require_untwisted_dominant(alg, lambda, "branching_mult");
  require_untwisted_dominant(alg, omega, "branching_mult");
  require_untwisted_dominant(alg, beta, "branching_mult");
  if (n < 0) throw DomainError("branching_mult: n must be >= 0");
}

}  // namespace

long branching_required_depth(const AffineAlgebra& alg, const Weight& lambda, const Weight& omega, long n,
                              const Weight& beta) {
  check_branching_args(alg, lambda, omega, n, beta);
  if (n == 0 || beta.k != lambda.k + Rational(n) * omega.k) return 0;
  return std::max(0L, scan_branching(alg, lambda, omega, n, beta).max_depth);
}

BigInt branching_mult(const AffineAlgebra& alg, const MultiplicityTable& tensor_power, const Weight& lambda,
                      const Weight& omega, long n, const Weight& beta) {
  check_branching_args(alg, lambda, omega, n, beta);
  if (n == 0) return beta == lambda ? 1 : 0;
  if (beta.k != lambda.k + Rational(n) * omega.k) return 0;
  if (tensor_power.top() != Rational(n) * omega) throw DomainError("branching_mult: table is not V(omega)^n");
  BranchingScan scan = scan_branching(alg, lambda, omega, n, beta);
  if (scan.max_depth > tensor_power.depth())
    throw TruncationError("branching_mult: tensor-power table depth " + std::to_string(tensor_power.depth()) +
                          " below the required " + std::to_string(scan.max_depth));
  BigInt total = 0;
  for (const auto& [w, gamma] : scan.terms) {
    BigInt m = tensor_power.at(gamma);
    if (m != 0) total += sign(alg, w) * m;
  }
  if (total < 0) throw ConsistencyError("branching_mult: negative alternating sum for " + beta.to_string());
  return total;
}

BigInt branching_mult(const AffineAlgebra& alg, const Weight& lambda, const Weight& omega, long n, const Weight& beta,
                      long depth) {
  check_branching_args(alg, lambda, omega, n, beta);
  if (n == 0) return beta == lambda ? 1 : 0;
  long need = branching_required_depth(alg, lambda, omega, n, beta);
  if (need > depth)
    throw TruncationError("branching_mult: depth " + std::to_string(depth) + " cannot certify the sum (needs " +
                          std::to_string(need) + ")");
  return branching_mult(alg, tensor_power_table(alg, omega, n, depth), lambda, omega, n, beta);
}

std::vector<BranchingTerm> branching_by_division(const AffineAlgebra& alg, const Weight& lambda, const Weight& omega,
                                                 long n, long depth) {
  require_untwisted_dominant(alg, lambda, "branching_by_division");
  MultiplicityTable product =
      multiply_tables(freudenthal_table(alg, lambda, depth), tensor_power_table(alg, omega, n, depth), depth);
  const std::size_t l = alg.rank();
  IntVector a(alg.marks().begin() + 1, alg.marks().end());
  auto height = [&](long d, const IntVector& o) {
    long h = d;
    for (std::size_t i = 0; i < l; ++i) h += d * a[i] - o[i];
    return h;
  };
  // remaining coefficients ordered by height, so every visited weight is maximal
  std::map<std::tuple<long, long, IntVector>, BigInt> rest;
  for (long d = 0; d <= product.depth(); ++d)
    for (const auto& [o, m] : product.layer(d)) rest[{height(d, o), d, o}] = m;

  std::vector<BranchingTerm> out;
  for (auto it = rest.begin(); it != rest.end(); ++it) {
    if (it->second == 0) continue;
    const auto& [h, d, o] = it->first;
    Weight mu = product.weight(d, o);
    if (it->second < 0) throw ConsistencyError("branching_by_division: negative remainder at " + mu.to_string());
    if (!alg.is_dominant_integral(mu))
      throw ConsistencyError("branching_by_division: non-dominant leading term " + mu.to_string());
    BigInt c = it->second;
    out.push_back({mu, d, o, c});
    MultiplicityTable sub = freudenthal_table(alg, mu, depth - d);
    for (long d2 = 0; d2 <= sub.depth(); ++d2)
      for (const auto& [o2, m2] : sub.layer(d2)) {
        IntVector oo = o;
        for (std::size_t i = 0; i < l; ++i) oo[i] += o2[i];
        rest[{height(d + d2, oo), d + d2, oo}] -= c * m2;
      }
  }
  return out;
}

BigInt weight_multiplicity(const AffineAlgebra& alg, const Weight& lambda, const Weight& mu) {
  require_untwisted_dominant(alg, lambda, "weight_multiplicity");
  Rational dd = lambda.b - mu.b;
  if (mu.k != lambda.k || !is_integer(dd) || dd < 0) return 0;
  return freudenthal_table(alg, lambda, to_long_exact(dd)).at(mu);
}

}  // namespace affine
