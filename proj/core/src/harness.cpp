#include "affine/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "affine/chain.hpp"
#include "affine/characters.hpp"
#include "affine/diffusion.hpp"
#include "affine/error.hpp"
#include "affine/rng.hpp"
#include "affine/stats.hpp"

namespace affine {

using nlohmann::json;

namespace {

// Runs body(i) for i in [0, n) on up to `threads` workers; the first exception is rethrown.
template <class F>
void parallel_for(long n, long threads, F&& body) {
  threads = std::max<long>(1, std::min(threads, n));
  if (threads == 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr err;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  for (long t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (long i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!err) err = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

std::vector<long> steps_for(const std::vector<double>& times, double unit, const char* what) {
  std::vector<long> out;
  for (double t : times) {
    double m = t / unit;
    long k = std::lround(m);
    if (std::fabs(m - k) > 1e-9 * std::max(1.0, m))
      throw DomainError(std::string(what) + ": time " + std::to_string(t) + " is not a whole number of steps");
    out.push_back(k);
  }
  return out;
}

json thresholds_json(const Thresholds& t) {
  return {{"sigma", t.sigma},
          {"ks_alpha", t.ks_alpha},
          {"ks_walk", t.ks_walk},
          {"calibration_pass_fraction", t.calibration_pass_fraction},
          {"max_row_defect", t.max_row_defect},
          {"max_abort_fraction", t.max_abort_fraction},
          {"max_law_tail", t.max_law_tail}};
}

json config_json(const ExperimentConfig& c) {
  json start_finite = json::array();
  for (const auto& q : c.start_finite) start_finite.push_back(to_string(q));
  return {{"experiment", c.experiment},
          {"algebra", c.algebra},
          {"spec_n", c.spec_n},
          {"times", c.times},
          {"samples", c.samples},
          {"seed", c.seed},
          {"depth", c.depth},
          {"start", {{"level", to_string(c.start_level)}, {"finite", start_finite}}},
          {"dt", c.dt},
          {"calibration", {{"runs", c.calibration_runs}, {"dt", c.calibration_dt}, {"samples", c.calibration_samples}}},
          {"threads", c.threads},
          {"output", {{"json", c.output_json}, {"csv", c.output_csv}}},
          {"thresholds", thresholds_json(c.thresholds)}};
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

long resolve_threads(long requested) {
  if (const char* env = std::getenv("AFFINE_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) return v;
  }
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) { return splitmix64(seed ^ splitmix64(tag)); }

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  if (experiment != "walk" && experiment != "chain") throw DomainError("config: experiment must be walk or chain");
  if (spec_n < 1) throw DomainError("config: spec_n must be >= 1");
  if (samples < 1 || depth < 1 || calibration_runs < 0 || calibration_samples < 0)
    throw DomainError("config: counts must be positive");
  if (times.empty()) throw DomainError("config: empty time grid");
  for (double t : times)
    if (!(t >= 0)) throw DomainError("config: times must be >= 0");
  if (!(dt > 0) || !(calibration_dt > 0)) throw DomainError("config: dt must be > 0");
  const Thresholds& t = thresholds;
  if (!(t.sigma > 0) || !(t.ks_walk > 0) || !(t.max_row_defect >= 0) || !(t.max_abort_fraction >= 0))
    throw DomainError("config: thresholds must be positive");
  if (t.ks_alpha != 0.10 && t.ks_alpha != 0.05 && t.ks_alpha != 0.01 && t.ks_alpha != 0.001)
    throw DomainError("config: ks_alpha must be one of 0.10, 0.05, 0.01, 0.001");
  if (!(t.calibration_pass_fraction >= 0 && t.calibration_pass_fraction <= 1))
    throw DomainError("config: calibration_pass_fraction must lie in [0, 1]");
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

ExperimentConfig config_from_json(const std::string& text) {
  ExperimentConfig c;
  try {
    json j = json::parse(text);
    c.experiment = j.value("experiment", c.experiment);
    c.algebra = j.value("algebra", c.algebra);
    c.spec_n = j.value("spec_n", c.spec_n);
    if (j.contains("times")) c.times = j.at("times").get<std::vector<double>>();
    c.samples = j.value("samples", c.samples);
    c.seed = j.value("seed", c.seed);
    c.depth = j.value("depth", c.depth);
    if (j.contains("start")) {
      const json& s = j.at("start");
      if (s.contains("level")) c.start_level = parse_rational(s.at("level").get<std::string>());
      if (s.contains("finite")) {
        c.start_finite.clear();
        for (const auto& q : s.at("finite")) c.start_finite.push_back(parse_rational(q.get<std::string>()));
      }
    }
    c.dt = j.value("dt", c.dt);
    if (j.contains("calibration")) {
      const json& k = j.at("calibration");
      c.calibration_runs = k.value("runs", c.calibration_runs);
      c.calibration_dt = k.value("dt", c.calibration_dt);
      c.calibration_samples = k.value("samples", c.calibration_samples);
    }
    c.threads = j.value("threads", c.threads);
    if (j.contains("output")) {
      c.output_json = j.at("output").value("json", c.output_json);
      c.output_csv = j.at("output").value("csv", c.output_csv);
    }
    if (j.contains("thresholds")) {
      const json& t = j.at("thresholds");
      Thresholds& th = c.thresholds;
      th.sigma = t.value("sigma", th.sigma);
      th.ks_alpha = t.value("ks_alpha", th.ks_alpha);
      th.ks_walk = t.value("ks_walk", th.ks_walk);
      th.calibration_pass_fraction = t.value("calibration_pass_fraction", th.calibration_pass_fraction);
      th.max_row_defect = t.value("max_row_defect", th.max_row_defect);
      th.max_abort_fraction = t.value("max_abort_fraction", th.max_abort_fraction);
      th.max_law_tail = t.value("max_law_tail", th.max_law_tail);
    }
  } catch (const json::exception& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("config: cannot write " + path);
  out << config_to_json(cfg);
}

std::string config_hash(const ExperimentConfig& cfg) {
  // output paths and thread counts do not change the report
  ExperimentConfig c = cfg;
  c.output_json.clear();
  c.output_csv.clear();
  c.threads = 0;
  const std::string body = config_json(c).dump();
  const std::string blob = "blob " + std::to_string(body.size()) + std::string(1, '\0') + body;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1)
    throw NumericalError("config_hash: digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

ExperimentConfig default_walk_config() {
  ExperimentConfig c;
  c.experiment = "walk";
  c.spec_n = 200;
  c.times = {1.0};
  c.samples = 10000;
  c.seed = 20001;
  c.calibration_runs = 0;
  return c;
}

ExperimentConfig default_chain_config() {
  ExperimentConfig c;
  c.experiment = "chain";
  c.spec_n = 100;
  c.times = {0.5, 1.0};
  c.samples = 5000;
  c.seed = 30001;
  return c;
}

// ---------------------------------------------------------------- reports

double ComparisonReport::worst_sigma() const {
  double w = 0;
  for (const auto& m : marginals)
    if (m.mean_se > 0) w = std::max(w, m.mean_delta / m.mean_se);
  for (const auto& c : covariances)
    if (c.se > 0) w = std::max(w, c.delta / c.se);
  return w;
}

std::string report_to_json(const ComparisonReport& r) {
  json marg = json::array(), cov = json::array();
  for (const auto& m : r.marginals)
    marg.push_back({{"time", m.time},
                    {"coordinate", m.coordinate},
                    {"ks", m.ks},
                    {"ks_threshold", m.ks_threshold},
                    {"mean_a", m.mean_a},
                    {"mean_b", m.mean_b},
                    {"mean_delta", m.mean_delta},
                    {"mean_se", m.mean_se},
                    {"pass", m.pass}});
  for (const auto& c : r.covariances)
    cov.push_back({{"time", c.time},
                   {"i", c.i},
                   {"j", c.j},
                   {"cov_a", c.cov_a},
                   {"cov_b", c.cov_b},
                   {"delta", c.delta},
                   {"se", c.se},
                   {"pass", c.pass}});
  json j = {{"experiment", r.experiment},
            {"algebra", r.algebra},
            {"spec_n", r.spec_n},
            {"config_hash", r.config_hash},
            {"note", r.note},
            {"samples", {r.samples_a, r.samples_b}},
            {"marginals", marg},
            {"covariances", cov},
            {"calibration",
             {{"performed", r.calibration.performed},
              {"runs", r.calibration.runs},
              {"passed", r.calibration.passed},
              {"fraction", r.calibration.fraction},
              {"pass", r.calibration.pass}}},
            {"diagnostics", r.diagnostics},
            {"pass", r.pass}};
  return j.dump(2) + "\n";
}

std::string report_to_csv(const ComparisonReport& r) {
  std::ostringstream os;
  os << "kind,time,i,j,value_a,value_b,delta,se,ks,ks_threshold,pass\n";
  for (const auto& m : r.marginals)
    os << "mean," << fmt(m.time) << ',' << m.coordinate << ',' << m.coordinate << ',' << fmt(m.mean_a) << ','
       << fmt(m.mean_b) << ',' << fmt(m.mean_delta) << ',' << fmt(m.mean_se) << ',' << fmt(m.ks) << ','
       << fmt(m.ks_threshold) << ',' << (m.pass ? 1 : 0) << '\n';
  for (const auto& c : r.covariances)
    os << "cov," << fmt(c.time) << ',' << c.i << ',' << c.j << ',' << fmt(c.cov_a) << ',' << fmt(c.cov_b) << ','
       << fmt(c.delta) << ',' << fmt(c.se) << ",,," << (c.pass ? 1 : 0) << '\n';
  return os.str();
}

void write_outputs(const ExperimentConfig& cfg, const ComparisonReport& r) {
  if (!cfg.output_json.empty()) {
    std::ofstream out(cfg.output_json);
    if (!out) throw DomainError("cannot write " + cfg.output_json);
    out << report_to_json(r);
  }
  if (!cfg.output_csv.empty()) {
    std::ofstream out(cfg.output_csv);
    if (!out) throw DomainError("cannot write " + cfg.output_csv);
    out << report_to_csv(r);
  }
}

// ---------------------------------------------------------------- comparisons

namespace {

std::vector<double> column(const std::vector<RealVector>& s, std::size_t i) {
  std::vector<double> out;
  out.reserve(s.size());
  for (const auto& v : s) out.push_back(v[i]);
  return out;
}

// standard error of the sample covariance of columns x and y
double covariance_se(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  std::vector<double> prod(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) prod[k] = (x[k] - mx) * (y[k] - my);
  return prod.size() > 1 ? standard_error(prod) : 0.0;
}

std::size_t dimension(const MarginalSamples& s) {
  for (const auto& at : s)
    if (!at.empty()) return at.front().size();
  throw DomainError("compare: no samples");
}

}  // namespace

ComparisonReport compare_marginals(const std::vector<double>& times, const MarginalSamples& a,
                                   const MarginalSamples& b, const Thresholds& th) {
  if (a.size() != times.size() || b.size() != times.size()) throw DomainError("compare: time grid mismatch");
  ComparisonReport r;
  const std::size_t l = dimension(a);
  r.samples_a = static_cast<long>(a.front().size());
  r.samples_b = static_cast<long>(b.front().size());
  r.pass = true;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const auto& sa = a[ti];
    const auto& sb = b[ti];
    if (sa.empty() || sb.empty()) throw DomainError("compare: empty sample set");
    for (std::size_t i = 0; i < l; ++i) {
      std::vector<double> xa = column(sa, i), xb = column(sb, i);
      MarginalRow m;
      m.time = times[ti];
      m.coordinate = i;
      m.ks = ks_statistic(xa, xb);
      m.ks_threshold = ks_critical(th.ks_alpha, xa.size(), xb.size());
      m.mean_a = mean(xa);
      m.mean_b = mean(xb);
      m.mean_delta = std::fabs(m.mean_a - m.mean_b);
      double sea = xa.size() > 1 ? standard_error(xa) : 0, seb = xb.size() > 1 ? standard_error(xb) : 0;
      m.mean_se = std::sqrt(sea * sea + seb * seb);
      m.pass = m.ks <= m.ks_threshold && m.mean_delta <= th.sigma * m.mean_se;
      r.pass = r.pass && m.pass;
      r.marginals.push_back(m);
      for (std::size_t j = i; j < l; ++j) {
        std::vector<double> ya = column(sa, j), yb = column(sb, j);
        CovarianceRow c;
        c.time = times[ti];
        c.i = i;
        c.j = j;
        c.cov_a = xa.size() > 1 ? covariance(xa, ya) : 0;
        c.cov_b = xb.size() > 1 ? covariance(xb, yb) : 0;
        c.delta = std::fabs(c.cov_a - c.cov_b);
        double ca = covariance_se(xa, ya), cb = covariance_se(xb, yb);
        c.se = std::sqrt(ca * ca + cb * cb);
        c.pass = c.delta <= th.sigma * c.se;
        r.pass = r.pass && c.pass;
        r.covariances.push_back(c);
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------- walk

ComparisonReport scaling_walk_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  AlgebraPtr alg = make_algebra(cfg.algebra);
  const long n = cfg.spec_n;
  const Thresholds& th = cfg.thresholds;
  const Weight omega = Rational(alg->dual_coxeter()) * alg->lambda0();
  const IncrementLaw law(*alg, omega, rho_specialization(*alg, n));
  if (law.tail() > th.max_law_tail)
    throw TruncationError("walk: increment law defect " + std::to_string(law.tail()) + " above threshold");
  const SpaceTime st(*alg);
  const std::size_t l = alg->rank();
  std::vector<long> steps = steps_for(cfg.times, 1.0 / static_cast<double>(n), "walk");
  const long last = *std::max_element(steps.begin(), steps.end());

  MarginalSamples samples(cfg.times.size(), std::vector<RealVector>(cfg.samples));
  parallel_for(cfg.samples, resolve_threads(cfg.threads), [&](long i) {
    auto g = make_stream(cfg.seed, static_cast<std::uint64_t>(i));
    IntVector z(l, 0);
    auto record = [&](long m) {
      for (std::size_t ti = 0; ti < steps.size(); ++ti)
        if (steps[ti] == m) {
          RealVector r(z.begin(), z.end());
          for (auto& v : r) v /= static_cast<double>(n);
          samples[ti][i] = st.to_ortho(r);
        }
    };
    record(0);
    for (long m = 1; m <= last; ++m) {
      const IntVector& q = law.offsets()[law.sample(g)];
      for (std::size_t k = 0; k < l; ++k) z[k] += q[k];
      record(m);
    }
  });

  ComparisonReport r;
  r.experiment = "walk";
  r.algebra = cfg.algebra;
  r.spec_n = n;
  r.config_hash = config_hash(cfg);
  r.note = "marginal laws of (1/n) barbar X(nt) against Gaussian(t rho, t Id) in an orthonormal basis";
  r.samples_a = cfg.samples;
  r.samples_b = 0;
  r.diagnostics["law_tail"] = law.tail();
  r.diagnostics["law_support"] = static_cast<double>(law.offsets().size());
  r.pass = true;
  const RealVector& rho = st.rho();
  for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
    const double t = cfg.times[ti];
    for (std::size_t i = 0; i < l; ++i) {
      std::vector<double> x = column(samples[ti], i);
      MarginalRow m;
      m.time = t;
      m.coordinate = i;
      m.mean_a = mean(x);
      m.mean_b = t * rho[i];
      m.mean_delta = std::fabs(m.mean_a - m.mean_b);
      m.mean_se = x.size() > 1 ? standard_error(x) : 0;
      m.ks_threshold = th.ks_walk;
      if (t > 0) {
        const double mu = m.mean_b, sd = std::sqrt(t);
        m.ks = ks_statistic(x, [&](double v) { return normal_cdf(v, mu, sd); });
      }
      m.pass = m.ks < m.ks_threshold && m.mean_delta <= th.sigma * m.mean_se;
      r.pass = r.pass && m.pass;
      r.marginals.push_back(m);
      for (std::size_t j = i; j < l; ++j) {
        std::vector<double> y = column(samples[ti], j);
        CovarianceRow c;
        c.time = t;
        c.i = i;
        c.j = j;
        c.cov_a = x.size() > 1 ? covariance(x, y) : 0;
        c.cov_b = i == j ? t : 0.0;
        c.delta = std::fabs(c.cov_a - c.cov_b);
        c.se = covariance_se(x, y);
        c.pass = c.delta <= th.sigma * c.se;
        r.pass = r.pass && c.pass;
        r.covariances.push_back(c);
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------- chain

Weight round_to_dominant(const AffineAlgebra& alg, const Weight& x, long n) {
  RationalVector pr = alg.pairings(Rational(n) * x);
  for (auto& p : pr) {
    // nearest integer, halves away from zero, then clamp into the chamber
    Rational a = abs(p) + Rational(1, 2);
    mpz_class f = a.get_num() / a.get_den();
    p = Rational(sgn(p) < 0 ? -f : f);
    if (p < 0) p = 0;
  }
  return alg.from_pairings(pr, 0);
}

MarginalSamples chain_marginals(const AffineAlgebra& alg, const Weight& start, long n, const std::vector<double>& times,
                                long samples, std::uint64_t seed, double max_defect, long threads,
                                double* worst_defect) {
  const Weight omega = Rational(alg.dual_coxeter()) * alg.lambda0();
  const BarredKernel kernel(alg, omega, rho_specialization(alg, n));
  const SpaceTime st(alg);
  std::vector<long> steps = steps_for(times, 1.0 / static_cast<double>(n), "chain");
  const long last = *std::max_element(steps.begin(), steps.end());
  const std::size_t l = alg.rank();
  MarginalSamples out(times.size(), std::vector<RealVector>(samples));
  std::mutex defect_mutex;
  double worst = 0;
  parallel_for(samples, threads, [&](long i) {
    auto g = make_stream(seed, static_cast<std::uint64_t>(i));
    Weight state = start.bar();
    double local = 0;
    auto record = [&](long m) {
      for (std::size_t ti = 0; ti < steps.size(); ++ti)
        if (steps[ti] == m) {
          RealVector r(l);
          for (std::size_t k = 0; k < l; ++k) r[k] = Rational(state.z[k] / n).get_d();
          out[ti][i] = st.to_ortho(r);
        }
    };
    record(0);
    for (long m = 1; m <= last; ++m) {
      local = std::max(local, kernel.row(state).defect);
      state = kernel.step(state, g, max_defect);
      record(m);
    }
    std::lock_guard<std::mutex> lock(defect_mutex);
    worst = std::max(worst, local);
  });
  if (worst_defect) *worst_defect = worst;
  return out;
}

MarginalSamples diffusion_marginals(const AffineAlgebra& alg, const Weight& x, const std::vector<double>& times,
                                    long samples, double dt, std::uint64_t seed, long threads, long* aborted) {
  const SpaceTime st(alg);
  const SpaceTimePoint x0 = st.from_weight(x);
  std::vector<long> steps = steps_for(times, dt, "diffusion");
  std::vector<long> sorted = steps;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const long last = sorted.back();

  // one path per task, so results do not depend on the thread count
  std::vector<SpaceTimePath> paths(samples);
  long refinements = 0;
  parallel_for(samples, threads, [&](long i) {
    SampleOptions opt;
    opt.t_max = static_cast<double>(last) * dt;
    opt.dt = dt;
    opt.n_paths = 1;
    opt.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    opt.conditioned = true;
    opt.keep_points = false;
    opt.record_steps = sorted;
    SampleSummary s = sample_paths(st, x0, opt);
    paths[i] = std::move(s.paths.front());
  });
  MarginalSamples out(times.size());
  long dropped = 0;
  for (const auto& p : paths) {
    refinements += p.refinements;
    if (p.aborted) {
      ++dropped;
      continue;
    }
    for (std::size_t ti = 0; ti < steps.size(); ++ti) {
      std::size_t idx = std::lower_bound(sorted.begin(), sorted.end(), steps[ti]) - sorted.begin();
      out[ti].push_back(p.points.at(idx).z);
    }
  }
  if (aborted) *aborted = dropped;
  return out;
}

ComparisonReport scaling_chain_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  AlgebraPtr alg = make_algebra(cfg.algebra);
  const std::size_t l = alg->rank();
  if (cfg.start_finite.size() != l) throw DomainError("chain: start has the wrong rank");
  const Weight x(cfg.start_level, cfg.start_finite, 0);
  for (const auto& p : alg->pairings(x))
    if (p <= 0) throw DomainError("chain: start " + x.to_string() + " is not in the interior of the chamber");
  const long n = cfg.spec_n;
  const Thresholds& th = cfg.thresholds;
  const long threads = resolve_threads(cfg.threads);

  const Weight xn = round_to_dominant(*alg, x, n);
  for (const auto& p : alg->pairings(xn))
    if (p <= 0) throw DomainError("chain: rounded start " + xn.to_string() + " lies on the chamber boundary");
  // diffusion starts at x_n / n so both sides share the same initial point
  const Weight x_scaled = Rational(1, n) * xn;

  double worst_defect = 0;
  MarginalSamples chain = chain_marginals(*alg, xn, n, cfg.times, cfg.samples, derive_seed(cfg.seed, 1),
                                          th.max_row_defect, threads, &worst_defect);
  long aborted = 0;
  MarginalSamples diff =
      diffusion_marginals(*alg, x_scaled, cfg.times, cfg.samples, cfg.dt, derive_seed(cfg.seed, 2), threads, &aborted);
  if (static_cast<double>(aborted) > th.max_abort_fraction * static_cast<double>(cfg.samples))
    throw NumericalError("chain: conditioned sampler aborted " + std::to_string(aborted) + " paths");

  ComparisonReport r = compare_marginals(cfg.times, chain, diff, th);
  r.experiment = "chain";
  r.algebra = cfg.algebra;
  r.spec_n = n;
  r.config_hash = config_hash(cfg);
  r.note = "finite-dimensional marginals only; both sides Monte Carlo; diffusion by Euler with h-transform drift";
  r.diagnostics["worst_row_defect"] = worst_defect;
  r.diagnostics["aborted_paths"] = static_cast<double>(aborted);
  r.diagnostics["dt"] = cfg.dt;
  r.diagnostics["start_level"] = xn.k.get_d() / static_cast<double>(n);

  CalibrationSummary& cal = r.calibration;
  if (cfg.calibration_runs > 0) {
    cal.performed = true;
    const long m = cfg.calibration_samples > 0 ? cfg.calibration_samples : cfg.samples;
    for (long run = 0; run < cfg.calibration_runs; ++run) {
      long ab = 0, bb = 0;
      MarginalSamples a = diffusion_marginals(*alg, x_scaled, cfg.times, m, cfg.calibration_dt,
                                              derive_seed(cfg.seed, 100 + 2 * run), threads, &ab);
      MarginalSamples b = diffusion_marginals(*alg, x_scaled, cfg.times, m, cfg.calibration_dt,
                                              derive_seed(cfg.seed, 101 + 2 * run), threads, &bb);
      ++cal.runs;
      if (compare_marginals(cfg.times, a, b, th).pass) ++cal.passed;
    }
    cal.fraction = static_cast<double>(cal.passed) / static_cast<double>(cal.runs);
    cal.pass = cal.fraction >= th.calibration_pass_fraction;
  }
  r.pass = r.pass && cal.pass;
  return r;
}

}  // namespace affine
