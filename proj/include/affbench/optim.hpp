#pragma once

// Derivative-free optimizer portfolio. Every optimizer consumes objective
// evaluations through a tracker that enforces the budget and records each
// strict improvement of the best-so-far value.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "affbench/error.hpp"
#include "affbench/rng.hpp"
#include "affbench/suite.hpp"

namespace affbench {

template <class P>
concept EvaluableProblem = requires(const P& p, const Vector& x) {
  { p.dimension() } -> std::convertible_to<int>;
  { p(x) } -> std::convertible_to<double>;
};

enum class Algorithm { de, pso, emna, dcma, nelder_mead };
enum class Init { origin_gaussian, uniform };

inline std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::de: return "de";
    case Algorithm::pso: return "pso";
    case Algorithm::emna: return "emna";
    case Algorithm::dcma: return "dcma";
    case Algorithm::nelder_mead: return "nelder_mead";
  }
  return "?";
}

inline std::string_view to_string(Init i) noexcept {
  return i == Init::uniform ? "uniform" : "origin_gaussian";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) noexcept {
  for (auto a : {Algorithm::de, Algorithm::pso, Algorithm::emna, Algorithm::dcma, Algorithm::nelder_mead})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

inline std::optional<Init> parse_init(std::string_view s) noexcept {
  if (s == "uniform") return Init::uniform;
  if (s == "origin_gaussian") return Init::origin_gaussian;
  return std::nullopt;
}

struct AlgorithmConfig {
  Algorithm name = Algorithm::dcma;
  std::string label;         // output name; defaults to the algorithm name
  int population_size = 0;   // ignored by dcma (lambda = 4 + floor(3 ln D)) and nelder_mead
  double sigma0 = 0.3;       // dcma initial step size
  Init init = Init::origin_gaussian;

  double de_f = 0.5;
  double de_cr = 0.9;
  double pso_w = 0.729;
  double pso_c1 = 1.49;
  double pso_c2 = 1.49;
  double emna_selection = 0.25;

  /// Frozen defaults per algorithm.
  static AlgorithmConfig defaults(Algorithm a) {
    AlgorithmConfig c;
    c.name = a;
    c.label = std::string(to_string(a));
    switch (a) {
      case Algorithm::de: c.population_size = 30; c.init = Init::uniform; break;
      case Algorithm::pso: c.population_size = 40; c.init = Init::uniform; break;
      case Algorithm::emna: c.population_size = 40; break;
      case Algorithm::dcma: break;
      case Algorithm::nelder_mead: break;
    }
    return c;
  }

  std::string display_name() const { return label.empty() ? std::string(to_string(name)) : label; }

  void validate() const {
    if (!(sigma0 > 0.0)) throw ConfigError("sigma0 must be positive");
    const bool population_based = name == Algorithm::de || name == Algorithm::pso || name == Algorithm::emna;
    if (population_based && population_size < 1)
      throw ConfigError(display_name() + ": population_size must be positive");
    if (name == Algorithm::de && population_size < 4)
      throw ConfigError(display_name() + ": de needs population_size >= 4");
    if (name == Algorithm::emna && population_size < 4)
      throw ConfigError(display_name() + ": emna needs population_size >= 4");
    if (!(emna_selection > 0.0 && emna_selection <= 1.0))
      throw ConfigError(display_name() + ": emna selection ratio must be in (0, 1]");
  }

  friend bool operator==(const AlgorithmConfig&, const AlgorithmConfig&) = default;
};

struct TraceEvent {
  std::int64_t evaluations;
  double best_value;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct RunTrace {
  std::vector<TraceEvent> events;
  std::int64_t budget = 0;
  double final_best = std::numeric_limits<double>::infinity();
  Vector final_best_point;

  friend bool operator==(const RunTrace& a, const RunTrace& b) {
    return a.events == b.events && a.budget == b.budget && a.final_best == b.final_best &&
           a.final_best_point.size() == b.final_best_point.size() &&
           a.final_best_point == b.final_best_point;
  }
};

inline int dcma_lambda(int dimension) {
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(dimension))));
}

/// Smallest budget `run_algorithm` accepts for this configuration.
inline std::int64_t minimum_budget(const AlgorithmConfig& c, int dimension) {
  switch (c.name) {
    case Algorithm::de:
    case Algorithm::pso:
    case Algorithm::emna: return c.population_size;
    case Algorithm::dcma: return dcma_lambda(dimension);
    case Algorithm::nelder_mead: return dimension + 1;
  }
  return 1;
}

namespace detail {

struct BudgetExhausted {};

template <EvaluableProblem P>
class Tracker {
 public:
  Tracker(const P& problem, std::int64_t budget) : problem_(problem) {
    trace_.budget = budget;
  }

  double operator()(const Vector& x) {
    if (used_ >= trace_.budget) throw BudgetExhausted{};
    const double v = problem_(x);
    ++used_;
    if (v < trace_.final_best) {
      trace_.final_best = v;
      trace_.final_best_point = x;
      trace_.events.push_back({used_, v});
    }
    return v;
  }

  std::int64_t remaining() const noexcept { return trace_.budget - used_; }
  RunTrace take() && { return std::move(trace_); }

 private:
  const P& problem_;
  std::int64_t used_ = 0;
  RunTrace trace_;
};

inline Vector uniform_point(Stream& rng, int d) {
  Vector x(d);
  for (int i = 0; i < d; ++i) x[i] = rng.uniform(-kDomainBound, kDomainBound);
  return x;
}

inline Vector gaussian_vector(Stream& rng, int d) {
  Vector x(d);
  for (int i = 0; i < d; ++i) x[i] = rng.gaussian();
  return x;
}

/// Population initialization: uniform in the domain, or N(0, 2.5^2 I).
inline Vector initial_member(Stream& rng, int d, Init init) {
  return init == Init::uniform ? uniform_point(rng, d) : Vector(2.5 * gaussian_vector(rng, d));
}

/// Single starting point: uniform in the domain, or the origin.
inline Vector initial_center(Stream& rng, int d, Init init) {
  return init == Init::uniform ? uniform_point(rng, d) : Vector(Vector::Zero(d));
}

inline std::vector<int> argsort(const std::vector<double>& f) {
  std::vector<int> idx(f.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
  return idx;
}

// DE/rand/1/bin with synchronous generational replacement.
template <class Eval>
void differential_evolution(const AlgorithmConfig& c, int d, Eval& eval, Stream& rng) {
  const int np = c.population_size;
  std::vector<Vector> pop(np);
  std::vector<double> fit(np);
  for (int i = 0; i < np; ++i) {
    pop[i] = initial_member(rng, d, c.init);
    fit[i] = eval(pop[i]);
  }
  std::vector<Vector> next = pop;
  std::vector<double> next_fit = fit;
  Vector trial(d);
  for (;;) {
    for (int i = 0; i < np; ++i) {
      int r1, r2, r3;
      do r1 = static_cast<int>(rng.below(np)); while (r1 == i);
      do r2 = static_cast<int>(rng.below(np)); while (r2 == i || r2 == r1);
      do r3 = static_cast<int>(rng.below(np)); while (r3 == i || r3 == r1 || r3 == r2);
      const int jrand = static_cast<int>(rng.below(d));
      for (int j = 0; j < d; ++j) {
        const bool cross = rng.uniform() < c.de_cr || j == jrand;
        trial[j] = cross ? pop[r1][j] + c.de_f * (pop[r2][j] - pop[r3][j]) : pop[i][j];
      }
      const double ft = eval(trial);
      if (ft <= fit[i]) {
        next[i] = trial;
        next_fit[i] = ft;
      } else {
        next[i] = pop[i];
        next_fit[i] = fit[i];
      }
    }
    pop.swap(next);
    fit.swap(next_fit);
  }
}

// Global-best PSO with inertia weight and velocity clamping.
template <class Eval>
void particle_swarm(const AlgorithmConfig& c, int d, Eval& eval, Stream& rng) {
  const int np = c.population_size;
  const double vmax = kDomainBound;  // half the domain range
  std::vector<Vector> x(np), v(np), pbest(np);
  std::vector<double> pbest_f(np);
  Vector gbest;
  double gbest_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < np; ++i) {
    x[i] = initial_member(rng, d, c.init);
    v[i] = ((uniform_point(rng, d) - x[i]) / 2.0).cwiseMax(-vmax).cwiseMin(vmax);
  }
  for (int i = 0; i < np; ++i) {
    pbest[i] = x[i];
    pbest_f[i] = eval(x[i]);
    if (pbest_f[i] < gbest_f) {
      gbest_f = pbest_f[i];
      gbest = x[i];
    }
  }
  for (;;) {
    for (int i = 0; i < np; ++i) {
      for (int j = 0; j < d; ++j) {
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        double vj = c.pso_w * v[i][j] + c.pso_c1 * r1 * (pbest[i][j] - x[i][j]) +
                    c.pso_c2 * r2 * (gbest[j] - x[i][j]);
        v[i][j] = std::clamp(vj, -vmax, vmax);
      }
      x[i] += v[i];
      const double f = eval(x[i]);
      if (f < pbest_f[i]) {
        pbest_f[i] = f;
        pbest[i] = x[i];
        if (f < gbest_f) {
          gbest_f = f;
          gbest = x[i];
        }
      }
    }
  }
}

// EMNA-global: full-covariance Gaussian refit on the selected quarter.
template <class Eval>
void emna(const AlgorithmConfig& c, int d, Eval& eval, Stream& rng) {
  const int lambda = c.population_size;
  const int mu = std::max(1, static_cast<int>(std::floor(c.emna_selection * lambda)));
  Vector mean = Vector::Zero(d);
  Matrix cov = 2.5 * 2.5 * Matrix::Identity(d, d);
  std::vector<Vector> pop(lambda);
  std::vector<double> fit(lambda);
  bool first = true;
  for (;;) {
    Matrix chol;
    {
      Eigen::LLT<Matrix> llt(cov);
      double jitter = 1e-10;
      while (llt.info() != Eigen::Success) {
        cov += jitter * Matrix::Identity(d, d);
        jitter *= 10.0;
        llt.compute(cov);
      }
      chol = llt.matrixL();
    }
    for (int k = 0; k < lambda; ++k) {
      if (first && c.init == Init::uniform)
        pop[k] = uniform_point(rng, d);
      else
        pop[k] = mean + chol * gaussian_vector(rng, d);
      fit[k] = eval(pop[k]);
    }
    first = false;
    const auto order = argsort(fit);
    mean.setZero();
    for (int k = 0; k < mu; ++k) mean += pop[order[k]];
    mean /= mu;
    cov.setZero();
    for (int k = 0; k < mu; ++k) {
      const Vector dev = pop[order[k]] - mean;
      cov.noalias() += dev * dev.transpose();
    }
    cov /= mu;
    cov += 1e-10 * Matrix::Identity(d, d);
  }
}

// (mu/mu_w, lambda)-ES with diagonal covariance (separable CMA learning rates)
// and cumulative step-size adaptation.
template <class Eval>
void diagonal_cma(const AlgorithmConfig& c, int d, Eval& eval, Stream& rng) {
  const double n = d;
  const int lambda = dcma_lambda(d);
  const int mu = lambda / 2;
  Vector w(mu);
  for (int i = 0; i < mu; ++i) w[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  w /= w.sum();
  const double mu_eff = 1.0 / w.squaredNorm();

  const double c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
  const double d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma;
  const double c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
  const double sep = (n + 2.0) / 3.0;
  double c_1 = sep * 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
  double c_mu = sep * 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0) * (n + 2.0) + mu_eff);
  c_1 = std::min(c_1, 1.0);
  c_mu = std::min(c_mu, 1.0 - c_1);
  const double chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  Vector mean = initial_center(rng, d, c.init);
  double sigma = c.sigma0;
  Vector diag_c = Vector::Ones(d);
  Vector p_sigma = Vector::Zero(d);
  Vector p_c = Vector::Zero(d);

  std::vector<Vector> z(lambda), y(lambda);
  std::vector<double> fit(lambda);
  for (long gen = 1;; ++gen) {
    const Vector scale = diag_c.cwiseSqrt();
    for (int k = 0; k < lambda; ++k) {
      z[k] = gaussian_vector(rng, d);
      y[k] = scale.cwiseProduct(z[k]);
      fit[k] = eval(Vector(mean + sigma * y[k]));
    }
    const auto order = argsort(fit);
    Vector y_w = Vector::Zero(d);
    Vector z_w = Vector::Zero(d);
    for (int i = 0; i < mu; ++i) {
      y_w += w[i] * y[order[i]];
      z_w += w[i] * z[order[i]];
    }
    mean += sigma * y_w;

    p_sigma = (1.0 - c_sigma) * p_sigma + std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * z_w;
    const double ps_norm = p_sigma.norm();
    const double h_denom = std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * gen));
    const bool h_sigma = ps_norm / h_denom < (1.4 + 2.0 / (n + 1.0)) * chi_n;
    p_c = (1.0 - c_c) * p_c + (h_sigma ? std::sqrt(c_c * (2.0 - c_c) * mu_eff) : 0.0) * y_w;

    Vector rank_mu = Vector::Zero(d);
    for (int i = 0; i < mu; ++i) rank_mu += w[i] * y[order[i]].cwiseAbs2();
    const double h_corr = h_sigma ? 0.0 : c_c * (2.0 - c_c);
    diag_c = (1.0 - c_1 - c_mu) * diag_c + c_1 * (p_c.cwiseAbs2() + h_corr * diag_c) + c_mu * rank_mu;

    sigma *= std::exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0));
    sigma = std::clamp(sigma, 1e-300, 1e300);
  }
}

// Nelder-Mead with standard coefficients (1, 2, 0.5, 0.5); restarts from a
// fresh initial point once the simplex collapses.
template <class Eval>
void nelder_mead(const AlgorithmConfig& c, int d, Eval& eval, Stream& rng) {
  const int nv = d + 1;
  std::vector<Vector> s(nv);
  std::vector<double> f(nv);

  auto start = [&] {
    const Vector x0 = c.init == Init::uniform ? uniform_point(rng, d) : gaussian_vector(rng, d);
    s[0] = x0;
    f[0] = eval(s[0]);
    for (int i = 1; i < nv; ++i) {
      s[i] = x0;
      s[i][i - 1] += 1.0;
      f[i] = eval(s[i]);
    }
  };

  start();
  for (;;) {
    const auto order = argsort(f);
    {
      std::vector<Vector> s2(nv);
      std::vector<double> f2(nv);
      for (int i = 0; i < nv; ++i) {
        s2[i] = s[order[i]];
        f2[i] = f[order[i]];
      }
      s.swap(s2);
      f.swap(f2);
    }
    double diameter = 0.0;
    for (int i = 1; i < nv; ++i) diameter = std::max(diameter, (s[i] - s[0]).norm());
    if (diameter < 1e-12) {
      start();
      continue;
    }

    Vector centroid = Vector::Zero(d);
    for (int i = 0; i < d; ++i) centroid += s[i];
    centroid /= d;
    const Vector& worst = s[d];

    const Vector xr = centroid + (centroid - worst);
    const double fr = eval(xr);
    if (fr < f[0]) {
      const Vector xe = centroid + 2.0 * (centroid - worst);
      const double fe = eval(xe);
      if (fe < fr) {
        s[d] = xe;
        f[d] = fe;
      } else {
        s[d] = xr;
        f[d] = fr;
      }
      continue;
    }
    if (fr < f[d - 1]) {
      s[d] = xr;
      f[d] = fr;
      continue;
    }
    bool accepted = false;
    if (fr < f[d]) {
      const Vector xc = centroid + 0.5 * (xr - centroid);
      const double fc = eval(xc);
      if (fc <= fr) {
        s[d] = xc;
        f[d] = fc;
        accepted = true;
      }
    } else {
      const Vector xc = centroid + 0.5 * (worst - centroid);
      const double fc = eval(xc);
      if (fc < f[d]) {
        s[d] = xc;
        f[d] = fc;
        accepted = true;
      }
    }
    if (!accepted) {
      for (int i = 1; i < nv; ++i) {
        s[i] = s[0] + 0.5 * (s[i] - s[0]);
        f[i] = eval(s[i]);
      }
    }
  }
}

}  // namespace detail

/// Runs one optimizer until the budget is spent. The result is a deterministic
/// function of (config, problem, budget, seed).
template <EvaluableProblem P>
RunTrace run_algorithm(const AlgorithmConfig& config, const P& problem, std::int64_t budget,
                       std::uint64_t seed) {
  config.validate();
  const int d = problem.dimension();
  if (budget < 1) throw ConfigError("budget must be positive");
  if (budget < minimum_budget(config, d))
    throw ConfigError(config.display_name() + ": budget " + std::to_string(budget) +
                      " is below the minimum of " + std::to_string(minimum_budget(config, d)));

  detail::Tracker<P> tracker(problem, budget);
  Stream rng(seed);
  try {
    switch (config.name) {
      case Algorithm::de: detail::differential_evolution(config, d, tracker, rng); break;
      case Algorithm::pso: detail::particle_swarm(config, d, tracker, rng); break;
      case Algorithm::emna: detail::emna(config, d, tracker, rng); break;
      case Algorithm::dcma: detail::diagonal_cma(config, d, tracker, rng); break;
      case Algorithm::nelder_mead: detail::nelder_mead(config, d, tracker, rng); break;
    }
  } catch (const detail::BudgetExhausted&) {
  }
  return std::move(tracker).take();
}

}  // namespace affbench
