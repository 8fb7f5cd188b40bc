#ifndef FOPT_SIMULATE_HPP
#define FOPT_SIMULATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fopt/errors.hpp"
#include "fopt/process.hpp"
#include "fopt/rng.hpp"

namespace fopt {

// ---------------------------------------------------------------------------
// Path generation.  Attack-level detail (strike times, per-strike batches,
// per-node weights) is generated window by window and aggregated, which
// matches the compound per-window increment law exactly without storing the
// underlying point process.
// ---------------------------------------------------------------------------

struct PathRealization {
  std::vector<double> obs_times;    // tau_0, tau_1, ...
  std::vector<long long> node_cum;  // N_0, N_1, ...
  std::vector<double> weight_cum;   // W_0, W_1, ...
  std::size_t stopped_at = 0;       // index of last generated observation
  bool horizon_exhausted = false;   // no crossing within the horizon
};

// Nodes and weight contributed by one observation window of length dt.
inline std::pair<long long, double> window_increment(const ProcessParams& p,
                                                     double dt, RngStream& rng) {
  long long nodes = 0;
  double weight = 0.0;
  long long strikes = rng.poisson(p.lambda * dt);
  for (long long k = 0; k < strikes; ++k) {
    long long batch = sample(p.node_law, rng);
    nodes += batch;
    for (long long j = 0; j < batch; ++j) weight += sample(p.weight_law, rng);
  }
  return {nodes, weight};
}

inline PathRealization simulate_path(const ProcessParams& p, RngStream& rng,
                                     std::size_t horizon = 1000000) {
  if (horizon < 1) throw std::invalid_argument("simulate_path: horizon >= 1");
  PathRealization path;
  path.obs_times.reserve(16);
  path.node_cum.reserve(16);
  path.weight_cum.reserve(16);

  double tau = sample(p.delay_law, rng);
  auto [n0, w0] = window_increment(p, tau, rng);
  path.obs_times.push_back(tau);
  path.node_cum.push_back(n0);
  path.weight_cum.push_back(w0);

  long long nodes = n0;
  double weight = w0;
  std::size_t n = 0;
  while (nodes <= p.thresholds.m && weight <= p.thresholds.v) {
    if (n + 1 >= horizon) {
      path.horizon_exhausted = true;
      break;
    }
    ++n;
    double dt = sample(p.obs_law, rng);
    tau += dt;
    auto [x, y] = window_increment(p, dt, rng);
    nodes += x;
    weight += y;
    path.obs_times.push_back(tau);
    path.node_cum.push_back(nodes);
    path.weight_cum.push_back(weight);
  }
  path.stopped_at = path.obs_times.size() - 1;
  return path;
}

// ---------------------------------------------------------------------------
// Crossing detection.  Exit indices use the strict definitions
//   mu1 = inf{n : N_n > m1},  mu = inf{n : N_n > m},  nu = inf{n : W_n > v},
// and rho = min(mu, nu).  A path generated with stop-at-crossing semantics
// resolves rho and whichever of mu/nu fired; the other may be unknown.
// ---------------------------------------------------------------------------

struct StateTriple {
  long long nodes = 0;
  double weight = 0.0;
  double time = 0.0;
};

enum class OrderingClass { MuLtNu, MuEqNu, MuGtNu };

struct CrossingSummary {
  std::optional<std::size_t> mu1, mu, nu;
  std::size_t rho = 0;
  OrderingClass ordering = OrderingClass::MuLtNu;
  bool aux_first = false;  // mu1 < min(mu, nu)

  StateTriple at_mu1_prev, at_mu1;
  StateTriple at_rho_prev, at_rho;
};

namespace detail {

inline StateTriple state_at(const PathRealization& path, std::size_t i) {
  return {path.node_cum[i], path.weight_cum[i], path.obs_times[i]};
}

// Pre-crossing state; index-0 crossings report the pre-initial state (0,0,0).
inline StateTriple state_before(const PathRealization& path, std::size_t i) {
  if (i == 0) return {0, 0.0, 0.0};
  return state_at(path, i - 1);
}

}  // namespace detail

inline CrossingSummary summarize_crossings(const PathRealization& path,
                                           const Thresholds& t) {
  CrossingSummary s;
  const std::size_t len = path.obs_times.size();
  for (std::size_t i = 0; i < len; ++i) {
    if (!s.mu1 && path.node_cum[i] > t.m1) s.mu1 = i;
    if (!s.mu && path.node_cum[i] > t.m) s.mu = i;
    if (!s.nu && path.weight_cum[i] > t.v) s.nu = i;
    if (s.mu || s.nu) break;
  }
  if (!s.mu && !s.nu)
    throw NotReachedError("summarize_crossings: no crossing within path");

  s.rho = s.mu ? (s.nu ? std::min(*s.mu, *s.nu) : *s.mu) : *s.nu;
  bool node_crossed = path.node_cum[s.rho] > t.m;
  bool weight_crossed = path.weight_cum[s.rho] > t.v;
  s.ordering = node_crossed ? (weight_crossed ? OrderingClass::MuEqNu
                                              : OrderingClass::MuLtNu)
                            : OrderingClass::MuGtNu;

  s.at_rho = detail::state_at(path, s.rho);
  s.at_rho_prev = detail::state_before(path, s.rho);
  if (s.mu1 && *s.mu1 <= s.rho) {
    s.aux_first = *s.mu1 < s.rho;
    s.at_mu1 = detail::state_at(path, *s.mu1);
    s.at_mu1_prev = detail::state_before(path, *s.mu1);
  } else {
    s.mu1.reset();  // not reached before the path stopped
  }
  return s;
}

// ---------------------------------------------------------------------------
// Monte Carlo estimation of the joint functionals.
// ---------------------------------------------------------------------------

enum class PhiEvent {
  WholeSpace,   // no indicator
  MuLtNu,       // node threshold crossed first
  MuEqNu,       // both crossed at the same observation
  MuGtNu,       // weight threshold crossed first
  Mu1First,     // mu1 < min(mu, nu)
  Mu1MuLtNu,    // mu1 < mu < nu
  Mu1MuEqNu,    // mu1 < mu = nu
  Mu1NuLtMu,    // mu1 < nu < mu
};

inline const char* to_string(PhiEvent e) {
  switch (e) {
    case PhiEvent::WholeSpace: return "whole_space";
    case PhiEvent::MuLtNu: return "mu_lt_nu";
    case PhiEvent::MuEqNu: return "mu_eq_nu";
    case PhiEvent::MuGtNu: return "mu_gt_nu";
    case PhiEvent::Mu1First: return "mu1_first";
    case PhiEvent::Mu1MuLtNu: return "mu1_mu_lt_nu";
    case PhiEvent::Mu1MuEqNu: return "mu1_mu_eq_nu";
    case PhiEvent::Mu1NuLtMu: return "mu1_nu_lt_mu";
  }
  return "?";
}

struct EstimatorResult {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  std::size_t exhausted = 0;
};

struct EstimatorOptions {
  std::size_t horizon = 1000000;
  double max_exhausted_frac = 0.001;
  unsigned threads = 0;  // 0 = hardware concurrency
};

namespace detail {

// Order-independent reduction: recursive pairwise sum over a fixed array.
inline double pairwise_sum(const std::vector<double>& v, std::size_t lo,
                           std::size_t hi) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline bool event_holds(const CrossingSummary& s, PhiEvent e) {
  switch (e) {
    case PhiEvent::WholeSpace: return true;
    case PhiEvent::MuLtNu: return s.ordering == OrderingClass::MuLtNu;
    case PhiEvent::MuEqNu: return s.ordering == OrderingClass::MuEqNu;
    case PhiEvent::MuGtNu: return s.ordering == OrderingClass::MuGtNu;
    case PhiEvent::Mu1First: return s.aux_first;
    case PhiEvent::Mu1MuLtNu:
      return s.aux_first && s.ordering == OrderingClass::MuLtNu;
    case PhiEvent::Mu1MuEqNu:
      return s.aux_first && s.ordering == OrderingClass::MuEqNu;
    case PhiEvent::Mu1NuLtMu:
      return s.aux_first && s.ordering == OrderingClass::MuGtNu;
  }
  return false;
}

inline bool event_uses_aux(PhiEvent e) {
  return e == PhiEvent::Mu1First || e == PhiEvent::Mu1MuLtNu ||
         e == PhiEvent::Mu1MuEqNu || e == PhiEvent::Mu1NuLtMu;
}

// Real-argument integrand over one summarized path.  All exponential slots
// are combined into a single exponent first; the interval-transform query
// uses theta = -h, where separate factors could overflow even though the
// combined exponent is nonpositive.
inline double phi_integrand(const CrossingSummary& s, const TransformArgs& a,
                            PhiEvent e) {
  if (!event_holds(s, e)) return 0.0;
  auto powr = [](double base, long long k) {
    if (base == 1.0) return 1.0;
    return std::pow(base, static_cast<double>(k));
  };
  double powers = powr(a.alpha0.real(), s.at_rho_prev.nodes) *
                  powr(a.alpha.real(), s.at_rho.nodes);
  double expo = -a.beta0.real() * s.at_rho_prev.weight -
                a.beta.real() * s.at_rho.weight -
                a.h0.real() * s.at_rho_prev.time - a.h.real() * s.at_rho.time;
  if (event_uses_aux(e)) {
    powers *= powr(a.u0.real(), s.at_mu1_prev.nodes) *
              powr(a.u.real(), s.at_mu1.nodes);
    expo += -a.v0.real() * s.at_mu1_prev.weight -
            a.v.real() * s.at_mu1.weight -
            a.theta0.real() * s.at_mu1_prev.time -
            a.theta.real() * s.at_mu1.time;
  }
  return powers * std::exp(expo);
}

}  // namespace detail

// Monte Carlo estimate of the functional restricted to an event.  The result
// is a pure function of (seed, params, args, event, n_paths): each path has
// its own counter-derived substream and accumulation is pairwise over the
// path-indexed array, so worker count cannot change the output.
inline EstimatorResult estimate_phi(const ProcessParams& p,
                                    const TransformArgs& args, PhiEvent event,
                                    std::size_t n_paths, std::uint64_t seed,
                                    const EstimatorOptions& opt = {}) {
  p.validate(detail::event_uses_aux(event));
  if (n_paths == 0) throw std::invalid_argument("estimate_phi: n_paths >= 1");

  std::vector<double> vals(n_paths, 0.0);
  std::vector<std::uint8_t> exhausted(n_paths, 0);

  auto worker = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      RngStream rng(seed, i);
      PathRealization path = simulate_path(p, rng, opt.horizon);
      if (path.horizon_exhausted) {
        exhausted[i] = 1;
        vals[i] = 0.0;  // unresolved paths score the indicator as 0
        continue;
      }
      CrossingSummary s = summarize_crossings(path, p.thresholds);
      vals[i] = detail::phi_integrand(s, args, event);
    }
  };

  unsigned threads = opt.threads ? opt.threads : std::thread::hardware_concurrency();
  if (threads <= 1 || n_paths < 1024) {
    worker(0, n_paths);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (n_paths + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      std::size_t lo = t * chunk;
      std::size_t hi = std::min(n_paths, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  std::size_t n_exhausted = 0;
  for (auto f : exhausted) n_exhausted += f;
  if (static_cast<double>(n_exhausted) >
      opt.max_exhausted_frac * static_cast<double>(n_paths)) {
    throw NotReachedError("estimate_phi: " + std::to_string(n_exhausted) +
                          " of " + std::to_string(n_paths) +
                          " paths exhausted the horizon");
  }

  double sum = detail::pairwise_sum(vals, 0, n_paths);
  for (auto& v : vals) v *= v;
  double sumsq = detail::pairwise_sum(vals, 0, n_paths);

  EstimatorResult r;
  r.n_paths = n_paths;
  r.seed = seed;
  r.exhausted = n_exhausted;
  r.value = sum / static_cast<double>(n_paths);
  double var = 0.0;
  if (n_paths > 1) {
    var = (sumsq - static_cast<double>(n_paths) * r.value * r.value) /
          static_cast<double>(n_paths - 1);
    var = std::max(var, 0.0);
  }
  r.std_error = std::sqrt(var / static_cast<double>(n_paths));
  return r;
}

// ---------------------------------------------------------------------------
// Parameter sweeps.  Each grid point gets an independent derived substream,
// so inserting or removing points never perturbs its neighbours.
// ---------------------------------------------------------------------------

enum class SweepAxis { M1, M, V, Lambda };

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::M1: return "m1";
    case SweepAxis::M: return "m";
    case SweepAxis::V: return "v";
    case SweepAxis::Lambda: return "lambda";
  }
  return "?";
}

struct SweepRow {
  double axis_value = 0.0;
  EstimatorResult estimate;
};

inline ProcessParams with_axis_value(ProcessParams p, SweepAxis axis, double x) {
  switch (axis) {
    case SweepAxis::M1: p.thresholds.m1 = static_cast<long long>(x); break;
    case SweepAxis::M: p.thresholds.m = static_cast<long long>(x); break;
    case SweepAxis::V: p.thresholds.v = x; break;
    case SweepAxis::Lambda: p.lambda = x; break;
  }
  return p;
}

inline std::vector<SweepRow> sweep(const ProcessParams& p,
                                   const TransformArgs& args, PhiEvent event,
                                   SweepAxis axis, const std::vector<double>& grid,
                                   std::size_t n_paths, std::uint64_t seed,
                                   const EstimatorOptions& opt = {}) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ProcessParams pi = with_axis_value(p, axis, grid[i]);
    pi.validate(detail::event_uses_aux(event));
    std::uint64_t sub = seed ^ (0xd1342543de82ef95ULL * (i + 1));
    rows.push_back({grid[i], estimate_phi(pi, args, event, n_paths, sub, opt)});
  }
  return rows;
}

}  // namespace fopt

#endif  // FOPT_SIMULATE_HPP
