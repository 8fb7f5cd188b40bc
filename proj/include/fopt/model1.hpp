#ifndef FOPT_MODEL1_HPP
#define FOPT_MODEL1_HPP

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

#include "fopt/process.hpp"
#include "fopt/special.hpp"

namespace fopt {

struct Model1Params {
  double lambda = 1.0;
  double c = 1.0;                          // inter-observation constant
  std::vector<double> p = {1.0};           // batch-size probabilities, sizes 1..R
  double alpha_w = 1.0;                    // gamma weight shape
  double xi = 1.0;                         // gamma weight rate
  long long m1 = 1;
  long long m = 2;
  double v = 1.0;

  int R() const { return static_cast<int>(p.size()); }

  void validate() const {
    if (lambda <= 0.0) throw std::invalid_argument("model1: lambda > 0 required");
    if (c <= 0.0) throw std::invalid_argument("model1: c > 0 required");
    if (p.empty()) throw std::invalid_argument("model1: p must be nonempty");
    double sum = 0.0;
    for (double pi : p) {
      if (pi < 0.0) throw std::invalid_argument("model1: negative probability");
      sum += pi;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("model1: p must sum to 1");
    if (alpha_w <= 0.0 || xi <= 0.0)
      throw std::invalid_argument("model1: weight shape and rate must be > 0");
    if (m1 < 1) throw std::invalid_argument("model1: m1 >= 1 required");
    if (m <= m1) throw std::invalid_argument("model1: m > m1 required");
    if (v < 0.0) throw std::invalid_argument("model1: v >= 0 required");
  }

  ProcessParams to_process_params() const {
    ProcessParams pp;
    pp.lambda = lambda;
    pp.node_law = FiniteDiscrete{p};
    pp.weight_law = GammaWeight{alpha_w, xi};
    pp.obs_law = ConstantObs{c};
    pp.delay_law = ZeroDelay{};
    pp.thresholds = {m1, m, v};
    return pp;
  }
};

// Evaluator with the composition-sum weights memoized across calls; a sweep
// over (u, v) at fixed theta reuses both coefficient families.
class Model1Evaluator {
 public:
  explicit Model1Evaluator(Model1Params mp) : mp_(std::move(mp)) {
    mp_.validate();
  }

  const Model1Params& params() const { return mp_; }

  // E_j: coefficient of (u l y)^j in exp(c lambda g(u l y)).  Summed over the
  // number of strikes j - r with node total j.
  double coeff_E(long long j) {
    if (j < 0) return 0.0;
    while (static_cast<long long>(e_cache_.size()) <= j) {
      long long n = static_cast<long long>(e_cache_.size());
      double acc = 0.0;
      double clam = mp_.c * mp_.lambda;
      long long rmax = (mp_.R() - 1) * n / mp_.R();
      for (long long r = 0; r <= rmax; ++r)
        acc += std::pow(clam, double(n - r)) * wsum(n - r, n);
      e_cache_.push_back(acc);
    }
    return e_cache_[static_cast<std::size_t>(j)];
  }

  // F_j(theta): like E_j but each strike count j - r also carries the
  // lattice sum  sum_{i>=0} i^{j-r} x0^i  at x0 = e^{-c(theta+lambda)}.
  // The most recent theta's coefficients are kept, so sweeps over (u, v)
  // at a fixed theta reuse them.
  cd coeff_F(long long j, cd theta) {
    if (j < 0) return cd(0.0);
    if (!f_cache_valid_ || theta != f_theta_) {
      f_theta_ = theta;
      f_cache_.clear();
      f_cache_valid_ = true;
    }
    while (static_cast<long long>(f_cache_.size()) <= j)
      f_cache_.push_back(compute_F(static_cast<long long>(f_cache_.size()), theta));
    return f_cache_[static_cast<std::size_t>(j)];
  }

  // Joint transform at the observed auxiliary crossing on the event that it
  // precedes both critical crossings.
  cd joint_at_mu1(cd u, cd v, cd theta) {
    cd x0 = base_point(theta);
    if (std::abs(x0) >= 1.0)
      throw std::domain_error("model1: e^{-c(theta+lambda)} must be inside the unit disk");

    std::vector<double> E(mp_.m, 0.0);
    for (long long j = 0; j < mp_.m; ++j) E[j] = coeff_E(j);
    std::vector<cd> F(mp_.m1, cd(0.0));
    for (long long k = 0; k < mp_.m1; ++k) F[k] = coeff_F(k, theta);

    const double aw = mp_.alpha_w;
    cd y = (v + mp_.xi) * mp_.v;
    cd lfrac = mp_.xi / (v + mp_.xi);

    auto P = [&](double shape) -> cd {
      if (shape == 0.0) return cd(1.0);  // shape -> 0 limit for y > 0
      return reg_gamma_p(shape, y);
    };

    cd term1 = 0.0;
    cd uk = 1.0;
    for (long long k = 0; k < mp_.m1; ++k) {
      cd inner = 0.0;
      cd um = 1.0;
      for (long long mm = 0; mm <= mp_.m - 1 - k; ++mm) {
        double shape = aw * double(k + mm);
        inner += um * E[mm] * std::pow(lfrac, shape) * P(shape);
        um *= u;
      }
      term1 += uk * F[k] * inner;
      uk *= u;
    }

    cd term2 = 0.0;
    uk = 1.0;
    for (long long k = 0; k < mp_.m1; ++k) {
      cd conv = 0.0;
      for (long long n = 0; n <= k; ++n) conv += E[n] * F[k - n];
      double shape = aw * double(k);
      term2 += uk * std::pow(lfrac, shape) * P(shape) * conv;
      uk *= u;
    }

    return x0 * (term1 - term2);
  }

  double prob_mu1_first() { return joint_at_mu1(1.0, 0.0, 0.0).real(); }

 private:
  cd base_point(cd theta) const { return std::exp(-mp_.c * (theta + mp_.lambda)); }

  cd compute_F(long long j, cd theta) {
    cd x0 = base_point(theta);
    if (std::abs(x0) >= 1.0)
      throw std::domain_error("model1: e^{-c(theta+lambda)} must be inside the unit disk");
    cd acc = 0.0;
    double clam = mp_.c * mp_.lambda;
    long long rmax = (mp_.R() - 1) * j / mp_.R();
    for (long long r = 0; r <= rmax; ++r) {
      acc += std::pow(clam, double(j - r)) *
             power_weighted_geometric_sum(static_cast<int>(j - r), x0) *
             wsum(j - r, j);
    }
    return acc;
  }

  double wsum(long long total, long long weighted) {
    auto key = std::make_pair(total, weighted);
    auto it = wsum_cache_.find(key);
    if (it != wsum_cache_.end()) return it->second;
    double w = composition_weight_sum(mp_.R(), static_cast<int>(total),
                                      static_cast<int>(weighted), mp_.p);
    wsum_cache_.emplace(key, w);
    return w;
  }

  Model1Params mp_;
  std::map<std::pair<long long, long long>, double> wsum_cache_;
  std::vector<double> e_cache_;
  bool f_cache_valid_ = false;
  cd f_theta_ = 0.0;
  std::vector<cd> f_cache_;
};

inline cd model1_joint_at_mu1(const Model1Params& mp, cd u, cd v, cd theta) {
  Model1Evaluator ev(mp);
  return ev.joint_at_mu1(u, v, theta);
}

inline double model1_prob_mu1_first(const Model1Params& mp) {
  Model1Evaluator ev(mp);
  return ev.prob_mu1_first();
}

}  // namespace fopt

#endif  // FOPT_MODEL1_HPP
