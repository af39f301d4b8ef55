#include "pathnnt/glm.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "pathnnt/accumulate.hpp"
#include "pathnnt/errors.hpp"

namespace pathnnt {

namespace {

// Weight of the expected (Fisher) information at linear predictor t.
double info_weight(LinkFamily family, double t) {
  if (family == LinkFamily::kLogit) {
    return inv_link_deriv(family, t);
  }
  const double mu = inv_link(family, t);
  const double d = normal_pdf(t);
  return d * d / (mu * (1.0 - mu));
}

double record_log_likelihood(const GlmSpec& spec, const SmallVec& coeffs,
                             const ObservationRecord& r) {
  double x[4];
  spec.fill_design(r, x);
  double t = 0.0;
  for (int k = 0; k < spec.dim(); ++k) t += coeffs[k] * x[k];
  const double mu = inv_link(spec.family, t);
  return spec.response_of(r) == 1.0 ? std::log(mu) : std::log(1.0 - mu);
}

}  // namespace

GlmSpec GlmSpec::custom(LinkFamily f, std::initializer_list<Covariate> design,
                        Response response) {
  if (design.size() == 0 || design.size() > 4) {
    throw std::invalid_argument("a design needs between 1 and 4 covariate roles");
  }
  GlmSpec spec;
  spec.family = f;
  spec.response = response;
  spec.n_roles = static_cast<int>(design.size());
  int k = 0;
  for (Covariate c : design) spec.roles[k++] = c;
  return spec;
}

SmallVec score(const GlmSpec& spec, const SmallVec& coeffs, const ObservationRecord& record) {
  const int p = spec.dim();
  if (coeffs.size() != p) {
    throw std::invalid_argument("coefficient vector does not match the design dimension");
  }
  double x[4];
  spec.fill_design(record, x);
  double t = 0.0;
  for (int k = 0; k < p; ++k) t += coeffs[k] * x[k];
  const double y = spec.response_of(record);
  const double mu = inv_link(spec.family, t);

  double factor;
  if (spec.family == LinkFamily::kLogit) {
    factor = y - mu;
  } else {
    factor = normal_pdf(t) * (y - mu) / (mu * (1.0 - mu));
  }
  SmallVec s(p);
  for (int k = 0; k < p; ++k) s[k] = factor * x[k];
  return s;
}

double log_likelihood(const GlmSpec& spec, const SmallVec& coeffs, const Dataset& data) {
  return pairwise_sum_d(data.size(), [&](std::size_t i) {
    return record_log_likelihood(spec, coeffs, data.canonical(i));
  });
}

GlmFit fit(const GlmSpec& spec, const Dataset& data) {
  return fit(spec, data, SmallVec::Zero(spec.dim()));
}

GlmFit fit(const GlmSpec& spec, const Dataset& data, const SmallVec& init,
           std::size_t max_iter, double tol) {
  const int p = spec.dim();
  const std::size_t n = data.size();
  if (init.size() != p) {
    throw std::invalid_argument("init vector does not match the design dimension");
  }
  if (data.n0() == 0 || data.n1() == 0) {
    throw EmptyGroup("both exposure groups must be non-empty to fit a model");
  }

  // Reject collinear designs up front via the rank of X'X.
  {
    SmallMat xtx = pairwise_sum(std::size_t{0}, n, SmallMat(SmallMat::Zero(p, p)),
                                [&](std::size_t i) -> SmallMat {
                                  double x[4];
                                  spec.fill_design(data.canonical(i), x);
                                  Eigen::Map<const Eigen::VectorXd> xv(x, p);
                                  return SmallMat(xv * xv.transpose());
                                });
    Eigen::FullPivLU<Eigen::MatrixXd> lu{Eigen::MatrixXd(xtx)};
    if (lu.rank() < p) {
      throw RankDeficientDesign("design matrix is rank deficient");
    }
  }

  SmallVec coeffs = init;
  double loglik = log_likelihood(spec, coeffs, data);
  bool monotone_increase = true;
  GlmFit result;
  result.coefficients = coeffs;

  auto summed_score_and_info = [&](const SmallVec& c, SmallMat* info) {
    struct Acc {
      SmallVec s;
      SmallMat h;
      Acc& operator+=(const Acc& o) {
        s += o.s;
        h += o.h;
        return *this;
      }
    };
    Acc zero{SmallVec::Zero(p), SmallMat::Zero(p, p)};
    Acc total = pairwise_sum(std::size_t{0}, n, zero, [&](std::size_t i) {
      double x[4];
      spec.fill_design(data.canonical(i), x);
      double t = 0.0;
      for (int k = 0; k < p; ++k) t += c[k] * x[k];
      Eigen::Map<const Eigen::VectorXd> xv(x, p);
      Acc a{SmallVec(p), SmallMat(p, p)};
      const double y = spec.response_of(data.canonical(i));
      const double mu = inv_link(spec.family, t);
      const double factor = spec.family == LinkFamily::kLogit
                                ? y - mu
                                : normal_pdf(t) * (y - mu) / (mu * (1.0 - mu));
      a.s = factor * xv;
      a.h = info_weight(spec.family, t) * (xv * xv.transpose());
      return a;
    });
    if (info != nullptr) *info = total.h;
    return total.s;
  };

  std::size_t iter = 0;
  double score_norm = summed_score_and_info(coeffs, nullptr).template lpNorm<Eigen::Infinity>();
  bool step_converged = false;

  for (; iter < max_iter; ++iter) {
    SmallMat info(p, p);
    SmallVec s = summed_score_and_info(coeffs, &info);
    score_norm = s.template lpNorm<Eigen::Infinity>();

    Eigen::VectorXd step =
        Eigen::MatrixXd(info).ldlt().solve(Eigen::VectorXd(s));
    if (!step.allFinite()) {
      break;
    }

    // Step halving on likelihood decrease. The tolerance leaves room for
    // rounding wobble in the converged regime, where the exact step no
    // longer changes the likelihood measurably.
    constexpr double kAcceptTol = 1e-8;
    double t = 1.0;
    SmallVec candidate = coeffs + t * step;
    double cand_ll = log_likelihood(spec, candidate, data);
    int halvings = 0;
    while ((!std::isfinite(cand_ll) || cand_ll < loglik - kAcceptTol) && halvings < 40) {
      t *= 0.5;
      candidate = coeffs + t * step;
      cand_ll = log_likelihood(spec, candidate, data);
      ++halvings;
    }
    if (cand_ll < loglik - kAcceptTol) monotone_increase = false;

    const double rel_step =
        (candidate - coeffs).template lpNorm<Eigen::Infinity>() /
        std::max(1.0, candidate.template lpNorm<Eigen::Infinity>());
    coeffs = candidate;
    loglik = cand_ll;

    if (rel_step < tol) {
      score_norm =
          summed_score_and_info(coeffs, nullptr).template lpNorm<Eigen::Infinity>();
      step_converged = true;
      ++iter;
      break;
    }
  }

  if (!step_converged) {
    score_norm =
        summed_score_and_info(coeffs, nullptr).template lpNorm<Eigen::Infinity>();
  }

  // Separation shows up as a still-climbing likelihood with an extreme
  // linear predictor; report it as non-convergence instead of returning
  // runaway coefficients as a valid fit.
  bool separated = false;
  for (std::size_t i = 0; i < n && !separated; ++i) {
    double x[4];
    spec.fill_design(data.canonical(i), x);
    double t = 0.0;
    for (int k = 0; k < p; ++k) t += coeffs[k] * x[k];
    if (std::abs(t) > 30.0) separated = true;
  }
  separated = separated && monotone_increase;

  result.coefficients = coeffs;
  result.iterations = iter;
  result.max_score_norm = score_norm;
  result.converged = step_converged && !separated &&
                     score_norm < 1e-9 * static_cast<double>(n);
  return result;
}

}  // namespace pathnnt
