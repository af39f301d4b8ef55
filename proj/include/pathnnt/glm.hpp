#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>

#include <Eigen/Core>

#include "pathnnt/links.hpp"
#include "pathnnt/types.hpp"

namespace pathnnt {

/// Stack-allocated coefficient/score vector (at most 4 entries).
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;
using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, 4>;

enum class Covariate { kIntercept, kExposure, kMediator, kConfounder };
enum class Response { kOutcome, kMediator };

/// A binary regression: which record field is the response and which
/// covariate roles, in order, form the design row. The two canonical
/// models are the mediator model M ~ (1, A, L) and the conditional outcome
/// model I ~ (1, A, M, L).
struct GlmSpec {
  LinkFamily family = LinkFamily::kLogit;
  std::array<Covariate, 4> roles{};
  int n_roles = 0;
  Response response = Response::kOutcome;

  static GlmSpec outcome_model(LinkFamily f) {
    return custom(f,
                  {Covariate::kIntercept, Covariate::kExposure, Covariate::kMediator,
                   Covariate::kConfounder},
                  Response::kOutcome);
  }
  static GlmSpec mediator_model(LinkFamily f) {
    return custom(f, {Covariate::kIntercept, Covariate::kExposure, Covariate::kConfounder},
                  Response::kMediator);
  }
  static GlmSpec custom(LinkFamily f, std::initializer_list<Covariate> design,
                        Response response);

  int dim() const { return n_roles; }

  void fill_design(const ObservationRecord& r, double* x) const {
    for (int k = 0; k < n_roles; ++k) {
      switch (roles[k]) {
        case Covariate::kIntercept: x[k] = 1.0; break;
        case Covariate::kExposure: x[k] = static_cast<double>(r.exposure); break;
        case Covariate::kMediator: x[k] = static_cast<double>(r.mediator); break;
        case Covariate::kConfounder: x[k] = r.confounder; break;
      }
    }
  }

  double response_of(const ObservationRecord& r) const {
    return static_cast<double>(response == Response::kOutcome ? r.outcome : r.mediator);
  }
};

struct GlmFit {
  SmallVec coefficients;
  bool converged = false;
  std::size_t iterations = 0;
  double max_score_norm = 0.0;  // inf-norm of the summed score at the result
};

/// Per-record score contribution. For the logit link this is the canonical
/// (y - mu) x; for probit it is the maximum-likelihood score
/// x * pdf * (y - cdf) / (cdf (1 - cdf)).
/// Throws std::invalid_argument when coeffs.size() != spec.dim().
SmallVec score(const GlmSpec& spec, const SmallVec& coeffs, const ObservationRecord& record);

/// Log-likelihood of the whole dataset under the spec.
double log_likelihood(const GlmSpec& spec, const SmallVec& coeffs, const Dataset& data);

/// Fisher-scoring / IRLS fit with step halving.
///
/// Converged means the relative coefficient step dropped below tol AND the
/// summed score inf-norm is below 1e-9 * n. A fit that hits max_iter, or
/// that walked into a separated region (|linear predictor| > 30 with the
/// likelihood still climbing), is returned with converged = false rather
/// than as huge coefficients.
///
/// Throws EmptyGroup or RankDeficientDesign.
GlmFit fit(const GlmSpec& spec, const Dataset& data, const SmallVec& init,
           std::size_t max_iter = 100, double tol = 1e-10);

/// fit() starting from the zero vector.
GlmFit fit(const GlmSpec& spec, const Dataset& data);

}  // namespace pathnnt
