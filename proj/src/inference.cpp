#include "pathnnt/inference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "pathnnt/accumulate.hpp"
#include "pathnnt/effects.hpp"
#include "pathnnt/errors.hpp"
#include "pathnnt/glm.hpp"
#include "pathnnt/links.hpp"

namespace pathnnt {

namespace {

using Mat32 = Eigen::Matrix<double, layout::kDim, layout::kDim>;

// d/dt of the per-record score factor: the negative of this, times x x',
// is the observed-information contribution of one record.
double score_factor_slope(LinkFamily family, double t, double y) {
  if (family == LinkFamily::kLogit) {
    return -inv_link_deriv(family, t);
  }
  const double mu = inv_link(family, t);
  const double pdf = normal_pdf(t);
  const double denom = mu * (1.0 - mu);
  const double w = pdf / denom;
  const double w_slope = pdf * (-t * denom - pdf * (1.0 - 2.0 * mu)) / (denom * denom);
  return w_slope * (y - mu) - w * pdf;
}

// Analytic rows: regression scores (observed information) and index rows.
void fill_analytic_rows(const Dataset& data, const ParameterVector& theta,
                        LinkFamily family, Mat32& bread) {
  const std::size_t n = data.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  struct Blocks {
    Eigen::Matrix4d outcome = Eigen::Matrix4d::Zero();
    Eigen::Matrix3d mediator = Eigen::Matrix3d::Zero();
    Blocks& operator+=(const Blocks& o) {
      outcome += o.outcome;
      mediator += o.mediator;
      return *this;
    }
  };
  Blocks sums = pairwise_sum(std::size_t{0}, n, Blocks{}, [&](std::size_t i) {
    const ObservationRecord& r = data.canonical(i);
    Blocks b;
    {
      Eigen::Vector4d x(1.0, static_cast<double>(r.exposure),
                        static_cast<double>(r.mediator), r.confounder);
      double t = 0.0;
      for (int k = 0; k < 4; ++k) t += theta.beta[k] * x[k];
      b.outcome = -score_factor_slope(family, t, r.outcome) * (x * x.transpose());
    }
    {
      Eigen::Vector3d x(1.0, static_cast<double>(r.exposure), r.confounder);
      double t = 0.0;
      for (int k = 0; k < 3; ++k) t += theta.gamma[k] * x[k];
      b.mediator = -score_factor_slope(family, t, r.mediator) * (x * x.transpose());
    }
    return b;
  });
  bread.block<4, 4>(0, 0) = sums.outcome * inv_n;
  bread.block<3, 3>(4, 4) = sums.mediator * inv_n;

  // Index rows: q = g(p) - index, so -dq/dp = 1/p^2 and -dq/dindex = 1.
  auto index_row = [&](int k, std::initializer_list<int> effect_cols, double p) {
    const int row = layout::kIndex + k;
    if (theta.indices[k].is_infinite()) return;
    for (int col : effect_cols) bread(row, col) = 1.0 / (p * p);
    bread(row, row) = 1.0;
  };
  const auto& pi = theta.p_indirect;
  const auto& pd = theta.p_direct;
  for (int k = 0; k < 3; ++k) {
    index_row(k, {layout::kIndirect + k}, pi[k]);
    index_row(3 + k, {layout::kDirect + k}, pd[k]);
    index_row(6 + k, {layout::kIndirect + k, layout::kDirect + k}, pi[k] + pd[k]);
  }
}

// Centered finite differences of the mean stack for the contrast,
// mediator-mean and effect rows.
void fill_differenced_rows(const Dataset& data, const ParameterVector& theta,
                           LinkFamily family, Mat32& bread) {
  constexpr int kFirst = StackLayout::kOutcomeContrastOffset;  // 7
  constexpr int kLast = StackLayout::kDirectOffset + 2;        // 22
  const double inv_n = 1.0 / static_cast<double>(data.size());

  const Eigen::VectorXd flat = theta.pack();
  auto mean_rows = [&](const Eigen::VectorXd& at) {
    const ParameterVector p = ParameterVector::unpack(at);
    StackVec sum = stacked_residual(data, p, family);
    return Eigen::Matrix<double, kLast - kFirst + 1, 1>(
        sum.segment<kLast - kFirst + 1>(kFirst) * inv_n);
  };

  // The differenced rows never involve index parameters, so their columns
  // are skipped.
  for (int col = 0; col < layout::kIndex; ++col) {
    const double h = std::max(1e-6, 1e-6 * std::abs(flat[col]));
    Eigen::VectorXd up = flat, down = flat;
    up[col] += h;
    down[col] -= h;
    const Eigen::Matrix<double, kLast - kFirst + 1, 1> diff =
        (mean_rows(up) - mean_rows(down)) / (2.0 * h);
    for (int row = kFirst; row <= kLast; ++row) {
      bread(row, col) = -diff[row - kFirst];
    }
  }
}

double condition_estimate_of(const Eigen::JacobiSVD<Eigen::MatrixXd>& svd) {
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

}  // namespace

Eigen::MatrixXd sandwich_combine(const Eigen::MatrixXd& bread, const Eigen::MatrixXd& meat,
                                 std::size_t n) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(bread, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cond = condition_estimate_of(svd);
  if (!(cond < 1e12)) {
    throw SingularBread("bread condition estimate " + std::to_string(cond) +
                        " exceeds 1e12");
  }
  const Eigen::MatrixXd inv =
      svd.solve(Eigen::MatrixXd::Identity(bread.rows(), bread.cols()));
  Eigen::MatrixXd cov = inv * meat * inv.transpose() / static_cast<double>(n);
  cov = 0.5 * (cov + cov.transpose()).eval();
  return cov;
}

SandwichResult sandwich(const Dataset& data, const ParameterVector& theta,
                        LinkFamily family) {
  const std::size_t n = data.size();
  if (n == 0) {
    throw std::invalid_argument("sandwich requires a non-empty dataset");
  }
  SandwichResult result;
  result.bread = Eigen::MatrixXd::Zero(layout::kDim, layout::kDim);
  result.meat = Eigen::MatrixXd::Zero(layout::kDim, layout::kDim);
  result.covariance = Eigen::MatrixXd::Zero(layout::kDim, layout::kDim);
  result.standard_errors =
      Eigen::VectorXd::Constant(layout::kDim, std::numeric_limits<double>::quiet_NaN());

  result.active.reserve(layout::kDim);
  for (int k = 0; k < layout::kDim; ++k) {
    if (k >= layout::kIndex) {
      const bool inf = theta.indices[k - layout::kIndex].is_infinite();
      result.infinite_index[k - layout::kIndex] = inf;
      if (inf) continue;
    }
    result.active.push_back(k);
  }

  Mat32 bread = Mat32::Zero();
  fill_analytic_rows(data, theta, family, bread);
  fill_differenced_rows(data, theta, family, bread);

  Mat32 meat = pairwise_sum(std::size_t{0}, n, Mat32(Mat32::Zero()),
                            [&](std::size_t i) -> Mat32 {
                              const StackVec q = q_function(data.canonical(i), theta, family);
                              return Mat32(q * q.transpose());
                            }) /
               static_cast<double>(n);

  const int m = static_cast<int>(result.active.size());
  Eigen::MatrixXd bread_active(m, m), meat_active(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      bread_active(i, j) = bread(result.active[i], result.active[j]);
      meat_active(i, j) = meat(result.active[i], result.active[j]);
    }
  }

  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(bread_active);
    result.condition_estimate = condition_estimate_of(svd);
    result.singular = !(result.condition_estimate < 1e12);
  }

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      result.bread(result.active[i], result.active[j]) = bread_active(i, j);
      result.meat(result.active[i], result.active[j]) = meat_active(i, j);
    }
  }

  if (!result.singular) {
    const Eigen::MatrixXd cov = sandwich_combine(bread_active, meat_active, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        result.covariance(result.active[i], result.active[j]) = cov(i, j);
      }
      result.standard_errors[result.active[i]] =
          cov(i, i) >= 0.0 ? std::sqrt(cov(i, i))
                           : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return result;
}

std::array<Interval, layout::kDim> confidence_intervals(const SandwichResult& result,
                                                        const ParameterVector& theta,
                                                        double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("confidence level must be in (0, 1)");
  }
  const double z = normal_quantile(0.5 + level / 2.0);
  const Eigen::VectorXd flat = theta.pack();
  std::array<Interval, layout::kDim> out;
  for (int k = 0; k < layout::kDim; ++k) {
    Interval iv;
    const bool is_index = k >= layout::kIndex;
    if (is_index && theta.indices[k - layout::kIndex].is_infinite()) {
      iv.infinite = true;
      out[k] = iv;
      continue;
    }
    const double se = result.standard_errors[k];
    iv.lower = flat[k] - z * se;
    iv.upper = flat[k] + z * se;
    if (is_index) {
      iv.lower = std::max(1.0, iv.lower);  // indices live in [1, inf]
    }
    out[k] = iv;
  }
  return out;
}

}  // namespace pathnnt
