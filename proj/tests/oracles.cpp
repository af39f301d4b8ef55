#include "oracles.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "pathnnt/inference.hpp"
#include "pathnnt/simulate.hpp"
#include "pathnnt/stack.hpp"

namespace pathnnt::test {

namespace {

double oracle_expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double oracle_phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double oracle_inv(LinkFamily family, double x) {
  return family == LinkFamily::kLogit ? oracle_expit(x) : oracle_phi_cdf(x);
}

double oracle_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

}  // namespace

Eigen::VectorXd irls_oracle(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            LinkFamily family, int iterations) {
  const int p = static_cast<int>(X.cols());
  const int n = static_cast<int>(X.rows());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < n; ++i) {
      const double t = X.row(i).dot(b);
      const double mu = oracle_inv(family, t);
      double score_w, info_w;
      if (family == LinkFamily::kLogit) {
        score_w = y[i] - mu;
        info_w = mu * (1.0 - mu);
      } else {
        const double d = oracle_pdf(t);
        score_w = d * (y[i] - mu) / (mu * (1.0 - mu));
        info_w = d * d / (mu * (1.0 - mu));
      }
      s += score_w * X.row(i).transpose();
      H += info_w * (X.row(i).transpose() * X.row(i));
    }
    const Eigen::VectorXd step = H.fullPivLu().solve(s);
    b += step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-13) break;
  }
  return b;
}

Eigen::VectorXd q_oracle(const ObservationRecord& record, const Eigen::VectorXd& th,
                         LinkFamily family) {
  if (th.size() != 32) throw std::invalid_argument("q_oracle needs 32 parameters");
  const double i_obs = record.outcome;
  const double a_obs = record.exposure;
  const double m_obs = record.mediator;
  const double l = record.confounder;

  auto xi = [&](double a, double m) {
    return oracle_inv(family, th[0] + th[1] * a + th[2] * m + th[3] * l);
  };
  auto eta = [&](double a) {
    return oracle_inv(family, th[4] + th[5] * a + th[6] * l);
  };

  Eigen::VectorXd q = Eigen::VectorXd::Zero(32);

  // outcome-model score at (1, A, M, L)
  {
    const double t = th[0] + th[1] * a_obs + th[2] * m_obs + th[3] * l;
    const double mu = oracle_inv(family, t);
    const double w = family == LinkFamily::kLogit
                         ? i_obs - mu
                         : oracle_pdf(t) * (i_obs - mu) / (mu * (1.0 - mu));
    q[0] = w;
    q[1] = w * a_obs;
    q[2] = w * m_obs;
    q[3] = w * l;
  }
  // mediator-model score at (1, A, L)
  {
    const double t = th[4] + th[5] * a_obs + th[6] * l;
    const double mu = oracle_inv(family, t);
    const double w = family == LinkFamily::kLogit
                         ? m_obs - mu
                         : oracle_pdf(t) * (m_obs - mu) / (mu * (1.0 - mu));
    q[4] = w;
    q[5] = w * a_obs;
    q[6] = w * l;
  }

  const double in0 = 1.0 - a_obs;
  const double in1 = a_obs;
  q[7] = (xi(1, 0) - xi(0, 0) - th[7]) * in0;
  q[8] = (xi(1, 0) - xi(0, 0) - th[8]) * in1;
  q[9] = (xi(0, 1) - xi(0, 0) - th[9]) * in0;
  q[10] = (xi(0, 1) - xi(0, 0) - th[10]) * in1;
  q[11] = (xi(1, 1) - xi(0, 1) - th[11]) * in0;
  q[12] = (xi(1, 1) - xi(0, 1) - th[12]) * in1;

  q[13] = (eta(1) - th[13]) * in0;
  q[14] = (eta(1) - th[14]) * in1;
  q[15] = (eta(0) - th[15]) * in0;
  q[16] = (eta(0) - th[16]) * in1;

  q[17] = (th[17] - (th[13] - th[15]) * th[9]) * in0;
  q[18] = (th[18] - (th[14] - th[16]) * th[10]) * in1;
  q[19] = th[17] * in0 + th[18] * in1 - th[19];

  q[20] = (th[20] - (th[7] * (1.0 - th[13]) + th[11] * th[13])) * in0;
  q[21] = (th[21] - (th[8] * (1.0 - th[14]) + th[12] * th[14])) * in1;
  q[22] = th[20] * in0 + th[21] * in1 - th[22];

  auto g = [](double p) { return 1.0 / p; };  // valid for p > 0 only
  q[23] = g(th[17]) - th[23];
  q[24] = g(th[18]) - th[24];
  q[25] = g(th[19]) - th[25];
  q[26] = g(th[20]) - th[26];
  q[27] = g(th[21]) - th[27];
  q[28] = g(th[22]) - th[28];
  q[29] = g(th[17] + th[20]) - th[29];
  q[30] = g(th[18] + th[21]) - th[30];
  q[31] = g(th[19] + th[22]) - th[31];
  return q;
}

Eigen::MatrixXd fd_bread_oracle(const Dataset& data, const ParameterVector& theta,
                                LinkFamily family) {
  const Eigen::VectorXd flat = theta.pack();
  const double inv_n = 1.0 / static_cast<double>(data.size());
  Eigen::MatrixXd bread = Eigen::MatrixXd::Zero(32, 32);
  for (int col = 0; col < 32; ++col) {
    if (!std::isfinite(flat[col])) continue;
    const double h = std::max(1e-6, 1e-6 * std::abs(flat[col]));
    Eigen::VectorXd up = flat, down = flat;
    up[col] += h;
    down[col] -= h;
    const Eigen::VectorXd q_up =
        stacked_residual(data, ParameterVector::unpack(up), family);
    const Eigen::VectorXd q_down =
        stacked_residual(data, ParameterVector::unpack(down), family);
    bread.col(col) = -(q_up - q_down) * (inv_n / (2.0 * h));
  }
  // zero out rows of excluded equations
  for (int k = 0; k < 9; ++k) {
    if (theta.indices[k].is_infinite()) bread.row(layout::kIndex + k).setZero();
  }
  return bread;
}

NewtonResult newton_oracle(const Dataset& data, LinkFamily family,
                           const Eigen::VectorXd& start) {
  const double n = static_cast<double>(data.size());
  auto residual = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    try {
      return stacked_residual(data, ParameterVector::unpack(v), family);
    } catch (const std::exception&) {
      return Eigen::VectorXd::Constant(32, std::numeric_limits<double>::quiet_NaN());
    }
  };
  auto norm_of = [](const Eigen::VectorXd& r) {
    return r.allFinite() ? r.lpNorm<Eigen::Infinity>()
                         : std::numeric_limits<double>::infinity();
  };

  NewtonResult result;
  Eigen::VectorXd v = start;
  Eigen::VectorXd f = residual(v);
  double fnorm = norm_of(f);
  for (int it = 0; it < 200; ++it) {
    if (fnorm < 1e-9 * n) {
      result.converged = true;
      break;
    }
    Eigen::MatrixXd jac(32, 32);
    for (int col = 0; col < 32; ++col) {
      const double h = std::max(1e-7, 1e-7 * std::abs(v[col]));
      Eigen::VectorXd up = v, down = v;
      up[col] += h;
      down[col] -= h;
      jac.col(col) = (residual(up) - residual(down)) / (2.0 * h);
    }
    const Eigen::VectorXd step = jac.fullPivLu().solve(-f);
    double t = 1.0;
    Eigen::VectorXd v_new = v + step;
    Eigen::VectorXd f_new = residual(v_new);
    int halvings = 0;
    while (norm_of(f_new) >= fnorm && halvings < 50) {
      t *= 0.5;
      v_new = v + t * step;
      f_new = residual(v_new);
      ++halvings;
    }
    if (halvings == 50) break;
    v = v_new;
    f = f_new;
    fnorm = norm_of(f);
    result.iterations = it + 1;
  }
  if (fnorm < 1e-9 * n) result.converged = true;
  result.root = v;
  result.residual_norm = fnorm;
  return result;
}

double gaussian_expectation(const std::function<double(double)>& f, double mu,
                            double sigma, int intervals) {
  if (sigma == 0.0) return f(mu);
  const double lo = mu - 10.0 * sigma;
  const double hi = mu + 10.0 * sigma;
  const double h = (hi - lo) / intervals;
  auto density = [&](double l) {
    const double z = (l - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
  };
  double sum = f(lo) * density(lo) + f(hi) * density(hi);
  for (int i = 1; i < intervals; ++i) {
    const double x = lo + i * h;
    sum += f(x) * density(x) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

BootstrapSds bootstrap_index_sds(const Dataset& data, LinkFamily family,
                                 std::size_t resamples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
  std::array<std::vector<double>, 9> values;
  BootstrapSds out;
  for (std::size_t b = 0; b < resamples; ++b) {
    std::vector<ObservationRecord> rows;
    rows.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) rows.push_back(data[pick(rng)]);
    try {
      const auto indices = estimate_indices(Dataset(std::move(rows)), family);
      bool any_infinite = false;
      for (const auto& ix : indices) any_infinite |= ix.is_infinite();
      if (any_infinite) {
        ++out.degenerate;
        continue;
      }
      for (int k = 0; k < 9; ++k) values[k].push_back(indices[k].value());
      ++out.resamples_used;
    } catch (const std::exception&) {
      ++out.degenerate;
    }
  }
  for (int k = 0; k < 9; ++k) {
    const auto& v = values[k];
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    out.sd[k] = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

Dataset make_dataset(const std::vector<std::array<double, 4>>& rows) {
  std::vector<ObservationRecord> records;
  records.reserve(rows.size());
  for (const auto& r : rows) {
    records.push_back({static_cast<int>(r[0]), static_cast<int>(r[1]),
                       static_cast<int>(r[2]), r[3]});
  }
  return Dataset(std::move(records));
}

}  // namespace pathnnt::test
