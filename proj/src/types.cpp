#include "pathnnt/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace pathnnt {

void validate_record(const ObservationRecord& record) {
  auto binary = [](int v) { return v == 0 || v == 1; };
  if (!binary(record.outcome) || !binary(record.exposure) || !binary(record.mediator)) {
    throw std::invalid_argument("outcome, exposure and mediator must be 0 or 1");
  }
  if (!std::isfinite(record.confounder)) {
    throw std::invalid_argument("confounder must be finite");
  }
}

Dataset::Dataset(std::vector<ObservationRecord> records) : records_(std::move(records)) {
  for (const auto& r : records_) {
    validate_record(r);
    (r.exposure == 0 ? n0_ : n1_) += 1;
  }
  canonical_order_.resize(records_.size());
  std::iota(canonical_order_.begin(), canonical_order_.end(), 0u);
  std::sort(canonical_order_.begin(), canonical_order_.end(),
            [this](std::uint32_t a, std::uint32_t b) {
              const auto& ra = records_[a];
              const auto& rb = records_[b];
              return std::tie(ra.confounder, ra.exposure, ra.mediator, ra.outcome) <
                     std::tie(rb.confounder, rb.exposure, rb.mediator, rb.outcome);
            });
}

ExtendedIndex ExtendedIndex::finite(double v) {
  if (!(v >= 1.0)) {
    throw std::invalid_argument("a finite index value must be >= 1");
  }
  ExtendedIndex idx;
  idx.value_ = v;
  idx.infinite_ = false;
  return idx;
}

double ExtendedIndex::value() const {
  if (infinite_) {
    throw std::logic_error("value() called on an infinite index");
  }
  return value_;
}

ExtendedIndex g_transform(double p) {
  if (p > 0.0) {
    // p can sit one ulp above 1; keep the codomain promise.
    return ExtendedIndex::finite(std::max(1.0, 1.0 / p));
  }
  return ExtendedIndex::infinite();
}

Eigen::VectorXd ParameterVector::pack() const {
  Eigen::VectorXd v(layout::kDim);
  for (int i = 0; i < 4; ++i) v[layout::kBeta + i] = beta[i];
  for (int i = 0; i < 3; ++i) v[layout::kGamma + i] = gamma[i];
  for (int i = 0; i < 6; ++i) v[layout::kOutcomeContrast + i] = outcome_contrasts[i];
  for (int i = 0; i < 4; ++i) v[layout::kMediatorMean + i] = mediator_means[i];
  for (int i = 0; i < 3; ++i) v[layout::kIndirect + i] = p_indirect[i];
  for (int i = 0; i < 3; ++i) v[layout::kDirect + i] = p_direct[i];
  for (int i = 0; i < 9; ++i) {
    v[layout::kIndex + i] = indices[i].is_infinite()
                                ? std::numeric_limits<double>::infinity()
                                : indices[i].value();
  }
  return v;
}

ParameterVector ParameterVector::unpack(const Eigen::VectorXd& v) {
  if (v.size() != layout::kDim) {
    throw std::invalid_argument("flat parameter vector must have length 32");
  }
  ParameterVector p;
  for (int i = 0; i < 4; ++i) p.beta[i] = v[layout::kBeta + i];
  for (int i = 0; i < 3; ++i) p.gamma[i] = v[layout::kGamma + i];
  for (int i = 0; i < 6; ++i) p.outcome_contrasts[i] = v[layout::kOutcomeContrast + i];
  for (int i = 0; i < 4; ++i) p.mediator_means[i] = v[layout::kMediatorMean + i];
  for (int i = 0; i < 3; ++i) p.p_indirect[i] = v[layout::kIndirect + i];
  for (int i = 0; i < 3; ++i) p.p_direct[i] = v[layout::kDirect + i];
  for (int i = 0; i < 9; ++i) {
    const double x = v[layout::kIndex + i];
    p.indices[i] = std::isinf(x) ? ExtendedIndex::infinite() : ExtendedIndex::finite(x);
  }
  return p;
}

}  // namespace pathnnt
