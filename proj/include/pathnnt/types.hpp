#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace pathnnt {

/// One subject: binary outcome I, binary exposure A, binary mediator M and a
/// real-valued measured confounder L.
struct ObservationRecord {
  int outcome = 0;
  int exposure = 0;
  int mediator = 0;
  double confounder = 0.0;
};

/// Validates the {0,1} fields and finiteness of the confounder.
/// Throws std::invalid_argument on violation.
void validate_record(const ObservationRecord& record);

/// Immutable collection of observations with cached group counts and a
/// canonical iteration order.
///
/// All reductions in the estimation path walk records in canonical order
/// (sorted by confounder, exposure, mediator, outcome), so results do not
/// depend on the order in which records were supplied.
class Dataset {
public:
  Dataset() = default;
  explicit Dataset(std::vector<ObservationRecord> records);

  std::size_t size() const { return records_.size(); }
  std::size_t n0() const { return n0_; }
  std::size_t n1() const { return n1_; }
  std::size_t group_size(int a) const { return a == 0 ? n0_ : n1_; }

  const std::vector<ObservationRecord>& records() const { return records_; }
  const ObservationRecord& operator[](std::size_t i) const { return records_[i]; }

  /// Record at position i of the canonical order.
  const ObservationRecord& canonical(std::size_t i) const {
    return records_[canonical_order_[i]];
  }

private:
  std::vector<ObservationRecord> records_;
  std::vector<std::uint32_t> canonical_order_;
  std::size_t n0_ = 0;
  std::size_t n1_ = 0;
};

/// An efficacy index value: a finite real >= 1 or the distinguished
/// infinite value. Infinity is a tag, never a floating special, so report
/// serialization and coverage accounting can branch on it exactly.
class ExtendedIndex {
public:
  ExtendedIndex() = default;  // infinite

  static ExtendedIndex infinite() { return ExtendedIndex(); }
  static ExtendedIndex finite(double v);  // throws std::invalid_argument if v < 1

  bool is_infinite() const { return infinite_; }
  /// Finite value; throws std::logic_error when infinite.
  double value() const;

  friend bool operator==(const ExtendedIndex&, const ExtendedIndex&) = default;

private:
  double value_ = 0.0;
  bool infinite_ = true;
};

/// Benefit-to-index transform: 1/p for p > 0, infinite otherwise.
/// Total on p in [-1, 1].
ExtendedIndex g_transform(double p);

/// Positions of the parameter blocks inside the flat 32-vector.
/// The layout is shared by ParameterVector::pack/unpack and the stacked
/// estimating system and must never change between releases.
namespace layout {
constexpr int kBeta = 0;              // 4: intercept, exposure, mediator, confounder
constexpr int kGamma = 4;             // 3: intercept, exposure, confounder
constexpr int kOutcomeContrast = 7;   // 6: see ParameterVector::outcome_contrasts
constexpr int kMediatorMean = 13;     // 4: see ParameterVector::mediator_means
constexpr int kIndirect = 17;         // 3: p_i(0), p_i(1), marginal p_i
constexpr int kDirect = 20;           // 3: p_d(0), p_d(1), marginal p_d
constexpr int kIndex = 23;            // 9: the efficacy indices
constexpr int kDim = 32;
}  // namespace layout

/// Identifiers for the nine indices, in flat-vector order.
enum class IndexId : int {
  kInne = 0,  // indirect, unexposed group
  kIein = 1,  // indirect, exposed group
  kInnt = 2,  // indirect, marginal
  kDnne = 3,  // direct, unexposed group
  kDein = 4,  // direct, exposed group
  kDnnt = 5,  // direct, marginal
  kNne = 6,   // total, unexposed group
  kEin = 7,   // total, exposed group
  kNnt = 8,   // total, marginal
};

constexpr std::array<const char*, 9> kIndexNames = {
    "INNE", "IEIN", "INNT", "DNNE", "DEIN", "DNNT", "NNE", "EIN", "NNT"};

/// The full stacked estimand.
///
/// outcome_contrasts holds the groupwise means of the controlled outcome
/// contrasts, ordered contrast-major with the unexposed group first:
///   [0] E[I_{1,0} - I_{0,0} | A=0]   [1] same, A=1
///   [2] E[I_{0,1} - I_{0,0} | A=0]   [3] same, A=1
///   [4] E[I_{1,1} - I_{0,1} | A=0]   [5] same, A=1
/// mediator_means holds groupwise means of the potential mediator:
///   [0] E[M_1 | A=0]  [1] E[M_1 | A=1]  [2] E[M_0 | A=0]  [3] E[M_0 | A=1]
/// p_* triples are (group 0, group 1, marginal). Total effects are not free
/// parameters; they are sums of the direct and indirect entries.
struct ParameterVector {
  std::array<double, 4> beta{};
  std::array<double, 3> gamma{};
  std::array<double, 6> outcome_contrasts{};
  std::array<double, 4> mediator_means{};
  std::array<double, 3> p_indirect{};
  std::array<double, 3> p_direct{};
  std::array<ExtendedIndex, 9> indices{};

  double p_total(int component) const { return p_indirect[component] + p_direct[component]; }
  const ExtendedIndex& index(IndexId id) const { return indices[static_cast<int>(id)]; }

  /// Flattens to the 32-vector. Infinite indices map to +inf doubles; this
  /// representation is internal plumbing for the numeric layers, which skip
  /// non-finite coordinates.
  Eigen::VectorXd pack() const;

  /// Inverse of pack. Throws std::invalid_argument unless v.size() == 32.
  static ParameterVector unpack(const Eigen::VectorXd& v);

  friend bool operator==(const ParameterVector&, const ParameterVector&) = default;
};

}  // namespace pathnnt
