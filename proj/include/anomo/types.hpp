#pragma once

// Shared domain types for the anomography toolkit. Nothing here runs an
// algorithm; the types only carry data and the invariants checked by
// validate().

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace anomo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// Binary observation mask (1 = observed).
using Mask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;
using MaskVector = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>;

/// Binary L x F link/flow incidence matrix, stored as one sorted link list
/// per flow with a row view (flows per link) built alongside.
class RoutingMatrix {
 public:
  RoutingMatrix() = default;

  /// `paths[i]` lists the links traversed by flow i. Order does not matter;
  /// duplicates and out-of-range link ids raise DimensionError.
  RoutingMatrix(int links, std::vector<std::vector<int>> paths);

  /// Builds from a dense 0/1 matrix; any other entry raises DimensionError.
  static RoutingMatrix from_dense(const Matrix& dense);

  int links() const { return links_; }
  int flows() const { return static_cast<int>(columns_.size()); }

  std::span<const int> column(int flow) const { return columns_.at(flow); }
  std::span<const int> row(int link) const { return rows_.at(link); }
  std::size_t nonzeros() const { return nnz_; }

  Matrix dense() const;

  /// R * x (length F -> length L).
  Vector apply(const Vector& x) const;
  /// R^T * y (length L -> length F).
  Vector apply_transpose(const Vector& y) const;

  friend bool operator==(const RoutingMatrix&, const RoutingMatrix&) = default;

 private:
  int links_ = 0;
  std::size_t nnz_ = 0;
  std::vector<std::vector<int>> columns_;
  std::vector<std::vector<int>> rows_;
};

/// One frontal slice of the Hankelized link tensor: an L x W window whose
/// last column holds the newest measurement.
struct ObservedSlice {
  int index = 0;  ///< 1-based slice index t
  Matrix values;  ///< L x W, zero where unobserved
  Mask mask;      ///< L x W
  int newest_time() const { return index + static_cast<int>(values.cols()) - 1; }

  int links() const { return static_cast<int>(values.rows()); }
  int window() const { return static_cast<int>(values.cols()); }
};

/// CP factors of the tracked tensor plus the two most recent temporal
/// projection vectors. Row l of `A` is the link loading a^l, row w of `C`
/// the window loading c^w.
struct CpModel {
  Matrix A;       ///< L x R
  Matrix C;       ///< W x R
  Vector b_curr;  ///< b[t]
  Vector b_prev;  ///< b[t-1]

  int rank() const { return static_cast<int>(A.cols()); }
};

/// Per-row / per-column normal matrices of the recursive least squares updates.
struct RlsCaches {
  std::vector<Matrix> RA;  ///< L matrices, R x R
  std::vector<Matrix> RC;  ///< W matrices, R x R
};

struct Hyperparams {
  double lambda = 0.9;        ///< forgetting factor in (0, 1]
  double mu_r = 1e-3;         ///< Frobenius / l2 weight
  double mu_h = 1e-3;         ///< Hankel-structure weight
  double mu_s_scale = 1e-2;   ///< sparsity weight relative to max|q|
  double xi = 1.0;            ///< ADMM penalty
  int max_iter = 120;         ///< ADMM iteration cap K
  double eps_abs = 1e-5;
  double eps_rel = 1e-3;
  double delta_v = 0.5;       ///< detection threshold on |v|
  int rank = 10;
  int window = 24;
};

/// Abnormal-flow estimate with the ADMM split and scaled-dual state.
struct AnomalyVector {
  Vector v;
  Vector z;
  Vector u;

  static AnomalyVector zeros(int flows) {
    return {Vector::Zero(flows), Vector::Zero(flows), Vector::Zero(flows)};
  }
};

struct OneToOne {
  friend bool operator==(const OneToOne&, const OneToOne&) = default;
};
struct NToOne {
  int n = 0;
  friend bool operator==(const NToOne&, const NToOne&) = default;
};
struct AllOdsOneLink {
  int link = 0;
  friend bool operator==(const AllOdsOneLink&, const AllOdsOneLink&) = default;
};
using EventStructure = std::variant<OneToOne, NToOne, AllOdsOneLink>;

std::string structure_tag(const EventStructure& s);

/// A volume anomaly: a multiplicative change of `delta` on a set of flows,
/// shaped as a trapezoid of `duration` samples starting at `start`.
struct AnomalyEvent {
  std::vector<int> flows;
  int start = 1;  ///< 1-based measurement time
  int duration = 1;
  double delta = 1.0;
  double gamma_i = 0.0;
  double gamma_d = 0.0;
  EventStructure structure = OneToOne{};
};

/// Collects every invariant violation; an empty list means valid.
std::vector<std::string> validate(const CpModel& model, const RoutingMatrix& routing,
                                  const Hyperparams& hp);
std::vector<std::string> validate(const Hyperparams& hp);
std::vector<std::string> validate(const RoutingMatrix& routing);
std::vector<std::string> validate(const CpModel& model);
std::vector<std::string> validate(const RlsCaches& caches, double mu_r);
std::vector<std::string> validate(const AnomalyEvent& event);

}  // namespace anomo
