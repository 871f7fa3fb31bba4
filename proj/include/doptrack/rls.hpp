#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <type_traits>
#include <utility>

#include "doptrack/error.hpp"

namespace doptrack {

/// Unit-forgetting recursive least squares.
///
/// Tracks the minimizer of  ridge * |x|^2 + sum_k (y_k - g_k^T x)^2  and the
/// minimum value itself (`lse`). `inv_gram` is the Riccati matrix
/// (ridge I + sum g g^T)^{-1}.
template <typename Scalar>
struct RlsState {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix inv_gram;
  Vector estimate;
  Scalar lse = Scalar(0);
  long count = 0;

  Eigen::Index dim() const { return estimate.size(); }

  bool operator==(const RlsState& other) const {
    return inv_gram == other.inv_gram && estimate == other.estimate && lse == other.lse &&
           count == other.count;
  }
};

template <typename Scalar>
RlsState<Scalar> rls_init(Eigen::Index dim, Scalar ridge) {
  if (dim < 1) throw ConfigError("RLS dimension must be >= 1");
  if (!(ridge > Scalar(0))) throw ConfigError("RLS ridge must be positive");
  RlsState<Scalar> s;
  s.inv_gram = RlsState<Scalar>::Matrix::Identity(dim, dim) / ridge;
  s.estimate = RlsState<Scalar>::Vector::Zero(dim);
  return s;
}

/// Absorbs one regression row. Returns the a-posteriori residual
/// y - g^T x_new. An all-zero row carries no information and only bumps
/// `count`.
template <typename Scalar, typename Row>
Scalar rls_update(RlsState<Scalar>& s, const Eigen::MatrixBase<Row>& row,
                  std::type_identity_t<Scalar> target) {
  if (!row.allFinite() || !std::isfinite(target))
    throw NumericalError("non-finite RLS input");

  if (row.isZero(0)) {
    ++s.count;
    return target - row.dot(s.estimate);
  }
  // P g; P is kept symmetric so g^T P = (P g)^T.
  const typename RlsState<Scalar>::Vector pg = s.inv_gram * row;
  const Scalar denom = Scalar(1) + row.dot(pg);
  const Scalar prior = target - row.dot(s.estimate);
  const Scalar posterior = prior / denom;

  s.estimate.noalias() += pg * posterior;
  s.inv_gram.noalias() -= (pg / denom) * pg.transpose();
  s.inv_gram = (Scalar(0.5) * (s.inv_gram + s.inv_gram.transpose())).eval();
  s.lse = std::max(Scalar(0), s.lse + prior * posterior);
  ++s.count;
  return posterior;
}

/// Independent copy for seeding a segment restart.
template <typename Scalar>
RlsState<Scalar> clone_for_reset(const RlsState<Scalar>& s) {
  return s;
}

}  // namespace doptrack
