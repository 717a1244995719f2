#pragma once

#include "fabricore/types.hpp"

namespace fabricore {

/// Eigengrasp basis: rows of `components` are principal directions over the hand joints.
template <typename Scalar>
struct PcaBasis {
  MatrixX<Scalar> components;  // k x h, orthonormal rows
  VectorX<Scalar> mean;        // h
  VectorX<Scalar> eigenvalues; // h, descending
  Scalar explained_variance_ratio = Scalar(0);

  Eigen::Index rank() const { return components.rows(); }
  Eigen::Index hand_dof() const { return components.cols(); }

  VectorX<Scalar> project(const VectorX<Scalar>& q_hand) const { return components * (q_hand - mean); }
  VectorX<Scalar> reconstruct(const VectorX<Scalar>& coords) const
  {
    return mean + components.transpose() * coords;
  }
};

}  // namespace fabricore
