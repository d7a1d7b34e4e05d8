#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace liftadmm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;  // column-major throughout the repo
using Index = Eigen::Index;

/// Thrown when an input violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical routine fails to converge or produces
/// non-finite values.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) throw NumericFailure(std::string(what) + ": non-finite entries");
}

/// n x n real matrix with M = M^T enforced on construction.
/// Ingest applies (M + M^T)/2, which is exactly symmetric in floating point.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;

  explicit SymmetricMatrix(const Matrix& m) {
    require(m.rows() == m.cols(), "SymmetricMatrix: input must be square");
    require_finite(m, "SymmetricMatrix");
    m_ = 0.5 * (m + m.transpose());
  }

  static SymmetricMatrix Zero(Index n) { return SymmetricMatrix(Matrix::Zero(n, n)); }
  static SymmetricMatrix Identity(Index n) { return SymmetricMatrix(Matrix::Identity(n, n)); }

  const Matrix& mat() const { return m_; }
  Index n() const { return m_.rows(); }

 private:
  Matrix m_;
};

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// PSD weight W defining <u,v>_W = u^T W v and the seminorm ||u||_W.
/// Positive semidefiniteness is certified on construction.
class SemiNormWeight {
 public:
  explicit SemiNormWeight(const SymmetricMatrix& w);

  double inner(const Vector& u, const Vector& v) const;
  double norm(const Vector& u) const;
  double min_eigenvalue() const { return min_eig_; }
  const Matrix& mat() const { return w_.mat(); }
  Index n() const { return w_.n(); }

 private:
  SymmetricMatrix w_;
  double min_eig_ = 0.0;
};

}  // namespace liftadmm
