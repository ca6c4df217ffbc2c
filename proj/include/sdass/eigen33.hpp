#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include <Eigen/Core>

namespace sdass {

/// Eigendecomposition of a symmetric 3x3 matrix by cyclic Jacobi sweeps.
///
/// eigenvalues() are ascending; column i of eigenvectors() pairs with
/// eigenvalue i. Vector signs are canonical: the largest-magnitude component
/// of each eigenvector is positive. Within an eigenvalue tie (relative gap
/// below tie_tolerance) the tied columns are reordered so the absolute
/// component triples compare lexicographically smallest first, keeping the
/// returned basis deterministic for isotropic inputs.
template <typename Scalar>
class SymmetricEigen3 {
public:
  using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
  using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

  explicit SymmetricEigen3(const Matrix3& m,
                           Scalar tie_tolerance = Scalar(1e-12)) {
    compute(m, tie_tolerance);
  }

  const Vector3& eigenvalues() const { return eigenvalues_; }
  const Matrix3& eigenvectors() const { return eigenvectors_; }

  /// Unit eigenvector of the smallest eigenvalue.
  Vector3 min_eigenvector() const { return eigenvectors_.col(0); }

private:
  static void canonicalize_sign(Eigen::Ref<Vector3> v) {
    int k = 0;
    v.cwiseAbs().maxCoeff(&k);
    if (v[k] < Scalar(0)) v = -v;
  }

  // True when |a| triple precedes |b| triple lexicographically.
  static bool abs_lex_less(const Vector3& a, const Vector3& b) {
    for (int i = 0; i < 3; ++i) {
      const Scalar da = std::abs(a[i]);
      const Scalar db = std::abs(b[i]);
      if (da < db) return true;
      if (da > db) return false;
    }
    return false;
  }

  void compute(const Matrix3& m, Scalar tie_tolerance) {
    Matrix3 a = (m + m.transpose()) / Scalar(2);
    Matrix3 v = Matrix3::Identity();

    const Scalar scale = a.cwiseAbs().maxCoeff();
    if (scale > Scalar(0)) a /= scale;

    // Cyclic Jacobi: rotate away each off-diagonal entry until they vanish.
    constexpr int kMaxSweeps = 50;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      const Scalar off = std::abs(a(0, 1)) + std::abs(a(0, 2)) +
                         std::abs(a(1, 2));
      if (off == Scalar(0)) break;
      for (int p = 0; p < 2; ++p) {
        for (int q = p + 1; q < 3; ++q) {
          const Scalar apq = a(p, q);
          if (apq == Scalar(0)) continue;
          const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
          const Scalar t =
              (theta >= Scalar(0) ? Scalar(1) : Scalar(-1)) /
              (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
          const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
          const Scalar s = t * c;

          const Scalar app = a(p, p);
          const Scalar aqq = a(q, q);
          a(p, p) = app - t * apq;
          a(q, q) = aqq + t * apq;
          a(p, q) = Scalar(0);
          a(q, p) = Scalar(0);
          const int r = 3 - p - q;
          const Scalar arp = a(r, p);
          const Scalar arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(p, r) = a(r, p);
          a(r, q) = s * arp + c * arq;
          a(q, r) = a(r, q);

          for (int i = 0; i < 3; ++i) {
            const Scalar vip = v(i, p);
            const Scalar viq = v(i, q);
            v(i, p) = c * vip - s * viq;
            v(i, q) = s * vip + c * viq;
          }
        }
      }
    }

    std::array<int, 3> order{0, 1, 2};
    Vector3 diag(a(0, 0), a(1, 1), a(2, 2));
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        if (diag[order[j]] < diag[order[i]]) std::swap(order[i], order[j]);
      }
    }
    for (int i = 0; i < 3; ++i) {
      eigenvalues_[i] = diag[order[i]] * (scale > Scalar(0) ? scale : Scalar(1));
      eigenvectors_.col(i) = v.col(order[i]).normalized();
      canonicalize_sign(eigenvectors_.col(i));
    }

    // Deterministic order inside near-ties.
    const Scalar tie_gap =
        tie_tolerance * std::max(Scalar(1), std::abs(eigenvalues_[2]));
    for (int i = 0; i < 2; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        if (std::abs(eigenvalues_[j] - eigenvalues_[i]) <= tie_gap &&
            abs_lex_less(eigenvectors_.col(j), eigenvectors_.col(i))) {
          eigenvectors_.col(i).swap(eigenvectors_.col(j));
          std::swap(eigenvalues_[i], eigenvalues_[j]);
        }
      }
    }
  }

  Vector3 eigenvalues_;
  Matrix3 eigenvectors_;
};

} // namespace sdass
