#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace rydcz {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// per-atom level order is fixed: qubit levels lead
enum class Level : int { zero = 0, one = 1, p = 2, r = 3, d = 4 };

inline constexpr int n_levels = 5;
inline constexpr int n_states = n_levels * n_levels;

constexpr int flat_index(Level c, Level t) { return n_levels * static_cast<int>(c) + static_cast<int>(t); }

constexpr std::pair<Level, Level> split_index(int k) {
  return {static_cast<Level>(k / n_levels), static_cast<Level>(k % n_levels)};
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexMatrix ket_bra(int dim, int i, int j) {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(i, j) = 1.0;
  return m;
}

inline ComplexVector basis_state(int dim, int i) {
  ComplexVector v = ComplexVector::Zero(dim);
  v(i) = 1.0;
  return v;
}

inline bool is_hermitian(const ComplexMatrix& m, double rel_tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

struct HermitianEigen {
  Eigen::VectorXd values;  // ascending
  ComplexMatrix vectors;   // columns
};

inline HermitianEigen herm_eig(const ComplexMatrix& m) {
  if (!is_hermitian(m)) throw std::invalid_argument("herm_eig: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("herm_eig: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

// 25x25 two-atom state, Hermitian with unit trace
class DensityMatrix {
 public:
  DensityMatrix() : m_(ComplexMatrix::Zero(n_states, n_states)) { m_(0, 0) = 1.0; }

  explicit DensityMatrix(ComplexMatrix m, double tol = 1e-8) : m_(std::move(m)) {
    if (m_.rows() != n_states || m_.cols() != n_states)
      throw std::invalid_argument("DensityMatrix: expected 25x25");
    if (!is_hermitian(m_, tol)) throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(m_.trace() - cplx(1.0)) > tol) throw std::invalid_argument("DensityMatrix: trace != 1");
  }

  static DensityMatrix pure(const ComplexVector& psi) {
    if (psi.size() != n_states) throw std::invalid_argument("DensityMatrix::pure: expected 25 amplitudes");
    const double n = psi.norm();
    if (std::abs(n - 1.0) > 1e-10) throw std::invalid_argument("DensityMatrix::pure: state not normalized");
    return DensityMatrix(psi * psi.adjoint());
  }

  static DensityMatrix basis(Level c, Level t) { return pure(basis_state(n_states, flat_index(c, t))); }

  // skips validation; used by integrators that keep the invariants themselves
  static DensityMatrix unchecked(ComplexMatrix m) {
    DensityMatrix r;
    r.m_ = std::move(m);
    return r;
  }

  const ComplexMatrix& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }
  double population(int i) const { return m_(i, i).real(); }
  double population(Level c, Level t) const { return population(flat_index(c, t)); }
  double trace() const { return m_.trace().real(); }
  double purity() const { return (m_ * m_).trace().real(); }
  double min_eigenvalue() const { return herm_eig(m_).values(0); }

 private:
  ComplexMatrix m_;
};

}  // namespace rydcz
