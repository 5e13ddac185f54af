#include "spinsync/algebra.hpp"

namespace spinsync {

namespace {
const Complex kI{0.0, 1.0};

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument("operator-algebra: " + msg);
}
}  // namespace

ComplexMatrix pauli(PauliAxis axis) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  switch (axis) {
    case PauliAxis::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case PauliAxis::Y:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case PauliAxis::Z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    case PauliAxis::Plus:
      m(0, 1) = 1.0;  // raises |down> -> |up>
      break;
    case PauliAxis::Minus:
      m(1, 0) = 1.0;  // lowers |up> -> |down>
      break;
  }
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix embed(const ComplexMatrix& op, int site, int n_spins) {
  require(op.rows() == 2 && op.cols() == 2, "embed expects a 2x2 operator");
  require(n_spins >= 1, "embed requires n_spins >= 1");
  if (site < 1 || site > n_spins)
    throw std::out_of_range("operator-algebra: embed site " + std::to_string(site) +
                            " out of range [1," + std::to_string(n_spins) + "]");
  const Eigen::Index left = Eigen::Index{1} << (site - 1);
  const Eigen::Index right = Eigen::Index{1} << (n_spins - site);
  ComplexMatrix out = kron(ComplexMatrix::Identity(left, left), op);
  if (right > 1) out = kron(out, ComplexMatrix::Identity(right, right));
  return out;
}

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add shape mismatch");
  return a + b;
}

ComplexMatrix scale(Complex factor, const ComplexMatrix& a) { return factor * a; }

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.cols() == b.rows(), "multiply shape mismatch");
  return a * b;
}

ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

Complex trace_of(const ComplexMatrix& a) {
  require(a.rows() == a.cols(), "trace of a non-square matrix");
  return a.trace();
}

double frobenius_norm(const ComplexMatrix& a) { return a.norm(); }

StateVector apply(const ComplexMatrix& a, const StateVector& psi) {
  require(a.cols() == psi.size(), "apply shape mismatch");
  return a * psi;
}

Complex expectation(const StateVector& psi, const ComplexMatrix& a) {
  require(a.rows() == a.cols() && a.cols() == psi.size(), "expectation shape mismatch");
  return psi.dot(a * psi);  // Eigen's dot conjugates the left argument
}

bool is_hermitian(const ComplexMatrix& a, double tolerance) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= tolerance * std::max(1.0, a.norm());
}

bool is_unitary(const ComplexMatrix& a, double tolerance) {
  if (a.rows() != a.cols()) return false;
  ComplexMatrix g = a.adjoint() * a;
  return (g - ComplexMatrix::Identity(a.rows(), a.cols())).norm() <=
         tolerance * std::max(1.0, g.norm());
}

StateVector normalized(const StateVector& psi, double floor) {
  const double n = psi.norm();
  if (n < floor)
    throw std::runtime_error("operator-algebra: state norm " + std::to_string(n) +
                             " collapsed below " + std::to_string(floor));
  return psi / n;
}

}  // namespace spinsync
