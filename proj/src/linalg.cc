#include "pchsh/linalg.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace pchsh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_shape(const StateVector &v, BipartiteShape shape) {
    if (v.size() != shape.total()) {
        throw std::invalid_argument("vector length " + std::to_string(v.size()) + " does not match bipartite dimension " +
                                    std::to_string(shape.total()));
    }
}

// Row-major view of an A-major bipartite vector: element (b, a) is v[a * dim_b + b],
// i.e. the transpose of the dim_a x dim_b coefficient matrix.
Eigen::Map<const ComplexMatrix> coefficient_view(const StateVector &v, BipartiteShape shape) {
    return Eigen::Map<const ComplexMatrix>(v.data(), shape.dim_b, shape.dim_a);
}

}  // namespace

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix tensor(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

double hermiticity_residual(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) {
        return kInf;
    }
    if (m.size() == 0) {
        return 0.0;
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_residual(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) {
        return kInf;
    }
    if (m.size() == 0) {
        return 0.0;
    }
    return (m.adjoint() * m - identity(m.rows())).cwiseAbs().maxCoeff();
}

double commutator_residual(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        return kInf;
    }
    if (a.size() == 0) {
        return 0.0;
    }
    return (a * b - b * a).cwiseAbs().maxCoeff();
}

double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        return kInf;
    }
    if (a.size() == 0) {
        return 0.0;
    }
    return (a - b).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix &m, double tol) { return hermiticity_residual(m) <= tol; }

namespace {

template <typename F>
ComplexMatrix spectral_map(const ComplexMatrix &m, F &&f) {
    if (!is_hermitian(m)) {
        throw std::invalid_argument("spectral function requires a Hermitian matrix");
    }
    // Symmetrize so the solver sees an exactly self-adjoint input.
    ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("Hermitian eigendecomposition failed");
    }
    Eigen::VectorXd mapped = solver.eigenvalues().unaryExpr(f);
    const ComplexMatrix &vecs = solver.eigenvectors();
    return vecs * mapped.cast<Complex>().asDiagonal() * vecs.adjoint();
}

}  // namespace

ComplexMatrix operator_abs(const ComplexMatrix &m) {
    return spectral_map(m, [](double lambda) { return std::abs(lambda); });
}

ComplexMatrix sign_normalize(const ComplexMatrix &m, double zero_tol) {
    if (!(zero_tol > 0)) {
        throw std::invalid_argument("zero_tol must be positive");
    }
    return spectral_map(m, [zero_tol](double lambda) {
        if (std::abs(lambda) < zero_tol) {
            lambda = zero_tol;
        }
        return lambda / std::abs(lambda);
    });
}

ComplexMatrix ordered_product(std::span<const ComplexMatrix> ops, const BitString &t) {
    if (ops.size() != t.size()) {
        throw std::invalid_argument("ordered_product: bit string length does not match operator count");
    }
    if (ops.empty()) {
        throw std::invalid_argument("ordered_product: empty operator family");
    }
    Eigen::Index dim = ops[0].rows();
    for (const auto &op : ops) {
        if (op.rows() != dim || op.cols() != dim) {
            throw std::invalid_argument("ordered_product: operators must be square with equal dimensions");
        }
    }
    ComplexMatrix out = identity(dim);
    for (std::size_t k = 0; k < ops.size(); ++k) {
        if (t[k]) {
            out = out * ops[k];
        }
    }
    return out;
}

StateVector apply_alice(const ComplexMatrix &m, const StateVector &v, BipartiteShape shape) {
    require_shape(v, shape);
    if (m.rows() != shape.dim_a || m.cols() != shape.dim_a) {
        throw std::invalid_argument("apply_alice: operator dimension mismatch");
    }
    StateVector out(v.size());
    Eigen::Map<ComplexMatrix>(out.data(), shape.dim_b, shape.dim_a).noalias() =
        coefficient_view(v, shape) * m.transpose();
    return out;
}

StateVector apply_bob(const ComplexMatrix &n, const StateVector &v, BipartiteShape shape) {
    require_shape(v, shape);
    if (n.rows() != shape.dim_b || n.cols() != shape.dim_b) {
        throw std::invalid_argument("apply_bob: operator dimension mismatch");
    }
    StateVector out(v.size());
    Eigen::Map<ComplexMatrix>(out.data(), shape.dim_b, shape.dim_a).noalias() = n * coefficient_view(v, shape);
    return out;
}

Complex bipartite_expectation(const ComplexMatrix &m, const ComplexMatrix &n, const StateVector &v,
                              BipartiteShape shape) {
    StateVector w = apply_bob(n, apply_alice(m, v, shape), shape);
    return v.dot(w);
}

}  // namespace pchsh
