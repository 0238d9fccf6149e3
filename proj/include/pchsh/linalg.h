#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "pchsh/bitstring.h"

namespace pchsh {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kUnitaryTol = 1e-8;
inline constexpr double kDefaultZeroTol = 1e-10;

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix identity(Eigen::Index dim);

/// Kronecker product, block (i, j) of the result is a(i, j) * b.
ComplexMatrix tensor(const ComplexMatrix &a, const ComplexMatrix &b);

/// max |M_ij - conj(M_ji)|; +inf for non-square input.
double hermiticity_residual(const ComplexMatrix &m);
/// max |(M^dagger M - I)_ij|; +inf for non-square input.
double unitarity_residual(const ComplexMatrix &m);
/// max |(AB - BA)_ij|.
double commutator_residual(const ComplexMatrix &a, const ComplexMatrix &b);
/// max |a_ij - b_ij|; +inf on shape mismatch.
double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b);

bool is_hermitian(const ComplexMatrix &m, double tol = kHermitianTol);

/// Positive square root of M^2 for Hermitian M: eigenvalues replaced by their
/// absolute values. Throws std::invalid_argument for non-Hermitian input.
ComplexMatrix operator_abs(const ComplexMatrix &m);

/// M / |M| in M's eigenbasis. Eigenvalues with |lambda| < zero_tol are
/// replaced by +zero_tol first, so they map to +1. Hermitian and unitary.
ComplexMatrix sign_normalize(const ComplexMatrix &m, double zero_tol = kDefaultZeroTol);

/// prod_k ops[k]^{t_k}, smallest index leftmost.
ComplexMatrix ordered_product(std::span<const ComplexMatrix> ops, const BitString &t);

/// Shape of a vector on H_A (x) H_B, stored A-major: index = a * dim_b + b.
struct BipartiteShape {
    Eigen::Index dim_a = 1;
    Eigen::Index dim_b = 1;

    Eigen::Index total() const { return dim_a * dim_b; }
};

/// (M (x) I) v.
StateVector apply_alice(const ComplexMatrix &m, const StateVector &v, BipartiteShape shape);
/// (I (x) N) v.
StateVector apply_bob(const ComplexMatrix &n, const StateVector &v, BipartiteShape shape);
/// <v| (M (x) N) |v>.
Complex bipartite_expectation(const ComplexMatrix &m, const ComplexMatrix &n, const StateVector &v,
                              BipartiteShape shape);

}  // namespace pchsh
