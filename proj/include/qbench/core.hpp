// Copyright 2026 The qbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qbench/errors.hpp"

namespace qbench {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Vectorization is column-stacking throughout: vec(rho)[i + d*j] = rho(i, j).
// Under this convention vec(A rho B) = (B^T otimes A) vec(rho), so a unitary
// channel rho -> U rho U^dagger lifts to kron(conj(U), U) and a Kraus channel
// to sum_k kron(conj(E_k), E_k).

/// Density matrix of a d-dimensional system (d a power of 2).
struct DensityMatrix {
  Mat mat;
  Eigen::Index dim() const { return mat.rows(); }
};

/// Vectorized density matrix (length d^2).
struct StateVec {
  Vec vec;
  Eigen::Index dim() const;
};

/// d^2 x d^2 process matrix acting on vectorized density matrices.
struct Superoperator {
  Mat mat;
  Eigen::Index dim() const;
};

/// Kraus decomposition {E_k} of a trace-preserving channel.
struct KrausSet {
  std::vector<Mat> ops;
  Eigen::Index dim() const { return ops.empty() ? 0 : ops.front().rows(); }
};

/// Vectorized POVM element (row functional stored as a column vector).
struct PovmElement {
  Vec vec;
  Eigen::Index dim() const;
};

bool is_power_of_two(Eigen::Index n);

/// Kronecker product, (A otimes B)[i*rB + k, j*cB + l] = A(i,j) B(k,l).
Mat kron(const Mat& a, const Mat& b);

/// |k><k| on a d-dimensional system.
DensityMatrix basis_state(Eigen::Index k, Eigen::Index d = 2);

StateVec vectorize(const DensityMatrix& rho);
DensityMatrix devectorize(const StateVec& v);
Mat devectorize_mat(const Vec& v);

/// Throws if rho is not Hermitian / unit-trace / PSD within tolerance.
void validate_density(const DensityMatrix& rho, double herm_tol = 1e-12,
                      double trace_tol = 1e-12, double eig_tol = 1e-10);

/// max |U^dagger U - I|.
double unitarity_deviation(const Mat& u);
bool is_unitary(const Mat& u, double tol = 1e-10);

/// max |sum_k E_k^dagger E_k - I|.
double kraus_tp_deviation(const KrausSet& k);

Superoperator identity_superop(Eigen::Index d = 2);
Superoperator superop_from_unitary(const Mat& u);
Superoperator superop_from_kraus(const KrausSet& k);

/// Product in application order: the last element acts last.
Superoperator compose(const std::vector<Superoperator>& ops,
                      Eigen::Index dim_if_empty = 2);

/// Choi matrix, Choi[i*d + k, j*d + l] = S[k + d*l, i + d*j]; PSD iff the
/// channel is completely positive.
Mat choi_matrix(const Superoperator& s);

/// Minimum eigenvalue of the Hermitian part of the Choi matrix.
double choi_min_eigenvalue(const Superoperator& s);

/// max-norm of S^dagger vec(I) - vec(I); zero iff trace-preserving.
double tp_deviation(const Superoperator& s);

bool is_cptp(const Superoperator& s, double cp_tol = 1e-9,
             double tp_tol = 1e-9);

/// Re Tr(ideal^dagger noisy) / d^2. The imaginary residual is written to
/// *imag_residual when given; residuals above 1e-6 throw, they indicate
/// inputs that are not Hermiticity-preserving.
double ent_fidelity(const Superoperator& ideal, const Superoperator& noisy,
                    double* imag_residual = nullptr);

/// (d * ent_fidelity + 1) / (d + 1).
double avg_fidelity(const Superoperator& ideal, const Superoperator& noisy);

}  // namespace qbench
