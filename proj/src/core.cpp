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

#include "qbench/core.hpp"

#include <cmath>
#include <string>

namespace qbench {

namespace {

Eigen::Index isqrt_exact(Eigen::Index n, const char* what) {
  auto r = static_cast<Eigen::Index>(std::llround(std::sqrt(double(n))));
  if (r * r != n) {
    throw InvalidDimensionError(std::string(what) +
                                " length is not a perfect square: " +
                                std::to_string(n));
  }
  return r;
}

void require_square_pow2(const Mat& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw InvalidDimensionError(std::string(what) + " is not square: " +
                                std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
  }
  if (!is_power_of_two(m.rows())) {
    throw InvalidDimensionError(std::string(what) +
                                " dimension is not a power of 2: " +
                                std::to_string(m.rows()));
  }
}

}  // namespace

Eigen::Index StateVec::dim() const {
  return isqrt_exact(vec.size(), "state vector");
}

Eigen::Index Superoperator::dim() const {
  if (mat.rows() != mat.cols()) {
    throw InvalidDimensionError("superoperator is not square");
  }
  return isqrt_exact(mat.rows(), "superoperator");
}

Eigen::Index PovmElement::dim() const {
  return isqrt_exact(vec.size(), "POVM element");
}

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityMatrix basis_state(Eigen::Index k, Eigen::Index d) {
  if (k < 0 || k >= d) {
    throw InvalidDimensionError("basis index out of range");
  }
  DensityMatrix rho{Mat::Zero(d, d)};
  rho.mat(k, k) = 1.0;
  return rho;
}

StateVec vectorize(const DensityMatrix& rho) {
  require_square_pow2(rho.mat, "density matrix");
  const Eigen::Index d = rho.dim();
  Vec v(d * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      v(i + d * j) = rho.mat(i, j);
    }
  }
  return StateVec{std::move(v)};
}

Mat devectorize_mat(const Vec& v) {
  const Eigen::Index d = isqrt_exact(v.size(), "vectorized matrix");
  Mat m(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      m(i, j) = v(i + d * j);
    }
  }
  return m;
}

DensityMatrix devectorize(const StateVec& v) {
  return DensityMatrix{devectorize_mat(v.vec)};
}

void validate_density(const DensityMatrix& rho, double herm_tol,
                      double trace_tol, double eig_tol) {
  require_square_pow2(rho.mat, "density matrix");
  const double herm = (rho.mat - rho.mat.adjoint()).cwiseAbs().maxCoeff();
  if (herm > herm_tol) {
    throw ConstraintViolationError("density matrix not Hermitian, deviation " +
                                   std::to_string(herm));
  }
  const double tr_dev = std::abs(rho.mat.trace() - Cplx(1.0, 0.0));
  if (tr_dev > trace_tol) {
    throw ConstraintViolationError("density matrix trace deviates by " +
                                   std::to_string(tr_dev));
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(
      0.5 * (rho.mat + Mat(rho.mat.adjoint())));
  if (es.eigenvalues().minCoeff() < -eig_tol) {
    throw ConstraintViolationError(
        "density matrix has negative eigenvalue " +
        std::to_string(es.eigenvalues().minCoeff()));
  }
}

double unitarity_deviation(const Mat& u) {
  return (u.adjoint() * u - Mat::Identity(u.cols(), u.cols()))
      .cwiseAbs()
      .maxCoeff();
}

bool is_unitary(const Mat& u, double tol) {
  return u.rows() == u.cols() && unitarity_deviation(u) <= tol;
}

double kraus_tp_deviation(const KrausSet& k) {
  if (k.ops.empty()) {
    throw ConstraintViolationError("empty Kraus set");
  }
  const Eigen::Index d = k.dim();
  Mat acc = Mat::Zero(d, d);
  for (const Mat& e : k.ops) {
    if (e.rows() != d || e.cols() != d) {
      throw InvalidDimensionError("Kraus operators have mixed dimensions");
    }
    acc += e.adjoint() * e;
  }
  return (acc - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
}

Superoperator identity_superop(Eigen::Index d) {
  return Superoperator{Mat::Identity(d * d, d * d)};
}

Superoperator superop_from_unitary(const Mat& u) {
  require_square_pow2(u, "unitary");
  const double dev = unitarity_deviation(u);
  if (dev > 1e-10) {
    throw NonUnitaryError("input deviates from unitarity by " +
                          std::to_string(dev));
  }
  return Superoperator{kron(u.conjugate(), u)};
}

Superoperator superop_from_kraus(const KrausSet& k) {
  const double dev = kraus_tp_deviation(k);
  if (dev > 1e-10) {
    throw ConstraintViolationError(
        "Kraus set is not trace-preserving, deviation " + std::to_string(dev));
  }
  require_square_pow2(k.ops.front(), "Kraus operator");
  const Eigen::Index d = k.dim();
  Mat s = Mat::Zero(d * d, d * d);
  for (const Mat& e : k.ops) {
    s += kron(e.conjugate(), e);
  }
  return Superoperator{std::move(s)};
}

Superoperator compose(const std::vector<Superoperator>& ops,
                      Eigen::Index dim_if_empty) {
  if (ops.empty()) {
    return identity_superop(dim_if_empty);
  }
  const Eigen::Index n = ops.front().mat.rows();
  Mat acc = ops.front().mat;
  for (std::size_t i = 1; i < ops.size(); ++i) {
    if (ops[i].mat.rows() != n || ops[i].mat.cols() != n) {
      throw InvalidDimensionError("composed superoperators have mixed sizes");
    }
    acc = ops[i].mat * acc;
  }
  return Superoperator{std::move(acc)};
}

Mat choi_matrix(const Superoperator& s) {
  const Eigen::Index d = s.dim();
  Mat choi(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index l = 0; l < d; ++l) {
          choi(i * d + k, j * d + l) = s.mat(k + d * l, i + d * j);
        }
      }
    }
  }
  return choi;
}

double choi_min_eigenvalue(const Superoperator& s) {
  Mat choi = choi_matrix(s);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (choi + Mat(choi.adjoint())));
  return es.eigenvalues().minCoeff();
}

double tp_deviation(const Superoperator& s) {
  const Eigen::Index d = s.dim();
  Vec id_vec = Vec::Zero(d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    id_vec(i + d * i) = 1.0;
  }
  return (s.mat.adjoint() * id_vec - id_vec).cwiseAbs().maxCoeff();
}

bool is_cptp(const Superoperator& s, double cp_tol, double tp_tol) {
  return choi_min_eigenvalue(s) >= -cp_tol && tp_deviation(s) <= tp_tol;
}

double ent_fidelity(const Superoperator& ideal, const Superoperator& noisy,
                    double* imag_residual) {
  if (ideal.mat.rows() != noisy.mat.rows() ||
      ideal.mat.cols() != noisy.mat.cols()) {
    throw InvalidDimensionError("fidelity arguments have mixed dimensions");
  }
  const Eigen::Index d = ideal.dim();
  const Cplx tr = (ideal.mat.adjoint() * noisy.mat).trace();
  const double imag = std::abs(tr.imag()) / double(d * d);
  if (imag_residual != nullptr) {
    *imag_residual = imag;
  }
  if (imag > 1e-6) {
    throw ConstraintViolationError(
        "entanglement fidelity has imaginary residual " +
        std::to_string(imag));
  }
  return tr.real() / double(d * d);
}

double avg_fidelity(const Superoperator& ideal, const Superoperator& noisy) {
  const Eigen::Index d = ideal.dim();
  return (double(d) * ent_fidelity(ideal, noisy) + 1.0) / (double(d) + 1.0);
}

}  // namespace qbench
