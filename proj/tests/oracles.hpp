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

// Independent reference implementations used as test oracles. Everything in
// this header recomputes results from first principles (density matrices and
// elementwise index loops) without going through the library's superoperator
// machinery, so agreement is evidence rather than tautology.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "qbench/circuit.hpp"
#include "qbench/gates.hpp"
#include "qbench/noise.hpp"
#include "qbench/rng.hpp"

namespace qtest {

using qbench::Cplx;
using qbench::Mat;
using qbench::Vec;

inline constexpr double kPi = 3.14159265358979323846;

// ---- random inputs -------------------------------------------------------

/// Haar-ish random unitary: QR of a complex Ginibre matrix with the R
/// diagonal phases absorbed.
inline Mat haar_unitary(qbench::Rng& rng, Eigen::Index d = 2) {
  Mat g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      g(i, j) = Cplx(rng.normal(), rng.normal());
    }
  }
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    Cplx ph = r(j, j) / std::abs(r(j, j));
    q.col(j) *= ph;
  }
  return q;
}

/// Random full-rank density matrix, G G^dag normalized.
inline Mat random_density(qbench::Rng& rng, Eigen::Index d = 2) {
  Mat g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      g(i, j) = Cplx(rng.normal(), rng.normal());
    }
  }
  Mat rho = g * g.adjoint();
  return rho / rho.trace();
}

/// Random Kraus set of the given rank: columns of a Haar isometry. Trace
/// preserving by construction.
inline std::vector<Mat> random_kraus(qbench::Rng& rng, int rank) {
  Mat u = haar_unitary(rng, 2 * rank);
  std::vector<Mat> ops;
  for (int k = 0; k < rank; ++k) {
    Mat e(2, 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) e(i, j) = u(2 * k + i, j);
    }
    ops.push_back(e);
  }
  return ops;
}

// ---- elementwise channel arithmetic --------------------------------------

/// sum_k E_k rho E_k^dag by plain matrix products.
inline Mat apply_kraus(const std::vector<Mat>& ops, const Mat& rho) {
  Mat out = Mat::Zero(rho.rows(), rho.cols());
  for (const Mat& e : ops) out += e * rho * e.adjoint();
  return out;
}

/// Superoperator from Kraus operators by index loops. Under column stacking
/// S[i + d*j, k + d*l] = sum_m E_m(i,k) conj(E_m(j,l)).
inline Mat superop_elementwise(const std::vector<Mat>& ops) {
  const Eigen::Index d = ops.front().rows();
  Mat s = Mat::Zero(d * d, d * d);
  for (const Mat& e : ops) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
          for (Eigen::Index l = 0; l < d; ++l) {
            s(i + d * j, k + d * l) += e(i, k) * std::conj(e(j, l));
          }
        }
      }
    }
  }
  return s;
}

/// vec / devec with explicit column-stacking loops.
inline Vec vec_elementwise(const Mat& rho) {
  const Eigen::Index d = rho.rows();
  Vec v(d * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) v(i + d * j) = rho(i, j);
  }
  return v;
}

inline Mat devec_elementwise(const Vec& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(
      std::sqrt(static_cast<double>(v.size()))));
  Mat rho(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) rho(i, j) = v(i + d * j);
  }
  return rho;
}

// ---- fidelity by state 2-design ------------------------------------------

/// The six Pauli eigenstates (a projective 2-design for d = 2).
inline std::vector<Mat> stabilizer_densities() {
  const Cplx i(0.0, 1.0);
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<Eigen::Vector2cd> kets;
  kets.push_back({1.0, 0.0});
  kets.push_back({0.0, 1.0});
  kets.push_back({r, r});
  kets.push_back({r, -r});
  kets.push_back({r, r * i});
  kets.push_back({r, -r * i});
  std::vector<Mat> out;
  for (const auto& k : kets) out.push_back(k * k.adjoint());
  return out;
}

/// Average gate fidelity of the channel rho -> devec(S vec(rho)) against the
/// unitary u, computed as the exact mean over the six-state 2-design:
/// F_avg = mean_s <s| u^dag Lambda(|s><s|) u |s>.
inline double avg_fidelity_2design(const Mat& u, const Mat& s_noisy) {
  double acc = 0.0;
  const auto states = stabilizer_densities();
  for (const Mat& rho : states) {
    Mat out = devec_elementwise(s_noisy * vec_elementwise(rho));
    Mat ideal = u * rho * u.adjoint();
    acc += (ideal.adjoint() * out).trace().real();
  }
  return acc / static_cast<double>(states.size());
}

// ---- local copies of the gate and noise model ----------------------------

/// Rotation by theta about the azimuth-phi axis in the xy plane, written out
/// entry by entry.
inline Mat rotation_matrix(double phi, double theta) {
  const Cplx i(0.0, 1.0);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Mat u(2, 2);
  u(0, 0) = c;
  u(0, 1) = -i * s * std::exp(-i * phi);
  u(1, 0) = -i * s * std::exp(i * phi);
  u(1, 1) = c;
  return u;
}

inline Mat gate_matrix(qbench::Gate g) {
  using qbench::Gate;
  const double h = kPi / 2.0;
  switch (g) {
    case Gate::I: return Mat::Identity(2, 2);
    case Gate::X90: return rotation_matrix(0.0, h);
    case Gate::X90m: return rotation_matrix(0.0, -h);
    case Gate::X180: return rotation_matrix(0.0, kPi);
    case Gate::X180m: return rotation_matrix(0.0, -kPi);
    case Gate::Y90: return rotation_matrix(h, h);
    case Gate::Y90m: return rotation_matrix(h, -h);
    case Gate::Y180: return rotation_matrix(h, kPi);
    case Gate::Y180m: return rotation_matrix(h, -kPi);
  }
  return Mat::Identity(2, 2);
}

/// Relaxation Kraus operators rebuilt from the model definition: amplitude
/// damping gamma = 1 - exp(-t/T1) composed with pure dephasing at rate
/// 1/T2 - 1/(2 T1).
inline std::vector<Mat> relaxation_ops(const qbench::NoiseParams& p) {
  const double t = p.gate_time_s;
  const double gamma = 1.0 - std::exp(-t / p.t1_s);
  const double rate = std::max(1.0 / p.t2_s - 1.0 / (2.0 * p.t1_s), 0.0);
  const double q = 0.5 * (1.0 - std::exp(-t * rate));
  Mat e0 = Mat::Zero(2, 2), e1 = Mat::Zero(2, 2), z = Mat::Zero(2, 2);
  e0(0, 0) = 1.0;
  e0(1, 1) = std::sqrt(1.0 - gamma);
  e1(0, 1) = std::sqrt(gamma);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  std::vector<Mat> ops;
  ops.push_back(std::sqrt(1.0 - q) * e0);
  if (gamma > 0.0) ops.push_back(std::sqrt(1.0 - q) * e1);
  if (q > 0.0) {
    ops.push_back(std::sqrt(q) * z * e0);
    if (gamma > 0.0) ops.push_back(std::sqrt(q) * z * e1);
  }
  return ops;
}

/// Probability of reporting `target` for a circuit, by direct density-matrix
/// propagation: 2x2 states only, no superoperators anywhere.
inline double circuit_probability_dm(const qbench::Circuit& c,
                                     const qbench::NoiseParams& p) {
  Mat rho = Mat::Zero(2, 2);
  rho(0, 0) = 1.0 - p.init_excited;
  rho(1, 1) = p.init_excited;
  const auto relax = relaxation_ops(p);
  for (qbench::Gate g : qbench::full_sequence(c)) {
    Mat u = gate_matrix(g);
    rho = u * rho * u.adjoint();
    rho = apply_kraus(relax, rho);
  }
  const double pr0 = rho(0, 0).real();
  const double pr1 = rho(1, 1).real();
  const double report0 = pr0 * (1.0 - p.p01) + pr1 * p.p10;
  const double report1 = pr0 * p.p01 + pr1 * (1.0 - p.p10);
  return c.target == 0 ? report0 : report1;
}

/// Closed-form average fidelity of one noisy gate under the relaxation
/// model: F = (4 - gamma + 2 exp(-t/T2)) / 6. Derived from the Kraus traces;
/// gate independent because the relaxation channel is.
inline double analytic_fidelity_closed_form(const qbench::NoiseParams& p) {
  const double gamma = 1.0 - std::exp(-p.gate_time_s / p.t1_s);
  const double kappa = std::exp(-p.gate_time_s / p.t2_s);
  return (4.0 - gamma + 2.0 * kappa) / 6.0;
}

// ---- rank statistics and axis extraction ---------------------------------

/// Spearman rank correlation with average ranks on ties.
inline double spearman(const std::vector<double>& x,
                       const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * (static_cast<double>(i) +
                                static_cast<double>(j));
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double cxy = 0.0, cxx = 0.0, cyy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cxy += (rx[i] - mx) * (ry[i] - my);
    cxx += (rx[i] - mx) * (rx[i] - mx);
    cyy += (ry[i] - my) * (ry[i] - my);
  }
  return cxy / std::sqrt(cxx * cyy);
}

/// Axis azimuth and rotation angle of a phase-free xy-plane rotation,
/// U = cos(t/2) I - i sin(t/2) (cos(phi) sx + sin(phi) sy). Angle returned
/// in [0, 2 pi); only valid when the z component vanishes.
struct AxisAngle {
  double phi = 0.0;
  double theta = 0.0;
  double nz = 0.0;  // z component of sin(theta/2) * axis, should be ~0
};

inline AxisAngle axis_angle(const Mat& u) {
  const Cplx i(0.0, 1.0);
  const double c = 0.5 * u.trace().real();
  // Tr(U s_a) = -2 i sin(t/2) n_a.
  const Cplx tx = u(0, 1) + u(1, 0);
  const Cplx ty = i * u(0, 1) - i * u(1, 0);
  const Cplx tz = u(0, 0) - u(1, 1);
  AxisAngle out;
  const double sx = (i * tx / 2.0).real();
  const double sy = (i * ty / 2.0).real();
  out.nz = (i * tz / 2.0).real();
  const double s = std::sqrt(sx * sx + sy * sy);
  out.theta = 2.0 * std::atan2(s, c);
  out.phi = std::atan2(sy, sx);
  if (out.phi < 0.0) out.phi += 2.0 * kPi;
  return out;
}

/// Smallest distance between two angles on the circle.
inline double circ_dist(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * kPi);
  return std::min(d, 2.0 * kPi - d);
}

}  // namespace qtest
