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

#include "qbench/noise.hpp"

#include <cmath>
#include <string>

namespace qbench {

void validate(const NoiseParams& p) {
  if (!(p.t1_s > 0.0) || !(p.t2_s > 0.0)) {
    throw UnphysicalParamsError("t1 and t2 must be positive");
  }
  if (p.t2_s > 2.0 * p.t1_s + 1e-18) {
    throw UnphysicalParamsError("t2 exceeds 2*t1: t2 = " +
                                std::to_string(p.t2_s) + " s, t1 = " +
                                std::to_string(p.t1_s) + " s");
  }
  if (p.gate_time_s < 0.0) {
    throw UnphysicalParamsError("gate_time must be nonnegative");
  }
  if (p.p01 < 0.0 || p.p01 > 1.0 || p.p10 < 0.0 || p.p10 > 1.0) {
    throw UnphysicalParamsError("readout flip probabilities must be in [0,1]");
  }
  if (p.init_excited < 0.0 || p.init_excited > 1.0) {
    throw UnphysicalParamsError("init_excited must be in [0,1]");
  }
}

ReadoutModel readout_model(const NoiseParams& p) {
  validate(p);
  ReadoutModel m;
  m.confusion << 1.0 - p.p01, p.p01, p.p10, 1.0 - p.p10;
  return m;
}

Eigen::Vector2d apply_readout(const Eigen::Vector2d& true_probs,
                              const ReadoutModel& model) {
  if (true_probs.minCoeff() < -1e-12) {
    throw ConstraintViolationError("outcome distribution has negative entry " +
                                   std::to_string(true_probs.minCoeff()));
  }
  if (std::abs(true_probs.sum() - 1.0) > 1e-9) {
    throw ConstraintViolationError("outcome distribution sums to " +
                                   std::to_string(true_probs.sum()));
  }
  return model.confusion.transpose() * true_probs;
}

KrausSet relaxation_kraus(const NoiseParams& p) {
  validate(p);
  const double t = p.gate_time_s;
  const double gamma = 1.0 - std::exp(-t / p.t1_s);
  // Pure dephasing rate; zero when t2 = 2*t1.
  const double dephase_rate = 1.0 / p.t2_s - 1.0 / (2.0 * p.t1_s);
  const double q = 0.5 * (1.0 - std::exp(-t * std::max(dephase_rate, 0.0)));

  std::vector<Mat> damping;
  {
    Mat e0 = Mat::Zero(2, 2);
    e0(0, 0) = 1.0;
    e0(1, 1) = std::sqrt(1.0 - gamma);
    damping.push_back(e0);
    if (gamma > 0.0) {
      Mat e1 = Mat::Zero(2, 2);
      e1(0, 1) = std::sqrt(gamma);
      damping.push_back(e1);
    }
  }
  std::vector<Mat> dephasing;
  {
    dephasing.push_back(std::sqrt(1.0 - q) * Mat(Mat::Identity(2, 2)));
    if (q > 0.0) {
      dephasing.push_back(std::sqrt(q) * Mat(pauli_z().cast<Cplx>()));
    }
  }

  KrausSet out;
  for (const Mat& dz : dephasing) {
    for (const Mat& de : damping) {
      Mat op = dz * de;
      if (op.cwiseAbs().maxCoeff() > 0.0) {
        out.ops.push_back(std::move(op));
      }
    }
  }
  return out;
}

Superoperator relaxation_superop(const NoiseParams& p) {
  return superop_from_kraus(relaxation_kraus(p));
}

Superoperator noisy_gate(Axis axis, double angle, const NoiseParams& p) {
  return compose({superop_from_unitary(gate_unitary(axis, angle)),
                  relaxation_superop(p)});
}

Superoperator noisy_gate(Gate g, const NoiseParams& p) {
  return noisy_gate(gate_axis(g), gate_angle(g), p);
}

DensityMatrix initial_state(const NoiseParams& p) {
  validate(p);
  DensityMatrix rho{Mat::Zero(2, 2)};
  rho.mat(0, 0) = 1.0 - p.init_excited;
  rho.mat(1, 1) = p.init_excited;
  return rho;
}

GateTable::GateTable(const NoiseParams& p) {
  const Mat relax = relaxation_superop(p).mat;
  for (int i = 0; i < kNumGates; ++i) {
    const Gate g = static_cast<Gate>(i);
    superops[i] = relax * superop_from_unitary(gate_unitary(g)).mat;
  }
}

double analytic_gate_set_fidelity(const NoiseParams& p,
                                  const std::vector<Gate>& gates) {
  if (gates.empty()) {
    throw InsufficientDataError("empty gate set");
  }
  double acc = 0.0;
  for (Gate g : gates) {
    const Superoperator ideal = superop_from_unitary(gate_unitary(g));
    acc += avg_fidelity(ideal, noisy_gate(g, p));
  }
  return acc / double(gates.size());
}

}  // namespace qbench
