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

#include "qbench/gst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qbench/parallel.hpp"

namespace qbench {

namespace {

constexpr int kDim = 2;   // single qubit throughout
constexpr int kSup = 4;   // superoperator dimension d^2

Mat hermitian_part(const Mat& x) { return (x + x.adjoint()) / 2.0; }

// Eigen-clip a Hermitian matrix to the PSD cone with a spectral floor.
Mat clip_psd(const Mat& h, double floor) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  Eigen::VectorXd vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    vals(i) = std::max(vals(i), floor);
  }
  return es.eigenvectors() * vals.asDiagonal() *
         es.eigenvectors().adjoint();
}

Mat psd_sqrt(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  Eigen::VectorXd vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    vals(i) = std::sqrt(std::max(vals(i), 0.0));
  }
  return es.eigenvectors() * vals.asDiagonal() *
         es.eigenvectors().adjoint();
}

Mat psd_inv_sqrt(const Mat& h, double ridge) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  Eigen::VectorXd vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    vals(i) = 1.0 / std::sqrt(std::max(vals(i), ridge));
  }
  return es.eigenvectors() * vals.asDiagonal() *
         es.eigenvectors().adjoint();
}

Vec vec_identity() {
  Vec v = Vec::Zero(kSup);
  v(0) = 1.0;
  v(3) = 1.0;
  return v;
}

Circuit frame_circuit(const GstDesign& design, const std::vector<Gate>& mid,
                      int i, int j, std::string tag) {
  Circuit c;
  c.layers = design.fiducials[std::size_t(j)];
  c.layers.insert(c.layers.end(), mid.begin(), mid.end());
  c.layers.insert(c.layers.end(), design.fiducials[std::size_t(i)].begin(),
                  design.fiducials[std::size_t(i)].end());
  c.target = 0;
  c.depth = int(c.layers.size());
  c.tag = std::move(tag);
  return c;
}

int parse_field(const std::string& tag, const std::string& field) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(field, &used);
    if (used != field.size() || v < 0) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw DataFormatError("bad index '" + field + "' in circuit tag '" + tag +
                          "'");
  }
}

}  // namespace

void validate(const GstDesign& design) {
  if (!design.includes_identity_slot) {
    throw ConfigError(
        "GST design must include the identity-slot circuits; the Gram "
        "matrix is not measurable without them");
  }
  if (design.fiducials.size() < 4) {
    throw ConfigError(
        "need at least 4 fiducials for an informationally complete "
        "single-qubit frame");
  }
  if (!design.fiducials.front().empty()) {
    throw ConfigError("fiducials[0] must be the empty sequence");
  }
  if (design.gate_labels.empty()) throw ConfigError("no gates under test");
  if (design.germs.empty()) throw ConfigError("GST design needs germs");
  for (const auto& germ : design.germs) {
    if (germ.empty()) throw ConfigError("empty germ sequence");
  }
  if (design.max_reps < 1) throw ConfigError("max_reps must be >= 1");
  if (design.gram_condition_bound <= 1.0) {
    throw ConfigError("gram_condition_bound must exceed 1");
  }
}

GstKey parse_gst_tag(const std::string& tag) {
  std::vector<std::string> parts;
  std::stringstream ss(tag);
  std::string piece;
  while (std::getline(ss, piece, ':')) parts.push_back(piece);
  GstKey key;
  if (parts.size() == 4 && parts[0] == "g") {
    key.kind = GstKey::Kind::Gate;
    key.gate = parse_field(tag, parts[1]);
    key.i = parse_field(tag, parts[2]);
    key.j = parse_field(tag, parts[3]);
    return key;
  }
  if (parts.size() == 3 && parts[0] == "I") {
    key.kind = GstKey::Kind::Identity;
    key.i = parse_field(tag, parts[1]);
    key.j = parse_field(tag, parts[2]);
    return key;
  }
  if (parts.size() == 2 && parts[0] == "fid") {
    key.kind = GstKey::Kind::Fiducial;
    key.a = parse_field(tag, parts[1]);
    return key;
  }
  if (parts.size() == 5 && parts[0] == "germ") {
    key.kind = GstKey::Kind::Germ;
    key.germ = parse_field(tag, parts[1]);
    key.reps = parse_field(tag, parts[2]);
    key.i = parse_field(tag, parts[3]);
    key.j = parse_field(tag, parts[4]);
    return key;
  }
  throw DataFormatError("unrecognized circuit tag '" + tag + "'");
}

std::vector<Circuit> generate_gst_circuits(const GstDesign& design) {
  validate(design);
  const int nf = int(design.fiducials.size());
  std::vector<Circuit> out;

  for (int k = 0; k < int(design.gate_labels.size()); ++k) {
    const std::vector<Gate> mid = {design.gate_labels[std::size_t(k)]};
    for (int i = 0; i < nf; ++i) {
      for (int j = 0; j < nf; ++j) {
        out.push_back(frame_circuit(design, mid, i, j,
                                    "g:" + std::to_string(k) + ":" +
                                        std::to_string(i) + ":" +
                                        std::to_string(j)));
      }
    }
  }
  for (int a = 0; a < nf; ++a) {
    Circuit c;
    c.layers = design.fiducials[std::size_t(a)];
    c.target = 0;
    c.depth = int(c.layers.size());
    c.tag = "fid:" + std::to_string(a);
    out.push_back(std::move(c));
  }
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nf; ++j) {
      out.push_back(frame_circuit(design, {}, i, j,
                                  "I:" + std::to_string(i) + ":" +
                                      std::to_string(j)));
    }
  }
  for (int g = 0; g < int(design.germs.size()); ++g) {
    for (int p = 1; p <= design.max_reps; ++p) {
      std::vector<Gate> mid;
      for (int rep = 0; rep < p; ++rep) {
        const auto& germ = design.germs[std::size_t(g)];
        mid.insert(mid.end(), germ.begin(), germ.end());
      }
      for (int i = 0; i < nf; ++i) {
        for (int j = 0; j < nf; ++j) {
          out.push_back(frame_circuit(
              design, mid, i, j,
              "germ:" + std::to_string(g) + ":" + std::to_string(p) + ":" +
                  std::to_string(i) + ":" + std::to_string(j)));
        }
      }
    }
  }
  return out;
}

GateSetEstimate ideal_estimate(const GstDesign& design) {
  GateSetEstimate est;
  est.rho = vectorize(basis_state(0));
  est.povm = {PovmElement{vectorize(basis_state(0)).vec},
              PovmElement{vectorize(basis_state(1)).vec}};
  for (Gate g : design.gate_labels) {
    est.gates[g] = superop_from_unitary(gate_unitary(g));
  }
  return est;
}

GateSetEstimate truth_estimate(const GstDesign& design, const NoiseParams& p) {
  validate(p);
  GateSetEstimate est;
  est.rho = vectorize(initial_state(p));
  Mat m0 = Mat::Zero(kDim, kDim);
  m0(0, 0) = 1.0 - p.p01;
  m0(1, 1) = p.p10;
  Mat m1 = Mat::Identity(kDim, kDim) - m0;
  est.povm = {PovmElement{vectorize(DensityMatrix{m0}).vec},
              PovmElement{vectorize(DensityMatrix{m1}).vec}};
  for (Gate g : design.gate_labels) {
    est.gates[g] = noisy_gate(g, p);
  }
  return est;
}

double predicted_probability(const GateSetEstimate& est, const Circuit& c) {
  Vec state = est.rho.vec;
  for (Gate g : full_sequence(c)) {
    const auto it = est.gates.find(g);
    if (it == est.gates.end()) {
      throw DataFormatError("circuit uses gate '" +
                            std::string(gate_name(g)) +
                            "' which the estimate does not contain");
    }
    state = it->second.mat * state;
  }
  const double p0 = est.povm.at(0).vec.dot(state).real();
  if (c.target == 0) return p0;
  if (est.povm.size() > 1) return est.povm[1].vec.dot(state).real();
  return 1.0 - p0;
}

GateSetEstimate transform_gauge(const GateSetEstimate& est, const Mat& t) {
  if (t.rows() != kSup || t.cols() != kSup) {
    throw InvalidDimensionError("gauge transform must be 4x4");
  }
  const Mat tinv = t.inverse();
  GateSetEstimate out = est;
  out.rho.vec = t * est.rho.vec;
  for (std::size_t o = 0; o < est.povm.size(); ++o) {
    out.povm[o].vec = tinv.adjoint() * est.povm[o].vec;
  }
  for (const auto& [g, s] : est.gates) {
    out.gates[g] = Superoperator{t * s.mat * tinv};
  }
  return out;
}

std::map<std::string, double> frequency_by_tag(const GstData& data) {
  std::vector<long> shots(data.circuits.size(), 0);
  std::vector<long> counts(data.circuits.size(), 0);
  for (const ShotRecord& r : data.records) {
    if (r.circuit_id < 0 || std::size_t(r.circuit_id) >= data.circuits.size()) {
      throw DataFormatError("record references circuit " +
                            std::to_string(r.circuit_id) +
                            " outside the circuit list");
    }
    shots[std::size_t(r.circuit_id)] += r.shots;
    counts[std::size_t(r.circuit_id)] += r.count_target;
  }
  std::map<std::string, double> freq;
  for (std::size_t i = 0; i < data.circuits.size(); ++i) {
    if (shots[i] == 0) continue;
    const double f_target = double(counts[i]) / double(shots[i]);
    freq[data.circuits[i].tag] =
        data.circuits[i].target == 0 ? f_target : 1.0 - f_target;
  }
  return freq;
}

namespace {

double tag_freq(const std::map<std::string, double>& freq,
                const std::string& tag) {
  const auto it = freq.find(tag);
  if (it == freq.end()) {
    throw InsufficientDataError("no measured frequency for circuit tag '" +
                                tag + "'");
  }
  return it->second;
}

}  // namespace

GateSetEstimate linear_inversion(
    const std::map<std::string, double>& freq_by_tag,
    const GstDesign& design) {
  validate(design);

  // Ideal fiducial frame: column j of B is F_j acting on vec(|0><0|). The
  // matrix-unit basis C_mn = |m><n| vectorizes to standard basis vectors, so
  // no extra change of basis appears anywhere.
  Mat b = Mat::Zero(kSup, kSup);
  const Vec rho0 = vectorize(basis_state(0)).vec;
  for (int j = 0; j < kSup; ++j) {
    Vec col = rho0;
    for (Gate g : design.fiducials[std::size_t(j)]) {
      col = superop_from_unitary(gate_unitary(g)).mat * col;
    }
    b.col(j) = col;
  }

  Mat gram = Mat::Zero(kSup, kSup);
  for (int i = 0; i < kSup; ++i) {
    for (int j = 0; j < kSup; ++j) {
      gram(i, j) = tag_freq(
          freq_by_tag, "I:" + std::to_string(i) + ":" + std::to_string(j));
    }
  }

  Eigen::JacobiSVD<Mat> svd(gram);
  const double smin = svd.singularValues().minCoeff();
  const double cond =
      smin > 0 ? svd.singularValues().maxCoeff() / smin
               : std::numeric_limits<double>::infinity();
  if (!(cond < design.gram_condition_bound)) {
    throw GramSingularError(
        "Gram matrix condition number " + std::to_string(cond) +
            " exceeds the design bound; the fiducial set does not resolve "
            "the state space from this data",
        cond);
  }

  const Eigen::PartialPivLU<Mat> gram_lu(gram);
  const Eigen::PartialPivLU<Mat> b_lu(b);
  const Mat b_inv = b_lu.inverse();

  GateSetEstimate est;
  for (int k = 0; k < int(design.gate_labels.size()); ++k) {
    Mat pk = Mat::Zero(kSup, kSup);
    for (int i = 0; i < kSup; ++i) {
      for (int j = 0; j < kSup; ++j) {
        pk(i, j) = tag_freq(freq_by_tag, "g:" + std::to_string(k) + ":" +
                                             std::to_string(i) + ":" +
                                             std::to_string(j));
      }
    }
    est.gates[design.gate_labels[std::size_t(k)]] =
        Superoperator{b * gram_lu.solve(pk) * b_inv};
  }

  est.rho = StateVec{b * gram_lu.solve(Vec(gram.col(0)))};
  const Eigen::RowVectorXcd effect = gram.row(0) * b_inv;
  est.povm = {PovmElement{effect.adjoint()},
              PovmElement{vec_identity() - Vec(effect.adjoint())}};
  return est;
}

GateSetEstimate linear_inversion(const GstData& data,
                                 const GstDesign& design) {
  GateSetEstimate est = linear_inversion(frequency_by_tag(data), design);
  est.loglik = log_likelihood(est, data);
  return est;
}

GateSetEstimate project_cptp(const GateSetEstimate& est) {
  // Spectral floor: strictly positive eigenvalues keep every Kraus (and
  // POVM factor) direction active so the MLE gradient can move them.
  constexpr double kFloor = 1e-6;
  GateSetEstimate out = est;

  for (const auto& [label, sup] : est.gates) {
    const Mat choi = clip_psd(choi_matrix(sup), kFloor);
    Eigen::SelfAdjointEigenSolver<Mat> es(choi);
    KrausSet ks;
    for (Eigen::Index s = 0; s < kSup; ++s) {
      const double lam = std::max(es.eigenvalues()(s), 0.0);
      Mat e = Mat::Zero(kDim, kDim);
      for (int i = 0; i < kDim; ++i) {
        for (int k = 0; k < kDim; ++k) {
          e(k, i) = std::sqrt(lam) * es.eigenvectors()(i * kDim + k, s);
        }
      }
      ks.ops.push_back(std::move(e));
    }
    Mat m = Mat::Zero(kDim, kDim);
    for (const Mat& e : ks.ops) m += e.adjoint() * e;
    const Mat fix = psd_inv_sqrt(m, 1e-12);
    for (Mat& e : ks.ops) e = e * fix;
    out.gates[label] = superop_from_kraus(ks);
  }

  Mat rho = clip_psd(devectorize(est.rho).mat, kFloor);
  rho /= rho.trace().real();
  out.rho = vectorize(DensityMatrix{rho});

  if (est.povm.size() != 2) {
    throw InvalidDimensionError("projection expects a two-outcome POVM");
  }
  Mat m0 = clip_psd(devectorize_mat(est.povm[0].vec), kFloor);
  Mat m1 = clip_psd(devectorize_mat(est.povm[1].vec), kFloor);
  const Mat renorm = psd_inv_sqrt(m0 + m1, 1e-12);
  m0 = renorm * m0 * renorm;
  m1 = Mat::Identity(kDim, kDim) - m0;
  out.povm[0].vec = vectorize(DensityMatrix{m0}).vec;
  out.povm[1].vec = vectorize(DensityMatrix{m1}).vec;
  out.loglik = 0.0;
  return out;
}

namespace {

// One circuit's pooled data plus its gate word as label indices.
struct MleCircuit {
  std::vector<int> word;
  double n = 0.0;
  double f0 = 0.0;
  double f1 = 0.0;
};

struct MlePoint {
  std::vector<Mat> v;  // per label: (rank*d) x d, v^dag v = I
  Mat w;               // d x d, unit Frobenius norm
  Mat s;               // 2d x d, s^dag s = I
};

struct MleWork {
  std::vector<Mat> kraus;   // rank blocks per label, flattened
  std::vector<Mat> sups;    // per label
  int rank = 0;
  Vec rho;
  Mat m0, m1;
  Vec m0v, m1v;
};

MleWork build_work(const MlePoint& pt, int rank) {
  MleWork wk;
  wk.rank = rank;
  const std::size_t nl = pt.v.size();
  wk.kraus.resize(nl * std::size_t(rank));
  wk.sups.resize(nl);
  for (std::size_t l = 0; l < nl; ++l) {
    Mat sup = Mat::Zero(kSup, kSup);
    for (int s = 0; s < rank; ++s) {
      const Mat e = pt.v[l].block(s * kDim, 0, kDim, kDim);
      wk.kraus[l * std::size_t(rank) + std::size_t(s)] = e;
      sup += kron(e.conjugate(), e);
    }
    wk.sups[l] = std::move(sup);
  }
  const Mat rho = pt.w * pt.w.adjoint() / pt.w.squaredNorm();
  wk.rho = vectorize(DensityMatrix{hermitian_part(rho)}).vec;
  wk.m0 = pt.s.topRows(kDim).adjoint() * pt.s.topRows(kDim);
  wk.m1 = pt.s.bottomRows(kDim).adjoint() * pt.s.bottomRows(kDim);
  wk.m0v = vectorize(DensityMatrix{wk.m0}).vec;
  wk.m1v = vectorize(DensityMatrix{wk.m1}).vec;
  return wk;
}

struct CircuitEval {
  double loglik = 0.0;
  long clamps = 0;
  std::vector<Mat> gv;  // per label
  Mat gw, gs;
  bool with_grad = false;
};

CircuitEval eval_circuit(const MleCircuit& mc, const MleWork& wk,
                         const MlePoint& pt, double eps, bool with_grad,
                         bool spam_grad) {
  CircuitEval out;
  out.with_grad = with_grad;
  const int t_len = int(mc.word.size());

  std::vector<Vec> fwd(std::size_t(t_len) + 1);
  fwd[0] = wk.rho;
  for (int t = 0; t < t_len; ++t) {
    fwd[std::size_t(t) + 1] =
        wk.sups[std::size_t(mc.word[std::size_t(t)])] * fwd[std::size_t(t)];
  }
  const Mat rho_f = devectorize_mat(fwd.back());

  double p[2] = {wk.m0v.dot(fwd.back()).real(), wk.m1v.dot(fwd.back()).real()};
  double pc[2];
  for (int o = 0; o < 2; ++o) {
    pc[o] = std::min(std::max(p[o], eps), 1.0);
    const double f = o == 0 ? mc.f0 : mc.f1;
    if (pc[o] != p[o] && f > 0.0) ++out.clamps;
  }
  out.loglik = mc.n * (mc.f0 * std::log(pc[0]) + mc.f1 * std::log(pc[1]));
  if (!with_grad) return out;

  out.gv.assign(pt.v.size(), Mat::Zero(wk.rank * kDim, kDim));
  out.gw = Mat::Zero(kDim, kDim);
  out.gs = Mat::Zero(2 * kDim, kDim);

  for (int o = 0; o < 2; ++o) {
    const double f = o == 0 ? mc.f0 : mc.f1;
    if (f <= 0.0) continue;
    const double c = mc.n * f / pc[o];

    if (spam_grad) {
      out.gs.block(o * kDim, 0, kDim, kDim) +=
          c * (pt.s.block(o * kDim, 0, kDim, kDim) * rho_f);
    }

    Vec bwd = o == 0 ? wk.m0v : wk.m1v;
    for (int t = t_len - 1; t >= 0; --t) {
      const int l = mc.word[std::size_t(t)];
      const Mat bm = devectorize_mat(bwd);
      const Mat am = devectorize_mat(fwd[std::size_t(t)]);
      for (int s = 0; s < wk.rank; ++s) {
        const Mat& e = wk.kraus[std::size_t(l) * std::size_t(wk.rank) +
                                std::size_t(s)];
        out.gv[std::size_t(l)].block(s * kDim, 0, kDim, kDim) +=
            c * (bm.adjoint() * e * am);
      }
      bwd = wk.sups[std::size_t(l)].adjoint() * bwd;
    }

    if (spam_grad) {
      const Mat x = devectorize_mat(bwd);
      const double tau = pt.w.squaredNorm();
      out.gw += c * ((x.adjoint() * pt.w) - p[o] * pt.w) / tau;
    }
  }
  return out;
}

struct TotalEval {
  double loglik = 0.0;
  long clamps = 0;
  std::vector<Mat> gv;
  Mat gw, gs;
};

TotalEval eval_all(const std::vector<MleCircuit>& mcs, const MleWork& wk,
                   const MlePoint& pt, double eps, bool with_grad,
                   bool spam_grad) {
  std::vector<CircuitEval> slots(mcs.size());
  par::for_index(mcs.size(), [&](std::size_t i) {
    slots[i] = eval_circuit(mcs[i], wk, pt, eps, with_grad, spam_grad);
  });
  TotalEval tot;
  tot.gv.assign(pt.v.size(), Mat::Zero(wk.rank * kDim, kDim));
  tot.gw = Mat::Zero(kDim, kDim);
  tot.gs = Mat::Zero(2 * kDim, kDim);
  for (const CircuitEval& ev : slots) {  // ordered: thread-count invariant
    tot.loglik += ev.loglik;
    tot.clamps += ev.clamps;
    if (ev.with_grad) {
      for (std::size_t l = 0; l < tot.gv.size(); ++l) tot.gv[l] += ev.gv[l];
      tot.gw += ev.gw;
      tot.gs += ev.gs;
    }
  }
  return tot;
}

Mat stiefel_project(const Mat& v, const Mat& grad) {
  const Mat vg = v.adjoint() * grad;
  return grad - v * ((vg + vg.adjoint()) / 2.0);
}

// QR retraction with the R-diagonal phase fixed so the map is smooth and
// deterministic.
Mat stiefel_retract(const Mat& v) {
  Eigen::HouseholderQR<Mat> qr(v);
  Mat q = Mat(qr.householderQ()).leftCols(v.cols());
  const Mat r = qr.matrixQR().topRows(v.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    const Cplx rd = r(c, c);
    const double mag = std::abs(rd);
    if (mag > 1e-300) q.col(c) *= rd / mag;
  }
  return q;
}

Mat sphere_project(const Mat& w, const Mat& grad) {
  const double inner = (w.conjugate().cwiseProduct(grad)).sum().real();
  return grad - inner * w;
}

double tangent_norm_sq(const std::vector<Mat>& gv, const Mat& gw,
                       const Mat& gs) {
  double n = 0.0;
  for (const Mat& g : gv) n += g.squaredNorm();
  return n + gw.squaredNorm() + gs.squaredNorm();
}

// Kraus stack of a channel, eigenvalues below clip dropped to zero blocks;
// rank mismatches are padded or truncated and trace preservation restored.
Mat stack_from_superop(const Superoperator& sup, int rank) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(choi_matrix(sup)));
  std::vector<std::pair<double, Eigen::Index>> order;
  for (Eigen::Index s = 0; s < kSup; ++s) {
    order.emplace_back(es.eigenvalues()(s), s);
  }
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  Mat v = Mat::Zero(rank * kDim, kDim);
  for (int s = 0; s < rank && s < kSup; ++s) {
    const double lam = std::max(order[std::size_t(s)].first, 0.0);
    const Eigen::Index col = order[std::size_t(s)].second;
    for (int i = 0; i < kDim; ++i) {
      for (int k = 0; k < kDim; ++k) {
        v(s * kDim + k, i) =
            std::sqrt(lam) * es.eigenvectors()(i * kDim + k, col);
      }
    }
  }
  const Mat fix = psd_inv_sqrt(v.adjoint() * v, 1e-12);
  return v * fix;
}

}  // namespace

double log_likelihood(const GateSetEstimate& est, const GstData& data,
                      double clamp_eps) {
  std::vector<double> shots(data.circuits.size(), 0.0);
  std::vector<double> counts(data.circuits.size(), 0.0);
  for (const ShotRecord& r : data.records) {
    shots.at(std::size_t(r.circuit_id)) += r.shots;
    counts.at(std::size_t(r.circuit_id)) += r.count_target;
  }
  double ll = 0.0;
  for (std::size_t i = 0; i < data.circuits.size(); ++i) {
    if (shots[i] <= 0.0) continue;
    const Circuit& c = data.circuits[i];
    const double f_t = counts[i] / shots[i];
    const double f0 = c.target == 0 ? f_t : 1.0 - f_t;
    double p0 = predicted_probability(est, c);
    if (c.target != 0) p0 = 1.0 - p0;
    const double pc0 = std::min(std::max(p0, clamp_eps), 1.0);
    const double pc1 = std::min(std::max(1.0 - p0, clamp_eps), 1.0);
    if (f0 > 0.0) ll += shots[i] * f0 * std::log(pc0);
    if (f0 < 1.0) ll += shots[i] * (1.0 - f0) * std::log(pc1);
  }
  return ll;
}

GateSetEstimate mle_refine(const GateSetEstimate& init, const GstData& data,
                           const MleOptions& opts, MleDiagnostics* diag) {
  if (opts.rank < 1 || opts.rank > kSup) {
    throw ConfigError("Kraus rank must lie in [1, 4]");
  }
  if (init.povm.size() != 2) {
    throw InvalidDimensionError("MLE expects a two-outcome POVM");
  }

  const GateSetEstimate start = project_cptp(init);

  std::vector<Gate> labels;
  for (const auto& [g, sup] : start.gates) labels.push_back(g);

  // Pool records per circuit; circuits without data carry no weight.
  std::vector<double> shots(data.circuits.size(), 0.0);
  std::vector<double> counts(data.circuits.size(), 0.0);
  for (const ShotRecord& r : data.records) {
    if (r.circuit_id < 0 || std::size_t(r.circuit_id) >= data.circuits.size()) {
      throw DataFormatError("record references a circuit outside the list");
    }
    shots[std::size_t(r.circuit_id)] += r.shots;
    counts[std::size_t(r.circuit_id)] += r.count_target;
  }
  std::vector<MleCircuit> mcs;
  double n_total = 0.0;
  for (std::size_t i = 0; i < data.circuits.size(); ++i) {
    if (shots[i] <= 0.0) continue;
    MleCircuit mc;
    const Circuit& c = data.circuits[i];
    for (Gate g : full_sequence(c)) {
      const auto it = std::find(labels.begin(), labels.end(), g);
      if (it == labels.end()) {
        throw DataFormatError("circuit uses gate '" +
                              std::string(gate_name(g)) +
                              "' which the estimate does not contain");
      }
      mc.word.push_back(int(it - labels.begin()));
    }
    const double f_t = counts[i] / shots[i];
    mc.n = shots[i];
    mc.f0 = c.target == 0 ? f_t : 1.0 - f_t;
    mc.f1 = 1.0 - mc.f0;
    mcs.push_back(std::move(mc));
    n_total += shots[i];
  }
  if (mcs.empty() || n_total <= 0.0) {
    throw InsufficientDataError("MLE needs at least one recorded circuit");
  }

  MlePoint pt;
  for (Gate g : labels) {
    pt.v.push_back(stack_from_superop(start.gates.at(g), opts.rank));
  }
  {
    const Mat rho = clip_psd(devectorize(start.rho).mat, 0.0);
    Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0);
    pt.w = es.eigenvectors() * vals.cwiseSqrt().asDiagonal();
    const double nrm = pt.w.norm();
    pt.w = nrm > 1e-12 ? Mat(pt.w / nrm) : Mat(Mat::Identity(kDim, kDim) /
                                               std::sqrt(double(kDim)));
  }
  {
    Mat s(2 * kDim, kDim);
    s.topRows(kDim) = psd_sqrt(devectorize_mat(start.povm[0].vec));
    s.bottomRows(kDim) = psd_sqrt(devectorize_mat(start.povm[1].vec));
    pt.s = s * psd_inv_sqrt(s.adjoint() * s, 1e-12);
  }

  MleDiagnostics local;
  MleDiagnostics& dg = diag ? *diag : local;
  dg = MleDiagnostics{};

  MleWork wk = build_work(pt, opts.rank);
  TotalEval cur = eval_all(mcs, wk, pt, opts.clamp_eps, true,
                           opts.optimize_spam);
  dg.loglik_trace.push_back(cur.loglik);
  dg.clamp_events += cur.clamps;

  double step = 1.0;
  constexpr double kArmijo = 1e-4;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    std::vector<Mat> xi_v(labels.size());
    for (std::size_t l = 0; l < labels.size(); ++l) {
      xi_v[l] = stiefel_project(pt.v[l], cur.gv[l]);
    }
    Mat xi_w = opts.optimize_spam ? sphere_project(pt.w, cur.gw)
                                  : Mat(Mat::Zero(kDim, kDim));
    Mat xi_s = opts.optimize_spam ? stiefel_project(pt.s, cur.gs)
                                  : Mat(Mat::Zero(2 * kDim, kDim));

    const double gnorm_sq = tangent_norm_sq(xi_v, xi_w, xi_s);
    dg.final_grad_norm = std::sqrt(gnorm_sq) / n_total;
    dg.iterations = iter;
    if (dg.final_grad_norm < opts.grad_tol) {
      dg.converged = true;
      break;
    }

    bool accepted = false;
    for (int half = 0; half <= 50; ++half) {
      MlePoint cand;
      cand.v.resize(labels.size());
      for (std::size_t l = 0; l < labels.size(); ++l) {
        cand.v[l] = stiefel_retract(pt.v[l] + step * xi_v[l]);
      }
      if (opts.optimize_spam) {
        const Mat wn = pt.w + step * xi_w;
        cand.w = wn / wn.norm();
        cand.s = stiefel_retract(pt.s + step * xi_s);
      } else {
        cand.w = pt.w;
        cand.s = pt.s;
      }
      MleWork cwk = build_work(cand, opts.rank);
      TotalEval cev = eval_all(mcs, cwk, cand, opts.clamp_eps, false, false);
      if (cev.loglik >= cur.loglik + kArmijo * step * gnorm_sq) {
        pt = std::move(cand);
        wk = std::move(cwk);
        cur = eval_all(mcs, wk, pt, opts.clamp_eps, true, opts.optimize_spam);
        dg.loglik_trace.push_back(cur.loglik);
        dg.clamp_events += cur.clamps;
        if (half == 0) step *= 1.5;
        accepted = true;
        break;
      }
      step /= 2.0;
    }
    constexpr std::size_t kStallWindow = 25;
    if (accepted && opts.f_tol > 0.0 &&
        dg.loglik_trace.size() > kStallWindow &&
        dg.loglik_trace.back() -
                dg.loglik_trace[dg.loglik_trace.size() - 1 - kStallWindow] <
            opts.f_tol) {
      dg.stalled = true;
      dg.converged = true;
      dg.iterations = iter + 1;
      break;
    }
    if (!accepted) {
      // The likelihood surface is locally flat beyond float resolution;
      // report convergence with the exhaustion flag raised.
      dg.line_search_exhausted = true;
      dg.converged = true;
      dg.iterations = iter + 1;
      break;
    }
    if (iter == opts.max_iters - 1) dg.iterations = opts.max_iters;
  }

  GateSetEstimate out;
  for (std::size_t l = 0; l < labels.size(); ++l) {
    KrausSet ks;
    for (int s = 0; s < opts.rank; ++s) {
      ks.ops.push_back(pt.v[l].block(s * kDim, 0, kDim, kDim));
    }
    out.gates[labels[l]] = superop_from_kraus(ks);
  }
  const Mat rho = pt.w * pt.w.adjoint() / pt.w.squaredNorm();
  out.rho = vectorize(DensityMatrix{hermitian_part(rho)});
  const Mat m0 = pt.s.topRows(kDim).adjoint() * pt.s.topRows(kDim);
  const Mat m1 = pt.s.bottomRows(kDim).adjoint() * pt.s.bottomRows(kDim);
  out.povm = {PovmElement{vectorize(DensityMatrix{m0}).vec},
              PovmElement{vectorize(DensityMatrix{m1}).vec}};
  out.loglik = cur.loglik;
  out.gauge_fixed = false;
  return out;
}

ReadoutEstimate readout_from_estimate(const GateSetEstimate& est) {
  const Mat m0 = devectorize_mat(est.povm.at(0).vec);
  ReadoutEstimate r;
  r.p01 = 1.0 - m0(0, 0).real();
  r.p10 = m0(1, 1).real();
  return r;
}

}  // namespace qbench
