// Copyright 2026 The fbtur Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fbtur/models.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "fbtur/errors.hpp"

namespace fbtur::models {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter(std::string(name) + " must be positive and finite");
}

JumpChannel clock_jump(int index, int pair, int from, int to, double rate, const ClockParams& p,
                       const double* energies) {
  JumpChannel ch;
  ch.index = index;
  ch.pair = pair;
  ch.op = std::sqrt(rate) * linalg::dyad(to, from, 3);
  ch.delta_s = p.beta * (energies[from] - energies[to]);
  return ch;
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  CMatrix ginibre(Eigen::Index n) {
    CMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(normal_(rng_), normal_(rng_)) / std::sqrt(2.0);
    }
    return m;
  }

  CMatrix haar_unitary(Eigen::Index n) {
    const Eigen::MatrixXcd z = ginibre(n);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    const Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    CMatrix u(n, n);
    // Fix the phases of R's diagonal so Q is Haar distributed.
    for (Eigen::Index j = 0; j < n; ++j) {
      const cplx d = r(j, j);
      const cplx phase = std::abs(d) > 0.0 ? d / std::abs(d) : cplx(1.0);
      u.col(j) = q.col(j) * phase;
    }
    return u;
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return normal_(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

FeedbackChannel random_feedback(Sampler& s, Eigen::Index dim, RandomFeedback kind) {
  if (kind == RandomFeedback::mixed) kind = static_cast<RandomFeedback>(s.integer(0, 2));
  switch (kind) {
    case RandomFeedback::identity:
      return FeedbackChannel::identity_map(dim);
    case RandomFeedback::unitary:
      return FeedbackChannel::unitary(s.haar_unitary(dim));
    default: {
      const int n = s.integer(2, 3);
      std::vector<double> w(n);
      double total = 0.0;
      for (auto& x : w) total += (x = s.uniform(0.1, 1.0));
      std::vector<CMatrix> kraus;
      for (double x : w) kraus.push_back(std::sqrt(x / total) * s.haar_unitary(dim));
      return FeedbackChannel::mixture(std::move(kraus));
    }
  }
}

}  // namespace

CMatrix clock_swap(int i, int j) {
  if (i < 0 || j < 0 || i > 2 || j > 2 || i == j) throw InvalidParameter("clock_swap needs two distinct levels");
  const int k = 3 - i - j;
  return linalg::dyad(i, j, 3) + linalg::dyad(j, i, 3) + linalg::dyad(k, k, 3);
}

ModelSpec build_clock(const ClockParams& p) {
  require_positive(p.beta, "beta");
  require_positive(p.gamma_1to0, "gamma_1to0");
  require_positive(p.gamma_2to1, "gamma_2to1");
  require_positive(p.gamma_2to0, "gamma_2to0");
  for (double e : {p.E0, p.E1, p.E2}) {
    if (!std::isfinite(e)) throw InvalidParameter("clock energies must be finite");
  }
  const double energies[3] = {p.E0, p.E1, p.E2};
  auto reverse = [&](int from, int to, double rate) {
    // γ_{to→from} from the detailed-balance ratio.
    return std::exp(-p.beta * (energies[from] - energies[to])) * rate;
  };

  ModelSpec spec;
  spec.dim = 3;
  spec.hamiltonian = CMatrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i) spec.hamiltonian(i, i) = energies[i];

  using namespace clock_channel;
  spec.channels = {
      clock_jump(k1to0, k0to1, 1, 0, p.gamma_1to0, p, energies),
      clock_jump(k0to1, k1to0, 0, 1, reverse(1, 0, p.gamma_1to0), p, energies),
      clock_jump(k2to1, k1to2, 2, 1, p.gamma_2to1, p, energies),
      clock_jump(k1to2, k2to1, 1, 2, reverse(2, 1, p.gamma_2to1), p, energies),
      clock_jump(k2to0, k0to2, 2, 0, p.gamma_2to0, p, energies),
      clock_jump(k0to2, k2to0, 0, 2, reverse(2, 0, p.gamma_2to0), p, energies),
  };
  spec.channels[k2to0].weight = 1.0;
  spec.channels[k0to2].weight = -1.0;

  for (const auto& ch : spec.channels) spec.feedback[ch.index] = FeedbackChannel::identity_map(3);
  if (p.feedback_on) {
    spec.feedback[k0to1] = FeedbackChannel::unitary(clock_swap(1, 2));
    spec.feedback[k1to0] = FeedbackChannel::unitary(clock_swap(0, 2));
  }
  spec.initial_state = linalg::identity(3) / 3.0;
  return spec;
}

ModelSpec random_model(const RandomModelOptions& opts) {
  if (opts.dim < 2) throw InvalidParameter("random_model: dim must be at least 2");
  if (opts.n_pairs < 1) throw InvalidParameter("random_model: n_pairs must be at least 1");
  if (!(opts.delta_s_range >= 0.0)) throw InvalidParameter("random_model: delta_s_range must be nonnegative");
  Sampler s(opts.seed);
  const Eigen::Index d = opts.dim;

  ModelSpec spec;
  spec.dim = d;
  const CMatrix b = s.ginibre(d);
  spec.hamiltonian = 0.5 * (b + b.adjoint());

  for (int p = 0; p < opts.n_pairs; ++p) {
    const double ds = opts.delta_s_range > 0.0 ? s.uniform(-opts.delta_s_range, opts.delta_s_range) : 0.0;
    const double c = s.normal();
    const CMatrix l = s.ginibre(d) / std::sqrt(static_cast<double>(d));
    JumpChannel fwd{2 * p, l, ds, 2 * p + 1, c};
    JumpChannel bwd{2 * p + 1, std::exp(-0.5 * ds) * l.adjoint(), -ds, 2 * p, -c};
    spec.channels.push_back(std::move(fwd));
    spec.channels.push_back(std::move(bwd));
  }
  for (const auto& ch : spec.channels) spec.feedback[ch.index] = random_feedback(s, d, opts.feedback);

  const CMatrix w = s.ginibre(d);
  CMatrix rho = w * w.adjoint() + 0.05 * linalg::identity(d);
  spec.initial_state = linalg::hermitian_part(rho / rho.trace().real());
  return spec;
}

ModelSpec random_model(int dim, int n_pairs, std::uint64_t seed, RandomFeedback feedback) {
  RandomModelOptions opts;
  opts.dim = dim;
  opts.n_pairs = n_pairs;
  opts.seed = seed;
  opts.feedback = feedback;
  return random_model(opts);
}

std::string_view to_string(RandomFeedback f) {
  switch (f) {
    case RandomFeedback::identity: return "identity";
    case RandomFeedback::unitary: return "unitary";
    case RandomFeedback::general_unital: return "general_unital";
    case RandomFeedback::mixed: return "mixed";
  }
  return "unknown";
}

RandomFeedback random_feedback_from_string(std::string_view name) {
  if (name == "identity") return RandomFeedback::identity;
  if (name == "unitary") return RandomFeedback::unitary;
  if (name == "general_unital") return RandomFeedback::general_unital;
  if (name == "mixed") return RandomFeedback::mixed;
  throw InvalidParameter("unknown random feedback kind '" + std::string(name) + "'");
}

}  // namespace fbtur::models
