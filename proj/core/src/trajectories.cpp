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

#include "fbtur/trajectories.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <random>
#include <string>
#include <mutex>
#include <thread>

#include "fbtur/errors.hpp"
#include "fbtur/report.hpp"

namespace fbtur {

namespace {

constexpr long kChunk = 256;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Precomputed {
  Eigen::Index dim = 0;
  double dt = 0.0;
  long steps = 0;
  CMatrix m0;          // 𝟙 − i H_eff dt
  CMatrix total_rate;  // Λ = Σ L_k†L_k
  bool pure_ok = true;
  bool coarse = false;
};

Precomputed precompute(const ModelSpec& spec, double tau, double dt) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidParameter("tau must be positive and finite");
  if (!(dt > 0.0) || dt > tau) throw InvalidParameter("dt must lie in (0, tau]");
  Precomputed pc;
  pc.dim = spec.dim;
  pc.steps = static_cast<long>(std::ceil(tau / dt - 1e-9));
  pc.dt = tau / static_cast<double>(pc.steps);
  pc.total_rate = CMatrix::Zero(spec.dim, spec.dim);
  double max_rate = 0.0;
  for (const auto& ch : spec.channels) {
    const CMatrix ldl = ch.op.adjoint() * ch.op;
    pc.total_rate += ldl;
    max_rate = std::max(max_rate, linalg::herm_eigenvalues(ldl).maxCoeff());
    if (spec.feedback_for(ch.index).kind == FeedbackKind::general_unital) pc.pure_ok = false;
  }
  pc.coarse = max_rate * pc.dt > kCoarseStepWarning;
  const cplx i_unit(0.0, 1.0);
  pc.m0 = linalg::identity(spec.dim) - i_unit * pc.dt * (spec.hamiltonian - 0.5 * i_unit * pc.total_rate);
  return pc;
}

[[noreturn]] void too_coarse(double p, double t) {
  throw StepTooCoarse("jump probability " + std::to_string(p) + " reached 1 at t = " + std::to_string(t));
}

// Index of the channel whose cumulative probability first exceeds u; rates are per unit time.
template <class RateFn>
int pick_channel(const ModelSpec& spec, double dt, double u, RateFn rate) {
  double acc = 0.0;
  int last_positive = -1;
  for (const auto& ch : spec.channels) {
    const double r = rate(ch);
    if (r <= 0.0) continue;
    last_positive = ch.index;
    acc += dt * r;
    if (u < acc) return ch.index;
  }
  return last_positive;
}

TrajectoryRecord run_pure(const ModelSpec& spec, const Precomputed& pc, std::mt19937_64& rng,
                          const TrajectoryOptions& opts) {
  TrajectoryRecord rec;
  // Start in an eigenvector of ρ₀ drawn with its eigenvalue as probability.
  const linalg::HermitianEig eig = linalg::herm_eig(spec.initial_state);
  const double u0 = uniform01(rng);
  Eigen::Index pick = eig.eigenvalues.size() - 1;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    acc += std::max(eig.eigenvalues(i), 0.0);
    if (u0 < acc) {
      pick = i;
      break;
    }
  }
  CVector psi = eig.eigenvectors.col(pick);
  CVector tmp(pc.dim);

  for (long n = 0; n < pc.steps; ++n) {
    tmp.noalias() = pc.total_rate * psi;
    const double p = pc.dt * psi.dot(tmp).real();
    if (p >= 1.0) too_coarse(p, n * pc.dt);
    const double u = uniform01(rng);
    if (u < p) {
      const int k = pick_channel(spec, pc.dt, u, [&](const JumpChannel& ch) {
        return (ch.op * psi).squaredNorm();
      });
      const JumpChannel& ch = spec.channels[k];
      tmp.noalias() = ch.op * psi;
      psi = tmp / tmp.norm();
      const FeedbackChannel& fb = spec.feedback_for(k);
      int branch = -1;
      if (fb.kind == FeedbackKind::unitary) {
        tmp.noalias() = fb.kraus.front() * psi;
        psi = tmp;
        branch = 0;
      }
      rec.current += ch.weight;
      ++rec.n_jumps;
      if (opts.record_events) rec.events.push_back({(n + 1) * pc.dt, k, branch});
    } else {
      tmp.noalias() = pc.m0 * psi;
      psi = tmp / tmp.norm();
    }
  }
  rec.final_state = psi * psi.adjoint();
  return rec;
}

TrajectoryRecord run_mixed(const ModelSpec& spec, const Precomputed& pc, std::mt19937_64& rng,
                           const TrajectoryOptions& opts) {
  TrajectoryRecord rec;
  CMatrix rho = linalg::hermitian_part(spec.initial_state);
  const CMatrix m0_adj = pc.m0.adjoint();
  for (long n = 0; n < pc.steps; ++n) {
    const double p = pc.dt * (pc.total_rate * rho).trace().real();
    if (p >= 1.0) too_coarse(p, n * pc.dt);
    const double u = uniform01(rng);
    if (u < p) {
      const int k = pick_channel(spec, pc.dt, u, [&](const JumpChannel& ch) {
        return (ch.op * rho * ch.op.adjoint()).trace().real();
      });
      const JumpChannel& ch = spec.channels[k];
      CMatrix x = ch.op * rho * ch.op.adjoint();
      x /= x.trace().real();
      const FeedbackChannel& fb = spec.feedback_for(k);
      int branch = -1;
      if (fb.kind == FeedbackKind::identity) {
        rho = x;
      } else {
        // Branch α with probability tr(K^α X K^α†).
        const double v = uniform01(rng);
        double acc = 0.0;
        branch = static_cast<int>(fb.kraus.size()) - 1;
        for (std::size_t a = 0; a < fb.kraus.size(); ++a) {
          acc += (fb.kraus[a] * x * fb.kraus[a].adjoint()).trace().real();
          if (v < acc) {
            branch = static_cast<int>(a);
            break;
          }
        }
        const CMatrix& kr = fb.kraus[branch];
        rho = kr * x * kr.adjoint();
        rho /= rho.trace().real();
      }
      rho = linalg::hermitian_part(rho);
      rec.current += ch.weight;
      ++rec.n_jumps;
      if (opts.record_events) rec.events.push_back({(n + 1) * pc.dt, k, branch});
    } else {
      rho = pc.m0 * rho * m0_adj;
      rho = linalg::hermitian_part(rho / rho.trace().real());
    }
  }
  rec.final_state = rho;
  return rec;
}

TrajectoryRecord simulate(const ModelSpec& spec, const Precomputed& pc, std::uint64_t seed,
                          const TrajectoryOptions& opts) {
  std::mt19937_64 rng(seed);
  TrajectoryRecord rec = (opts.allow_pure_state && pc.pure_ok) ? run_pure(spec, pc, rng, opts)
                                                               : run_mixed(spec, pc, rng, opts);
  rec.seed = seed;
  rec.coarse_step = pc.coarse;
  return rec;
}

Histogram make_histogram(const std::vector<double>& xs) {
  Histogram h;
  if (xs.empty()) return h;
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const bool integral = std::all_of(xs.begin(), xs.end(), [](double x) { return x == std::round(x); });
  if (integral) {
    h.lo = lo - 0.5;
    h.width = 1.0;
  } else {
    h.lo = lo;
    h.width = hi > lo ? (hi - lo) / 50.0 : 1.0;
  }
  const auto bins = static_cast<std::size_t>(std::floor((hi - h.lo) / h.width)) + 1;
  h.counts.assign(bins, 0);
  for (double x : xs) {
    auto b = static_cast<std::size_t>(std::floor((x - h.lo) / h.width));
    h.counts[std::min(b, bins - 1)] += 1;
  }
  return h;
}

}  // namespace

std::uint64_t trajectory_seed(std::uint64_t base_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

double default_trajectory_dt(const ModelSpec& spec) {
  CMatrix total = CMatrix::Zero(spec.dim, spec.dim);
  for (const auto& ch : spec.channels) total += ch.op.adjoint() * ch.op;
  const double max_rate = linalg::herm_eigenvalues(total).maxCoeff();
  if (!(max_rate > 0.0)) throw InvalidParameter("model has no jumps");
  return 1e-3 / max_rate;
}

TrajectoryRecord simulate_trajectory(const ModelSpec& spec, double tau, double dt, std::uint64_t seed,
                                     const TrajectoryOptions& opts) {
  require_valid(spec);
  return simulate(spec, precompute(spec, tau, dt), seed, opts);
}

EnsembleStats summarize(const std::vector<double>& currents, const std::vector<long>& jumps) {
  const auto n = static_cast<long>(currents.size());
  if (n < 2) throw InvalidParameter("ensemble needs at least two trajectories");
  const double nd = static_cast<double>(n);
  EnsembleStats st;
  st.n_traj = n;
  double sum = 0.0;
  for (double x : currents) sum += x;
  st.mean_J = sum / nd;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : currents) {
    const double d = x - st.mean_J;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  st.var_J = m2 / (nd - 1.0);
  const double mu2 = m2 / nd;
  const double mu4 = m4 / nd;
  st.se_mean = std::sqrt(st.var_J / nd);
  // Var(s²) ≈ (μ₄ − σ⁴ (n−3)/(n−1)) / n.
  st.se_var = std::sqrt(std::max(0.0, (mu4 - mu2 * mu2 * (nd - 3.0) / (nd - 1.0)) / nd));

  double jsum = 0.0;
  long any = 0;
  for (long j : jumps) {
    jsum += static_cast<double>(j);
    any += j > 0 ? 1 : 0;
  }
  st.mean_jumps = jsum / nd;
  double jm2 = 0.0;
  for (long j : jumps) jm2 += (static_cast<double>(j) - st.mean_jumps) * (static_cast<double>(j) - st.mean_jumps);
  st.se_jumps = std::sqrt(jm2 / (nd - 1.0) / nd);
  st.fraction_with_jump = static_cast<double>(any) / nd;
  st.histogram = make_histogram(currents);
  return st;
}

EnsembleStats run_ensemble(const ModelSpec& spec, double tau, double dt, long n_traj, std::uint64_t base_seed,
                           const EnsembleOptions& opts) {
  if (n_traj < 2) throw InvalidParameter("n_traj must be at least 2");
  require_valid(spec);
  const Precomputed pc = precompute(spec, tau, dt);
  TrajectoryOptions topts;
  topts.record_events = opts.records != nullptr;
  topts.allow_pure_state = opts.pure_state_fast_path;

  const long n_chunks = (n_traj + kChunk - 1) / kChunk;
  std::vector<double> currents(n_traj);
  std::vector<long> jumps(n_traj);
  std::vector<CMatrix> chunk_states(n_chunks, CMatrix::Zero(spec.dim, spec.dim));
  if (opts.records) opts.records->assign(n_traj, {});

  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (long c = next++; c < n_chunks && !failed; c = next++) {
      try {
        const long end = std::min(n_traj, (c + 1) * kChunk);
        for (long i = c * kChunk; i < end; ++i) {
          TrajectoryRecord rec = simulate(spec, pc, trajectory_seed(base_seed, static_cast<std::uint64_t>(i)), topts);
          currents[i] = rec.current;
          jumps[i] = rec.n_jumps;
          chunk_states[c] += rec.final_state;
          if (opts.records) (*opts.records)[i] = std::move(rec);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<long>(threads, n_chunks));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);

  EnsembleStats st = summarize(currents, jumps);
  st.coarse_step = pc.coarse;
  st.mean_final_state = CMatrix::Zero(spec.dim, spec.dim);
  for (const auto& m : chunk_states) st.mean_final_state += m;
  st.mean_final_state /= static_cast<double>(n_traj);
  return st;
}

void write_trajectories_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
  out << io::csv_line({"traj", "seed", "t", "k", "branch"});
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    for (const auto& ev : rec.events) {
      out << io::csv_line({std::to_string(i), std::to_string(rec.seed), io::format_double(ev.t),
                           std::to_string(ev.k), ev.branch < 0 ? std::string() : std::to_string(ev.branch)});
    }
  }
}

}  // namespace fbtur
