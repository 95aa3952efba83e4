#include "egcnet/transition.hpp"

#include "egcnet/expm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace egcnet {

namespace {

// Renormalize rows whose sums drifted beyond kPhiTol; returns how many.
int fix_row_drift(Matrix& m) {
  int fixed = 0;
  for (int i = 0; i < m.rows(); ++i) {
    double s = m.row(i).sum();
    if (std::abs(s - 1.0) > kPhiTol && s > 0) {
      m.row(i) /= s;
      ++fixed;
    }
  }
  return fixed;
}

// Exponential of an intensity-matrix segment. Very large ||A d|| would
// cost ~2^s * eps through the final squarings (the eigenvalue-1 direction
// doubles its error per squaring), so such segments are split and the
// stochastic row sums are restored between squarings.
Matrix segment_exponential(const Matrix& a, double duration, int& renorms) {
  const double kDirectNormCap = 6000.0;  // ~10 squarings inside expm
  Matrix scaled = a * duration;
  double norm1 = scaled.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 <= kDirectNormCap) return expm(scaled);
  int k = static_cast<int>(std::ceil(std::log2(norm1 / kDirectNormCap)));
  Matrix base = expm(a * (duration / std::pow(2.0, k)));
  for (int i = 0; i < k; ++i) {
    base = base * base;
    renorms += fix_row_drift(base);
  }
  return base;
}

Matrix discrete_power(const Matrix& a, long long steps, int& renorms) {
  const int n = static_cast<int>(a.rows());
  if (steps <= 64) {
    Matrix acc = Matrix::Identity(n, n);
    for (long long k = 0; k < steps; ++k) {
      acc = a * acc;
      renorms += fix_row_drift(acc);
    }
    return acc;
  }
  Matrix base = a;
  Matrix acc = Matrix::Identity(n, n);
  long long e = steps;
  while (e > 0) {
    if (e & 1) {
      acc = base * acc;
      renorms += fix_row_drift(acc);
    }
    e >>= 1;
    if (e > 0) {
      base = base * base;
      renorms += fix_row_drift(base);
    }
  }
  return acc;
}

// Ordered product of the chain's pieces over [from, to); walks segment by
// segment, so callers must keep the window short of many tail periods.
Matrix product_over(const Chain& chain, double from, double to, int& renorms) {
  const int n = chain.n_agents;
  Matrix acc = Matrix::Identity(n, n);
  for (const auto& piece : segment_pieces(chain, from, to)) {
    if (chain.is_discrete()) {
      long long steps = static_cast<long long>(std::llround(piece.duration));
      acc = discrete_power(piece.matrix, steps, renorms) * acc;
    } else {
      acc = segment_exponential(piece.matrix, piece.duration, renorms) * acc;
    }
    renorms += fix_row_drift(acc);
  }
  return acc;
}

}  // namespace

TransitionMatrix phi(const Chain& chain, double t, double tau) {
  if (tau < 0 || t < tau)
    throw std::invalid_argument("phi: need 0 <= tau <= t");
  if (chain.is_discrete() &&
      (std::abs(t - std::round(t)) > 1e-9 || std::abs(tau - std::round(tau)) > 1e-9))
    throw std::invalid_argument("phi: discrete times must be integers");
  const int n = chain.n_agents;
  TransitionMatrix out;
  out.t = t;
  out.tau = tau;
  out.mode = chain.mode;
  out.matrix = Matrix::Identity(n, n);
  if (t == tau) return out;

  // Whole tail periods collapse to powers of the monodromy matrix, so long
  // horizons cost log(k) products instead of k segment walks.
  double period = chain.tail_period();
  if (chain.has_periodic_tail() && period > 0) {
    double pe = chain.prefix_end();
    double head_end = std::max(tau, pe);
    if (tau < pe) {
      head_end = pe;
    } else {
      head_end = pe + std::ceil((tau - pe) / period - 1e-12) * period;
    }
    if (t > head_end + period) {
      long long full = static_cast<long long>(std::floor((t - head_end) / period));
      double body_end = head_end + full * period;
      Matrix head = product_over(chain, tau, head_end, out.renormalizations);
      Matrix monodromy =
          product_over(chain, head_end, head_end + period, out.renormalizations);
      Matrix body = discrete_power(monodromy, full, out.renormalizations);
      Matrix rest = product_over(chain, body_end, t, out.renormalizations);
      out.matrix = rest * (body * head);
      out.renormalizations += fix_row_drift(out.matrix);
      return out;
    }
  }
  out.matrix = product_over(chain, tau, t, out.renormalizations);
  return out;
}

Trajectory simulate(const Chain& chain, const Vector& x0, double t0,
                    const std::vector<double>& sample_times) {
  if (x0.size() != chain.n_agents)
    throw std::invalid_argument("simulate: x0 has wrong dimension");
  if (sample_times.empty() || sample_times.front() != t0)
    throw std::invalid_argument("simulate: sample times must start at t0");
  for (std::size_t i = 1; i < sample_times.size(); ++i) {
    if (sample_times[i] <= sample_times[i - 1])
      throw std::invalid_argument("simulate: sample times must increase");
  }
  Trajectory traj;
  traj.times = sample_times;
  traj.states.reserve(sample_times.size());
  if (chain.is_discrete()) {
    // Incremental products give the same left-to-right fold as a direct
    // evaluation at each sample.
    TransitionMatrix acc = phi(chain, t0, t0);
    double prev = t0;
    for (double ts : sample_times) {
      if (ts > prev) {
        TransitionMatrix step = phi(chain, ts, prev);
        acc.matrix = step.matrix * acc.matrix;
        prev = ts;
      }
      traj.states.push_back(acc.matrix * x0);
    }
  } else {
    for (double ts : sample_times) {
      traj.states.push_back(phi(chain, ts, t0).matrix * x0);
    }
  }
  return traj;
}

LimitPhiResult limit_phi(const Chain& chain, double tau,
                         const std::vector<double>& horizon_schedule) {
  if (horizon_schedule.empty())
    throw std::invalid_argument("limit_phi: empty horizon schedule");
  for (double h : horizon_schedule) {
    if (h < tau) throw std::invalid_argument("limit_phi: horizon before tau");
  }
  LimitPhiResult result;
  result.horizons = horizon_schedule;
  Matrix prev;
  for (std::size_t i = 0; i < horizon_schedule.size(); ++i) {
    TransitionMatrix current = phi(chain, horizon_schedule[i], tau);
    if (i > 0) {
      result.deltas.push_back((current.matrix - prev).cwiseAbs().maxCoeff());
    }
    prev = current.matrix;
    if (i + 1 == horizon_schedule.size()) result.phi = std::move(current);
  }
  return result;
}

std::vector<double> default_horizon_schedule(const Chain& chain, double tau) {
  double pe = chain.prefix_end();
  std::vector<double> schedule;
  if (chain.has_periodic_tail()) {
    double period = chain.tail_period();
    // Doubling period counts out to >= 4 tail periods past the prefix.
    double base = std::max(pe, tau);
    for (double k = 4; k <= 256; k *= 2) {
      schedule.push_back(base + k * period);
    }
  } else {
    double span = std::max(pe - tau, 1.0);
    double start = std::max(tau + span, pe);
    schedule = {start, start + span};
  }
  if (chain.is_discrete()) {
    for (double& h : schedule) h = std::ceil(h - 1e-9);
  }
  return schedule;
}

std::string trajectory_to_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << "t";
  const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states[0].size());
  for (int i = 1; i <= n; ++i) os << ",x" << i;
  os << "\n";
  char buf[64];
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", traj.times[k]);
    os << buf;
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", traj.states[k](i));
      os << "," << buf;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace egcnet
