#include "egcnet/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace egcnet {

namespace {

// Deterministic cross-platform uniform in [0, 1) from splitmix64, so test
// fixtures do not depend on the standard library's distribution choices.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next_u64() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
};

bool is_integer(double x) { return std::abs(x - std::round(x)) < 1e-9; }

void check_segment(const Segment& seg, TimeMode mode, int n,
                   Violation::Where where, int index, ValidationReport& report) {
  auto push = [&](int row, int col, const std::string& msg) {
    report.violations.push_back({where, index, row, col, msg});
  };
  if (!(seg.duration > 0)) {
    push(-1, -1, "duration must be positive");
  } else if (mode == TimeMode::Discrete && !is_integer(seg.duration)) {
    push(-1, -1, "discrete duration must be an integer step count");
  }
  if (seg.matrix.rows() != n || seg.matrix.cols() != n) {
    std::ostringstream os;
    os << "matrix is " << seg.matrix.rows() << "x" << seg.matrix.cols()
       << ", expected " << n << "x" << n;
    push(-1, -1, os.str());
    return;
  }
  for (int i = 0; i < n; ++i) {
    double row_sum = seg.matrix.row(i).sum();
    if (mode == TimeMode::Continuous) {
      if (std::abs(row_sum) > kValidationTol) {
        std::ostringstream os;
        os << "row sum " << row_sum << " exceeds tolerance";
        push(i, -1, os.str());
      }
      for (int j = 0; j < n; ++j) {
        if (i != j && seg.matrix(i, j) < 0) {
          push(i, j, "negative off-diagonal entry");
        }
      }
    } else {
      if (std::abs(row_sum - 1.0) > kValidationTol) {
        std::ostringstream os;
        os << "row sum " << row_sum << " is not 1 within tolerance";
        push(i, -1, os.str());
      }
      for (int j = 0; j < n; ++j) {
        if (seg.matrix(i, j) < 0) {
          push(i, j, "negative entry");
        }
      }
    }
  }
}

// Boundaries of A(t) for one chain inside [from, to), excluding the ends.
void collect_boundaries(const Chain& chain, double from, double to,
                        std::vector<double>& out) {
  double t = 0.0;
  for (const auto& seg : chain.prefix) {
    t += seg.duration;
    if (t > from && t < to) out.push_back(t);
    if (t >= to) return;
  }
  if (const auto* p = chain.periodic_tail()) {
    double period = chain.tail_period();
    // Jump close to `from` to avoid walking a long irrelevant stretch.
    if (from > t) {
      double skip = std::floor((from - t) / period);
      t += skip * period;
    }
    while (t < to) {
      for (const auto& seg : p->block) {
        t += seg.duration;
        if (t > from && t < to) out.push_back(t);
        if (t >= to) return;
      }
    }
  }
}

}  // namespace

std::string to_string(TimeMode mode) {
  return mode == TimeMode::Continuous ? "continuous" : "discrete";
}

double Chain::prefix_end() const {
  double t = 0.0;
  for (const auto& seg : prefix) t += seg.duration;
  return t;
}

double Chain::tail_period() const {
  if (const auto* p = periodic_tail()) {
    double t = 0.0;
    for (const auto& seg : p->block) t += seg.duration;
    return t;
  }
  return 0.0;
}

Matrix Chain::neutral_matrix() const {
  return is_discrete() ? Matrix::Identity(n_agents, n_agents).eval()
                       : Matrix::Zero(n_agents, n_agents).eval();
}

bool Chain::is_time_invariant() const {
  const Matrix* common = nullptr;
  auto same = [&](const Matrix& m) {
    if (!common) { common = &m; return true; }
    return common->rows() == m.rows() && *common == m;
  };
  for (const auto& seg : prefix)
    if (!same(seg.matrix)) return false;
  if (const auto* p = periodic_tail()) {
    for (const auto& seg : p->block)
      if (!same(seg.matrix)) return false;
    return common != nullptr;
  }
  // Zero tail: the tail matrix is the neutral one.
  Matrix neutral = neutral_matrix();
  return !common || *common == neutral;
}

ValidationReport validate(const Chain& chain) {
  ValidationReport report;
  if (chain.n_agents <= 0) {
    report.violations.push_back({Violation::Where::Chain, -1, -1, -1,
                                 "n_agents must be positive"});
    return report;
  }
  for (int k = 0; k < static_cast<int>(chain.prefix.size()); ++k) {
    check_segment(chain.prefix[k], chain.mode, chain.n_agents,
                  Violation::Where::Prefix, k, report);
  }
  if (const auto* p = chain.periodic_tail()) {
    if (p->block.empty()) {
      report.violations.push_back({Violation::Where::TailBlock, -1, -1, -1,
                                   "periodic tail block must be non-empty"});
    }
    for (int k = 0; k < static_cast<int>(p->block.size()); ++k) {
      check_segment(p->block[k], chain.mode, chain.n_agents,
                    Violation::Where::TailBlock, k, report);
    }
  }
  return report;
}

Matrix evaluate_at(const Chain& chain, double t) {
  if (t < 0) throw std::invalid_argument("evaluate_at: time must be non-negative");
  if (chain.is_discrete() && !is_integer(t))
    throw std::invalid_argument("evaluate_at: discrete time must be an integer");
  double pos = 0.0;
  for (const auto& seg : chain.prefix) {
    pos += seg.duration;
    if (t < pos) return seg.matrix;
  }
  if (const auto* p = chain.periodic_tail()) {
    double period = chain.tail_period();
    double local = std::fmod(t - pos, period);
    for (const auto& seg : p->block) {
      local -= seg.duration;
      if (local < 0) return seg.matrix;
    }
    return p->block.back().matrix;  // fmod rounding fell on a boundary
  }
  return chain.neutral_matrix();
}

std::vector<SegmentPiece> segment_pieces(const Chain& chain, double from, double to) {
  if (from < 0 || to < from)
    throw std::invalid_argument("segment_pieces: need 0 <= from <= to");
  std::vector<SegmentPiece> pieces;
  if (to == from) return pieces;

  std::vector<double> cuts;
  cuts.push_back(from);
  collect_boundaries(chain, from, to, cuts);
  cuts.push_back(to);
  pieces.reserve(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i], b = cuts[i + 1];
    if (b - a < 1e-15) continue;
    // Right-continuity: the matrix at `a` rules [a, b). Discrete
    // boundaries are integral, so `a` is a valid sample time.
    pieces.push_back({a, b - a, evaluate_at(chain, a)});
  }
  return pieces;
}

Chain scale(const Chain& chain, double alpha) {
  if (chain.is_discrete())
    throw std::invalid_argument("scale: discrete chains cannot be scaled");
  if (!(alpha > 0)) throw std::invalid_argument("scale: alpha must be positive");
  Chain out = chain;
  for (auto& seg : out.prefix) seg.matrix *= alpha;
  if (auto* p = std::get_if<PeriodicTail>(&out.tail)) {
    for (auto& seg : p->block) seg.matrix *= alpha;
  }
  return out;
}

namespace {

// Least common period of two positive reals, or -1 when no small integer
// relation exists (incommensurable within tolerance).
double common_period(double pa, double pb) {
  constexpr int kMaxMultiple = 4096;
  for (int m = 1; m <= kMaxMultiple; ++m) {
    double candidate = m * pa;
    double ratio = candidate / pb;
    double n = std::round(ratio);
    if (n >= 1 && std::abs(ratio - n) < 1e-9 * std::max(1.0, ratio)) {
      return candidate;
    }
  }
  return -1.0;
}

std::vector<Segment> sum_segments(const Chain& a, const Chain& b, double from,
                                  double to) {
  std::vector<double> cuts{from};
  collect_boundaries(a, from, to, cuts);
  collect_boundaries(b, from, to, cuts);
  cuts.push_back(to);
  std::sort(cuts.begin(), cuts.end());
  std::vector<Segment> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double s = cuts[i], e = cuts[i + 1];
    if (e - s < 1e-12) continue;
    Matrix m = evaluate_at(a, s) + evaluate_at(b, s);
    if (!out.empty() && out.back().matrix == m) {
      out.back().duration += e - s;
    } else {
      out.push_back({e - s, std::move(m)});
    }
  }
  return out;
}

}  // namespace

Chain add(const Chain& a, const Chain& b) {
  if (a.is_discrete() || b.is_discrete())
    throw std::invalid_argument("add: defined for continuous chains only");
  if (a.n_agents != b.n_agents)
    throw std::invalid_argument("add: agent counts differ");

  const auto* pa = a.periodic_tail();
  const auto* pb = b.periodic_tail();
  double ea = a.prefix_end(), eb = b.prefix_end();

  Chain out;
  out.mode = TimeMode::Continuous;
  out.n_agents = a.n_agents;

  if (!pa && !pb) {
    double end = std::max(ea, eb);
    out.prefix = sum_segments(a, b, 0.0, end);
    out.tail = ZeroTail{};
    return out;
  }

  double period;
  double anchor;  // combined prefix must end on a shared period boundary
  if (pa && pb) {
    period = common_period(a.tail_period(), b.tail_period());
    if (period < 0)
      throw std::invalid_argument("add: incommensurable periodic tail periods");
    // Align to a time where both tails sit at a block boundary: advance
    // from max(ea, eb) to the next common boundary of both tail periods.
    double base = std::max(ea, eb);
    double ka = std::ceil((base - ea) / a.tail_period() - 1e-12);
    anchor = ea + ka * a.tail_period();
    int guard = 0;
    for (;;) {
      double off_b = (anchor - eb) / b.tail_period();
      if (std::abs(off_b - std::round(off_b)) < 1e-9) break;
      anchor += a.tail_period();
      if (++guard > 1 << 20)
        throw std::invalid_argument("add: could not align periodic tails");
    }
  } else {
    const Chain& periodic = pa ? a : b;
    period = periodic.tail_period();
    double ep = periodic.prefix_end();
    double base = std::max(ea, eb);
    double k = std::ceil((base - ep) / period - 1e-12);
    anchor = ep + k * period;
  }

  out.prefix = sum_segments(a, b, 0.0, anchor);
  PeriodicTail tail;
  tail.block = sum_segments(a, b, anchor, anchor + period);
  out.tail = std::move(tail);
  return out;
}

Chain perturb_summable(const Chain& chain, std::uint64_t seed, double magnitude) {
  if (magnitude < 0)
    throw std::invalid_argument("perturb_summable: magnitude must be >= 0");
  if (magnitude == 0) return chain;

  constexpr int kExtraSegments = 8;
  Rng rng(seed);
  Chain out = chain;
  double t = chain.prefix_end();
  const int n = chain.n_agents;

  for (int k = 0; k < kExtraSegments; ++k) {
    double norm_k = magnitude * std::pow(0.5, k);
    double duration = 1.0;
    // The perturbed stretch replaces what the tail would have produced
    // there, so the tail itself stays untouched and the difference from
    // the original chain is exactly the perturbation. Stretches are split
    // at the original chain's boundaries so this holds piecewise.
    if (chain.is_discrete()) {
      Matrix base = evaluate_at(chain, t);
      Matrix s = Matrix::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j) {
          s(i, j) = 0.05 + rng.uniform();
          sum += s(i, j);
        }
        s.row(i) /= sum;
      }
      double max_diff = (s - base).cwiseAbs().maxCoeff();
      double w = max_diff > 0 ? std::min(1.0, norm_k / max_diff) : 0.0;
      out.prefix.push_back({duration, ((1.0 - w) * base + w * s).eval()});
    } else {
      Matrix p = Matrix::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (i != j) p(i, j) = rng.uniform();
        }
        p(i, i) = -p.row(i).sum();
      }
      double max_abs = p.cwiseAbs().maxCoeff();
      if (max_abs > 0) p *= norm_k / max_abs;
      std::vector<double> cuts{t};
      collect_boundaries(chain, t, t + duration, cuts);
      cuts.push_back(t + duration);
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] < 1e-12) continue;
        out.prefix.push_back(
            {cuts[i + 1] - cuts[i], (evaluate_at(chain, cuts[i]) + p).eval()});
      }
    }
    t += duration;
  }
  // Keep the tail aligned: the extra stretch must cover whole periods so
  // A(t) is unchanged past it.
  if (chain.has_periodic_tail()) {
    double period = chain.tail_period();
    double covered = kExtraSegments * 1.0;
    double rem = std::fmod(covered, period);
    if (rem > 1e-12 && period - rem > 1e-12) {
      double fill = period - rem;
      if (chain.is_discrete()) {
        // Integer durations: extend with unperturbed tail steps.
        double pos = t;
        while (std::fmod(pos - chain.prefix_end(), period) > 1e-12) {
          Matrix m = evaluate_at(chain, pos);
          out.prefix.push_back({1.0, m});
          pos += 1.0;
        }
      } else {
        std::vector<double> cuts{t};
        collect_boundaries(chain, t, t + fill, cuts);
        cuts.push_back(t + fill);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
          if (cuts[i + 1] - cuts[i] < 1e-12) continue;
          out.prefix.push_back({cuts[i + 1] - cuts[i], evaluate_at(chain, cuts[i])});
        }
      }
    }
  }
  return out;
}

bool chains_equal(const Chain& a, const Chain& b) {
  if (a.mode != b.mode || a.n_agents != b.n_agents) return false;
  auto segs_equal = [](const std::vector<Segment>& x, const std::vector<Segment>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].duration != y[i].duration) return false;
      if (x[i].matrix.rows() != y[i].matrix.rows() ||
          x[i].matrix.cols() != y[i].matrix.cols() || x[i].matrix != y[i].matrix)
        return false;
    }
    return true;
  };
  if (!segs_equal(a.prefix, b.prefix)) return false;
  const auto* pa = a.periodic_tail();
  const auto* pb = b.periodic_tail();
  if (!pa != !pb) return false;
  if (pa && !segs_equal(pa->block, pb->block)) return false;
  return true;
}

}  // namespace egcnet
