#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace egcnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Time semantics of a chain. Fixed per chain; operations reject
/// mixed-mode combinations.
enum class TimeMode { Continuous, Discrete };

std::string to_string(TimeMode mode);

/// One constant piece of a piecewise-constant chain.
///
/// Continuous mode: `matrix` is an intensity matrix (zero row sums,
/// non-negative off-diagonal entries) active for `duration` time units.
/// Discrete mode: `matrix` is row-stochastic and `duration` is an
/// integer step count.
struct Segment {
  double duration = 0.0;
  Matrix matrix;
};

/// Tail behaviour after the prefix: quiescent forever.
/// Continuous: A(t) = 0; discrete: A(t) = identity.
struct ZeroTail {};

/// Tail behaviour after the prefix: `block` repeated indefinitely.
struct PeriodicTail {
  std::vector<Segment> block;
};

using TailSpec = std::variant<ZeroTail, PeriodicTail>;

/// A time-varying chain {A(t)}: prefix segments laid end-to-end from
/// t = 0, then the tail repeated indefinitely. Immutable by convention
/// after construction; all operations on chains are pure.
struct Chain {
  TimeMode mode = TimeMode::Continuous;
  int n_agents = 0;
  std::vector<Segment> prefix;
  TailSpec tail = ZeroTail{};

  bool is_discrete() const { return mode == TimeMode::Discrete; }
  /// Time at which the prefix ends and the tail takes over.
  double prefix_end() const;
  /// Period of the tail block; 0 for a zero tail.
  double tail_period() const;
  bool has_periodic_tail() const { return std::holds_alternative<PeriodicTail>(tail); }
  const PeriodicTail* periodic_tail() const { return std::get_if<PeriodicTail>(&tail); }
  /// The quiescent matrix for this mode (0 or identity).
  Matrix neutral_matrix() const;
  /// True when A(t) is the same matrix for all t >= 0.
  bool is_time_invariant() const;
};

/// Row-sum / entry-sign tolerance used by validation.
inline constexpr double kValidationTol = 1e-12;

struct Violation {
  enum class Where { Chain, Prefix, TailBlock };
  Where where = Where::Chain;
  int segment = -1;  // index within prefix or tail block, -1 for chain-level
  int row = -1;
  int col = -1;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
};

/// Checks every structural and mode invariant; reports all violations
/// with segment index and entry location. Never throws.
ValidationReport validate(const Chain& chain);

/// A(t) at time t, resolving tail repetition. Right-continuous at
/// segment boundaries: the new segment's matrix applies.
Matrix evaluate_at(const Chain& chain, double t);

/// Entrywise scaling of a continuous chain; durations unchanged.
/// Throws on discrete mode or alpha <= 0.
Chain scale(const Chain& chain, double alpha);

/// Pointwise sum A(t) + B(t) of two continuous chains over the union of
/// their segment boundaries. Tails must combine into a zero or periodic
/// tail; incommensurable periodic tails are rejected.
Chain add(const Chain& a, const Chain& b);

/// Returns an l1-approximation of the input: extra prefix segments whose
/// perturbations have geometrically decaying max norm (ratio 1/2, first
/// term = magnitude), each preserving mode invariants. The tail itself is
/// untouched. Deterministic given seed.
Chain perturb_summable(const Chain& chain, std::uint64_t seed, double magnitude);

/// Structural equality, bit-exact on all matrix entries.
bool chains_equal(const Chain& a, const Chain& b);

/// One constant piece of A(t) clipped to a query window.
struct SegmentPiece {
  double start;
  double duration;
  Matrix matrix;
};

/// The constant pieces of A(t) covering [from, to), in time order, with
/// the end pieces clipped. Resolves prefix and tail.
std::vector<SegmentPiece> segment_pieces(const Chain& chain, double from, double to);

}  // namespace egcnet
