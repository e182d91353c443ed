#pragma once

#include <cstdint>
#include <string>

#include "sfnav/errors.hpp"
#include "sfnav/graph.hpp"

namespace sfnav {

// Entry layout for the 2x2 joint-presence matrices: index i is the perceived
// bit, index j the imagined bit, so e.g. c10 counts "present in perceived,
// absent in imagined".
struct Count2x2 {
  std::uint64_t c00 = 0, c01 = 0, c10 = 0, c11 = 0;
  std::uint64_t total() const { return c00 + c01 + c10 + c11; }
};

struct Prob2x2 {
  double p00 = 0.0, p01 = 0.0, p10 = 0.0, p11 = 0.0;
  double sum() const { return p00 + p01 + p10 + p11; }
};

// P: joint presence of shared objects across timestep pairs.
// Q: joint membership of (timestep, object) pairs.
// Normalized entries are raw counts over the total count; a zero-total matrix
// is replaced by the degenerate convention (all mass on the (0,0) cell) and
// reported through DegenerateInput.
struct EdgeProbMatrices {
  Prob2x2 p;
  Prob2x2 q;
  Count2x2 raw_p;
  Count2x2 raw_q;
};

class DegenerateInput : public NavError {
 public:
  explicit DegenerateInput(const std::string& what,
                           EdgeProbMatrices matrices = {})
      : NavError(ErrorCode::degenerate_input, what),
        matrices(std::move(matrices)) {}

  EdgeProbMatrices matrices;
};

// Which entity count feeds the ambiguity bound: distinct object labels per
// side (default) or timestep nodes per side.
enum class NmMode { objects, timesteps };

// literal: exp(-2 ln n + 2 m psi_a + 2 n p11). The exponent grows with shared
// structure, so the bound gets LARGER as the graphs agree more; kept as the
// default because it is the published form.
// negated_structure: exp(-2 ln n - 2 m psi_a - 2 n p11) * n^2, which decays
// with agreement and so yields a confidence that rises as evidence grows.
enum class BoundForm { literal, negated_structure };

BoundForm parse_bound_form(std::string_view name);  // throws config_error
NmMode parse_nm_mode(std::string_view name);        // throws config_error
const char* to_string(BoundForm form);
const char* to_string(NmMode mode);

struct BridgeOptions {
  NmMode nm_mode = NmMode::objects;
  BoundForm bound_form = BoundForm::literal;
  int window = 0;  // keep timesteps > (latest - window); 0 = unbounded
};

// Everything the bridge computed for one confidence evaluation, traced
// verbatim into the per-step record.
struct AlignmentStats {
  double psi_u = 0.0;  // correlation strength of P; traced, not consumed
  double psi_a = 0.0;  // correlation strength of Q; feeds the bound
  int n = 0;           // alignable entities on the perceived side
  int m = 0;           // alignable entities on the imagined side
  double p11 = 0.0;
  double ambiguity_bound_raw = 1.0;
  double ambiguity_prob = 1.0;  // min(1, raw)
  double confidence = 0.0;      // 1 - ambiguity_prob
  bool degenerate = false;      // no usable evidence; confidence forced to 0
  EdgeProbMatrices pq;
};

// Tallies both 2x2 matrices over the (windowed) history:
//   Q: for every (timestep, label) in the union grid, the joint membership
//      bits of the perceived and imagined sides;
//   P: for every unordered timestep pair, whether each side carries some
//      object present at both timesteps.
// Throws DegenerateInput (carrying convention matrices plus the actual raw
// counts) when the timestep set, the label set, or either total count is
// empty.
EdgeProbMatrices compute_pq(const GraphHistory& history, int window = 0);

// (sqrt(m11*m00) - sqrt(m10*m01))^2, evaluated as a+b-2*sqrt(a*b) so that the
// frequent one-sided case (m10*m01 == 0) is exact.
double psi(const Prob2x2& m);

struct BoundResult {
  double raw = 0.0;
  double clamped = 0.0;  // min(1, raw), usable as a probability
};

// Upper bound on the probability that some wrong alignment between the n
// perceived and m imagined entities scores at least as well as the true one.
// Throws DegenerateInput when n or m is zero.
BoundResult ambiguity_bound(int n, int m, double psi_a, double p11,
                            BoundForm form = BoundForm::literal);

// Full bridge evaluation: compute_pq, both psi statistics, the ambiguity
// bound, and confidence = 1 - min(1, bound). Propagates DegenerateInput; the
// episode runner maps that to confidence 0 (always trigger).
AlignmentStats confidence(const GraphHistory& history,
                          const BridgeOptions& opts = {});

// Trigger predicate: the slow planner is consulted iff c <= tau (boundary
// triggers).
bool should_trigger(double confidence_value, double tau);

}  // namespace sfnav
