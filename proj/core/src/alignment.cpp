#include "sfnav/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace sfnav {

BoundForm parse_bound_form(std::string_view name) {
  if (name == "literal") return BoundForm::literal;
  if (name == "negated_structure") return BoundForm::negated_structure;
  throw NavError(ErrorCode::config_error,
                 "unknown bound form \"" + std::string(name) +
                     "\" (expected literal|negated_structure)");
}

NmMode parse_nm_mode(std::string_view name) {
  if (name == "objects") return NmMode::objects;
  if (name == "timesteps") return NmMode::timesteps;
  throw NavError(ErrorCode::config_error,
                 "unknown n/m mode \"" + std::string(name) +
                     "\" (expected objects|timesteps)");
}

const char* to_string(BoundForm form) {
  switch (form) {
    case BoundForm::literal:
      return "literal";
    case BoundForm::negated_structure:
      return "negated_structure";
  }
  return "?";
}

const char* to_string(NmMode mode) {
  switch (mode) {
    case NmMode::objects:
      return "objects";
    case NmMode::timesteps:
      return "timesteps";
  }
  return "?";
}

namespace {

// All-mass-on-(0,0) stand-in used when a matrix has nothing to count.
Prob2x2 convention_matrix() { return Prob2x2{1.0, 0.0, 0.0, 0.0}; }

Prob2x2 normalize(const Count2x2& c) {
  const double total = static_cast<double>(c.total());
  return Prob2x2{static_cast<double>(c.c00) / total,
                 static_cast<double>(c.c01) / total,
                 static_cast<double>(c.c10) / total,
                 static_cast<double>(c.c11) / total};
}

void tally(Count2x2& c, bool i, bool j) {
  if (i) {
    if (j)
      ++c.c11;
    else
      ++c.c10;
  } else {
    if (j)
      ++c.c01;
    else
      ++c.c00;
  }
}

// Window predicate: keep timesteps strictly newer than (latest - window),
// where latest ranges over both sides. window <= 0 keeps everything.
struct WindowCut {
  WindowCut(const GraphHistory& history, int window) : window_(window) {
    for (const auto& g : history.perceived) see(g.timestep);
    for (const auto& g : history.imagined) see(g.timestep);
  }

  bool empty_history() const { return !any_; }
  bool keeps(int t) const {
    return window_ <= 0 || t > latest_ - window_;
  }

 private:
  void see(int t) {
    latest_ = any_ ? std::max(latest_, t) : t;
    any_ = true;
  }
  int window_;
  int latest_ = 0;
  bool any_ = false;
};

struct SideAtT {
  // Sorted unique labels present at one timestep on one side.
  std::vector<std::string> labels;

  bool has(const std::string& label) const {
    return std::binary_search(labels.begin(), labels.end(), label);
  }
  bool shares_with(const SideAtT& other) const {
    // True when some label is present at both timesteps.
    auto a = labels.begin();
    auto b = other.labels.begin();
    while (a != labels.end() && b != other.labels.end()) {
      if (*a == *b) return true;
      if (*a < *b)
        ++a;
      else
        ++b;
    }
    return false;
  }
};

}  // namespace

EdgeProbMatrices compute_pq(const GraphHistory& history, int window) {
  WindowCut cut(history, window);
  if (cut.empty_history()) {
    EdgeProbMatrices conv;
    conv.p = convention_matrix();
    conv.q = convention_matrix();
    throw DegenerateInput("empty graph history", conv);
  }

  // Per-timestep label sets for each side, over the windowed union timeline.
  std::set<int> timesteps;
  std::set<std::string> labels;
  std::map<int, SideAtT> perceived_at, imagined_at;
  for (const auto& g : history.perceived) {
    if (!cut.keeps(g.timestep)) continue;
    timesteps.insert(g.timestep);
    SideAtT& side = perceived_at[g.timestep];
    for (const auto& o : g.objects) {
      side.labels.push_back(o.node.label);
      labels.insert(o.node.label);
    }
    std::sort(side.labels.begin(), side.labels.end());
  }
  for (const auto& g : history.imagined) {
    if (!cut.keeps(g.timestep)) continue;
    timesteps.insert(g.timestep);
    SideAtT& side = imagined_at[g.timestep];
    for (const auto& e : g.expected) {
      side.labels.push_back(e.label);
      labels.insert(e.label);
    }
    std::sort(side.labels.begin(), side.labels.end());
  }

  EdgeProbMatrices out;
  static const SideAtT kEmpty;
  auto side_or_empty = [](const std::map<int, SideAtT>& m,
                          int t) -> const SideAtT& {
    auto it = m.find(t);
    return it == m.end() ? kEmpty : it->second;
  };

  // Q: joint membership bit per (timestep, label) grid cell.
  for (int t : timesteps) {
    const SideAtT& p_side = side_or_empty(perceived_at, t);
    const SideAtT& i_side = side_or_empty(imagined_at, t);
    for (const std::string& label : labels) {
      tally(out.raw_q, p_side.has(label), i_side.has(label));
    }
  }

  // P: per unordered timestep pair, whether each side has some object
  // present at both.
  std::vector<int> ts(timesteps.begin(), timesteps.end());
  for (std::size_t a = 0; a < ts.size(); ++a) {
    for (std::size_t b = a + 1; b < ts.size(); ++b) {
      bool i = side_or_empty(perceived_at, ts[a])
                   .shares_with(side_or_empty(perceived_at, ts[b]));
      bool j = side_or_empty(imagined_at, ts[a])
                   .shares_with(side_or_empty(imagined_at, ts[b]));
      tally(out.raw_p, i, j);
    }
  }

  if (out.raw_p.total() == 0 || out.raw_q.total() == 0) {
    EdgeProbMatrices conv = out;
    conv.p = convention_matrix();
    conv.q = convention_matrix();
    std::string what;
    if (labels.empty())
      what = "no labels on either side";
    else if (out.raw_p.total() == 0)
      what = "fewer than two timesteps: no pairs to count";
    else
      what = "empty joint-membership grid";
    throw DegenerateInput(what, conv);
  }

  out.p = normalize(out.raw_p);
  out.q = normalize(out.raw_q);
  return out;
}

double psi(const Prob2x2& m) {
  // (sqrt(a) - sqrt(b))^2 expanded to a + b - 2 sqrt(ab): exact when either
  // product is zero, which one-sided histories hit constantly.
  const double a = m.p11 * m.p00;
  const double b = m.p10 * m.p01;
  const double v = a + b - 2.0 * std::sqrt(a * b);
  return v < 0.0 ? 0.0 : v;
}

BoundResult ambiguity_bound(int n, int m, double psi_a, double p11,
                            BoundForm form) {
  if (n <= 0 || m <= 0) {
    throw DegenerateInput("ambiguity bound needs n > 0 and m > 0, got n=" +
                          std::to_string(n) + " m=" + std::to_string(m));
  }
  const double structure = 2.0 * (static_cast<double>(m) * psi_a +
                                  static_cast<double>(n) * p11);
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  BoundResult result;
  switch (form) {
    case BoundForm::literal:
      // exp(-2 ln n + structure), evaluated as exp(structure)/n^2 so the
      // zero-structure case is the exact rational 1/n^2.
      result.raw = std::exp(structure) / nn;
      break;
    case BoundForm::negated_structure:
      // exp(-2 ln n - structure) * n^2 == exp(-structure).
      result.raw = std::exp(-structure);
      break;
  }
  result.clamped = std::min(1.0, result.raw);
  return result;
}

AlignmentStats confidence(const GraphHistory& history,
                          const BridgeOptions& opts) {
  EdgeProbMatrices pq = compute_pq(history, opts.window);
  WindowCut cut(history, opts.window);

  int n = 0, m = 0;
  switch (opts.nm_mode) {
    case NmMode::objects: {
      std::set<std::string> per, ima;
      for (const auto& g : history.perceived) {
        if (!cut.keeps(g.timestep)) continue;
        for (const auto& o : g.objects) per.insert(o.node.label);
      }
      for (const auto& g : history.imagined) {
        if (!cut.keeps(g.timestep)) continue;
        for (const auto& e : g.expected) ima.insert(e.label);
      }
      n = static_cast<int>(per.size());
      m = static_cast<int>(ima.size());
      break;
    }
    case NmMode::timesteps: {
      for (const auto& g : history.perceived)
        if (cut.keeps(g.timestep)) ++n;
      for (const auto& g : history.imagined)
        if (cut.keeps(g.timestep)) ++m;
      break;
    }
  }

  AlignmentStats stats;
  stats.pq = pq;
  stats.psi_u = psi(pq.p);
  stats.psi_a = psi(pq.q);
  stats.n = n;
  stats.m = m;
  stats.p11 = pq.p.p11;

  if (n <= 0 || m <= 0) {
    throw DegenerateInput("no alignable entities: n=" + std::to_string(n) +
                              " m=" + std::to_string(m),
                          pq);
  }
  BoundResult bound =
      ambiguity_bound(n, m, stats.psi_a, stats.p11, opts.bound_form);
  stats.ambiguity_bound_raw = bound.raw;
  stats.ambiguity_prob = bound.clamped;
  stats.confidence = 1.0 - bound.clamped;
  stats.degenerate = false;
  return stats;
}

bool should_trigger(double confidence_value, double tau) {
  return confidence_value <= tau;
}

}  // namespace sfnav
