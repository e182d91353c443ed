#include <algorithm>
#include <cmath>

#include "sfnav/runner.hpp"

namespace sfnav {

AggregateMetrics compute_metrics(const std::vector<EpisodeResult>& results,
                                 double lambda) {
  if (results.empty())
    throw NavError(ErrorCode::empty_batch, "no episode results to aggregate");
  (void)lambda;  // per-episode u_tok is already weighted; kept in the
                 // signature so callers state the batch convention once

  AggregateMetrics m;
  m.episodes = static_cast<int>(results.size());
  double sr = 0, osr = 0, spl = 0, ne = 0, tl = 0;
  double l_tok = 0, v_tok = 0, u_tok = 0;
  double l_time = 0, v_time = 0, t_time = 0;
  for (const EpisodeResult& r : results) {
    if (!r.error.empty()) ++m.failures;
    sr += r.success ? 1.0 : 0.0;
    osr += r.oracle_success ? 1.0 : 0.0;
    spl += r.spl_term;
    ne += r.ne;
    tl += r.tl;
    l_tok += static_cast<double>(r.cost.l_tok);
    v_tok += static_cast<double>(r.cost.v_tok);
    u_tok += r.u_tok;
    l_time += r.cost.l_time;
    v_time += r.cost.v_time;
    t_time += r.t_time;
    m.call_count += r.cost.call_count;
  }
  const double n = static_cast<double>(m.episodes);
  m.sr = sr / n;
  m.osr = osr / n;
  m.spl = spl / n;
  m.ne = ne / n;
  m.tl = tl / n;
  m.l_tok = l_tok / n;
  m.v_tok = v_tok / n;
  m.u_tok = u_tok / n;
  m.l_time = l_time / n;
  m.v_time = v_time / n;
  m.t_time = t_time / n;
  return m;
}

std::vector<SweepRow> sweep_tau(const Scene& scene, const EpisodeSuite& suite,
                                const BackendFactory& factory,
                                const RunConfig& base,
                                const std::vector<double>& taus,
                                std::vector<std::string>* warnings) {
  if (taus.empty())
    throw NavError(ErrorCode::empty_batch, "tau sweep needs at least one tau");

  std::vector<double> unique_taus;
  for (double tau : taus) {
    if (std::find(unique_taus.begin(), unique_taus.end(), tau) !=
        unique_taus.end()) {
      if (warnings)
        warnings->push_back("duplicate tau " + std::to_string(tau) +
                            " dropped from sweep");
      continue;
    }
    unique_taus.push_back(tau);
  }

  std::vector<SweepRow> rows;
  rows.reserve(unique_taus.size());
  for (double tau : unique_taus) {
    RunConfig config = base;
    config.tau = tau;
    config.validate();
    std::vector<EpisodeResult> results =
        run_batch(scene, suite, factory, config);
    rows.push_back(SweepRow{tau, compute_metrics(results, config.lambda)});
  }
  return rows;
}

}  // namespace sfnav
