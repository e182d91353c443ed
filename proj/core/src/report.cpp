#include "sfnav/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sfnav/errors.hpp"

namespace sfnav {

namespace {

using json = nlohmann::ordered_json;

json ledger_to_json(const CostLedger& c) {
  json node;
  node["l_tok"] = c.l_tok;
  node["v_tok"] = c.v_tok;
  node["l_time"] = c.l_time;
  node["v_time"] = c.v_time;
  node["call_count"] = c.call_count;
  return node;
}

json metrics_to_json(const AggregateMetrics& m) {
  json node;
  node["episodes"] = m.episodes;
  node["failures"] = m.failures;
  node["sr"] = m.sr;
  node["osr"] = m.osr;
  node["spl"] = m.spl;
  node["ne"] = m.ne;
  node["tl"] = m.tl;
  node["l_tok"] = m.l_tok;
  node["v_tok"] = m.v_tok;
  node["u_tok"] = m.u_tok;
  node["l_time"] = m.l_time;
  node["v_time"] = m.v_time;
  node["t_time"] = m.t_time;
  node["call_count"] = m.call_count;
  return node;
}

json config_to_json(const RunConfig& c) {
  json node;
  node["tau"] = c.tau;
  node["d_stop"] = c.d_stop;
  node["d_sub"] = c.d_sub;
  node["r_sense"] = c.r_sense;
  node["t_max"] = c.t_max;
  node["horizon"] = c.horizon;
  node["lambda"] = c.lambda;
  node["seed"] = c.seed;
  node["v_tok_per_step"] = c.v_tok_per_step;
  node["v_time_per_step"] = c.v_time_per_step;
  node["always_replan"] = c.always_replan;
  node["nm_mode"] = to_string(c.bridge.nm_mode);
  node["bound_form"] = to_string(c.bridge.bound_form);
  node["window"] = c.bridge.window;
  node["parse_retries"] = c.planner.parse_retries;
  return node;
}

}  // namespace

std::string format_double(double value) {
  // %.17g round-trips every double and never varies across libcs we target.
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string results_to_json(const std::vector<EpisodeResult>& results,
                            const AggregateMetrics& metrics,
                            const RunConfig& config) {
  json root;
  root["schema_version"] = 1;
  root["config"] = config_to_json(config);
  root["aggregate"] = metrics_to_json(metrics);
  root["episodes"] = json::array();
  for (const EpisodeResult& r : results) {
    json node;
    node["id"] = r.episode_id;
    node["success"] = r.success;
    node["oracle_success"] = r.oracle_success;
    node["ne"] = r.ne;
    node["tl"] = r.tl;
    node["shortest"] = r.shortest;
    node["spl_term"] = r.spl_term;
    node["steps"] = r.steps;
    node["cost"] = ledger_to_json(r.cost);
    node["u_tok"] = r.u_tok;
    node["t_time"] = r.t_time;
    node["error"] = r.error;
    root["episodes"].push_back(std::move(node));
  }
  return root.dump(2) + "\n";
}

std::string results_to_csv(const std::vector<EpisodeResult>& results) {
  std::string out =
      "episode_id,success,oracle_success,ne,tl,shortest,spl_term,steps,"
      "l_tok,v_tok,u_tok,l_time,v_time,t_time,call_count,error\n";
  for (const EpisodeResult& r : results) {
    out += r.episode_id;
    out += ',';
    out += r.success ? '1' : '0';
    out += ',';
    out += r.oracle_success ? '1' : '0';
    out += ',';
    out += format_double(r.ne);
    out += ',';
    out += format_double(r.tl);
    out += ',';
    out += format_double(r.shortest);
    out += ',';
    out += format_double(r.spl_term);
    out += ',';
    out += std::to_string(r.steps);
    out += ',';
    out += std::to_string(r.cost.l_tok);
    out += ',';
    out += std::to_string(r.cost.v_tok);
    out += ',';
    out += format_double(r.u_tok);
    out += ',';
    out += format_double(r.cost.l_time);
    out += ',';
    out += format_double(r.cost.v_time);
    out += ',';
    out += format_double(r.t_time);
    out += ',';
    out += std::to_string(r.cost.call_count);
    out += ',';
    out += r.error;
    out += '\n';
  }
  return out;
}

std::string aggregate_to_csv(const AggregateMetrics& m) {
  // The eleven metric columns; counts live in the JSON report.
  std::string out = "sr,osr,spl,ne,tl,l_tok,v_tok,u_tok,l_time,v_time,t_time\n";
  const double values[] = {m.sr,    m.osr,   m.spl,    m.ne,
                           m.tl,    m.l_tok, m.v_tok,  m.u_tok,
                           m.l_time, m.v_time, m.t_time};
  for (std::size_t i = 0; i < std::size(values); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  out += '\n';
  return out;
}

std::string traces_to_csv(const std::vector<EpisodeResult>& results) {
  std::string out =
      "episode_id,t,viewpoint,confidence,degenerate,triggered,psi_u,psi_a,n,m,"
      "p11,ambiguity_prob,active_target,action,ne,l_tok_delta,v_tok_delta,"
      "l_time_delta,v_time_delta\n";
  for (const EpisodeResult& r : results) {
    for (const StepRecord& s : r.trace) {
      out += r.episode_id;
      out += ',';
      out += std::to_string(s.t);
      out += ',';
      out += s.viewpoint;
      out += ',';
      out += format_double(s.align.confidence);
      out += ',';
      out += s.align.degenerate ? '1' : '0';
      out += ',';
      out += s.triggered ? '1' : '0';
      out += ',';
      out += format_double(s.align.psi_u);
      out += ',';
      out += format_double(s.align.psi_a);
      out += ',';
      out += std::to_string(s.align.n);
      out += ',';
      out += std::to_string(s.align.m);
      out += ',';
      out += format_double(s.align.p11);
      out += ',';
      out += format_double(s.align.ambiguity_prob);
      out += ',';
      out += s.active_target;
      out += ',';
      out += s.action;
      out += ',';
      out += format_double(s.ne);
      out += ',';
      out += std::to_string(s.l_tok_delta);
      out += ',';
      out += std::to_string(s.v_tok_delta);
      out += ',';
      out += format_double(s.l_time_delta);
      out += ',';
      out += format_double(s.v_time_delta);
      out += '\n';
    }
  }
  return out;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "tau,episodes,sr,osr,spl,ne,tl,l_tok,v_tok,u_tok,l_time,v_time,t_time,"
      "call_count\n";
  for (const SweepRow& row : rows) {
    const AggregateMetrics& m = row.metrics;
    out += format_double(row.tau);
    out += ',';
    out += std::to_string(m.episodes);
    out += ',';
    out += format_double(m.sr);
    out += ',';
    out += format_double(m.osr);
    out += ',';
    out += format_double(m.spl);
    out += ',';
    out += format_double(m.ne);
    out += ',';
    out += format_double(m.tl);
    out += ',';
    out += format_double(m.l_tok);
    out += ',';
    out += format_double(m.v_tok);
    out += ',';
    out += format_double(m.u_tok);
    out += ',';
    out += format_double(m.l_time);
    out += ',';
    out += format_double(m.v_time);
    out += ',';
    out += format_double(m.t_time);
    out += ',';
    out += std::to_string(m.call_count);
    out += '\n';
  }
  return out;
}

std::string sweep_to_json(const std::vector<SweepRow>& rows,
                          const RunConfig& config) {
  json root;
  root["schema_version"] = 1;
  root["config"] = config_to_json(config);
  root["rows"] = json::array();
  for (const SweepRow& row : rows) {
    json node;
    node["tau"] = row.tau;
    node["metrics"] = metrics_to_json(row.metrics);
    root["rows"].push_back(std::move(node));
  }
  return root.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NavError(ErrorCode::io_error, "cannot open for write: " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw NavError(ErrorCode::io_error, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NavError(ErrorCode::io_error, "cannot open for read: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw NavError(ErrorCode::io_error, "read failed: " + path);
  return buf.str();
}

}  // namespace sfnav
