#include "qtherm/records_io.hpp"

#include <fstream>

namespace qtherm {

using nlohmann::json;

json record_json(const ProtocolResult& r) {
  json j;
  j["i"] = r.index;
  j["err"] = r.error.empty() ? json(nullptr) : json(r.error);
  j["p0"] = r.log_p_initial;
  j["init"] = r.initial_outcome;
  j["final"] = r.final_outcome;
  j["u0"] = r.ledger.u_initial;
  j["un"] = r.ledger.u_final;
  j["w"] = r.ledger.work;
  j["wfb"] = r.ledger.work_fb;
  j["qcl"] = r.ledger.q_cl;
  j["qq"] = r.ledger.q_q;
  j["jumps"] = r.ledger.jump_count;
  j["first_jump"] = std::isnan(r.ledger.first_jump_time)
                        ? json(nullptr)
                        : json(r.ledger.first_jump_time);
  j["exponent"] = r.ledger_exponent ? json(*r.ledger_exponent) : json(nullptr);
  j["fidelity"] = r.final_fidelity >= 0 ? json(r.final_fidelity) : json(nullptr);
  if (r.has_entropy) {
    json e;
    e["boundary"] = r.entropy.boundary;
    e["conditional"] = std::isinf(r.entropy.conditional)
                           ? json("inf")
                           : json(r.entropy.conditional);
    j["entropy"] = e;
  } else {
    j["entropy"] = nullptr;
  }
  j["sampled_u"] = r.sampled_u;

  json phases = json::array();
  for (const auto& rec : r.records) {
    json p;
    p["t0"] = rec.t0;
    p["dt"] = rec.dt;
    p["steps"] = rec.steps;
    if (rec.scheme == Scheme::QJ) {
      p["scheme"] = "qj";
      json events = json::array();
      for (int n = 0; n < rec.steps; ++n)
        if (const Jump* jm = std::get_if<Jump>(&rec.outcomes[n]))
          events.push_back({n, jm->channel});
      p["events"] = events;
    } else {
      p["scheme"] = "qsd";
      json dws = json::array();
      for (int n = 0; n < rec.steps; ++n)
        dws.push_back(std::get<Diffusive>(rec.outcomes[n]).dw);
      p["dw"] = dws;
    }
    phases.push_back(p);
  }
  j["phases"] = phases;

  if (!r.ledger.steps.empty()) {
    json s;
    std::vector<double> t, du, dw, dwfb, dqcl, dqq;
    for (const auto& ls : r.ledger.steps) {
      t.push_back(ls.t);
      du.push_back(ls.dU);
      dw.push_back(ls.dW);
      dwfb.push_back(ls.dW_fb);
      dqcl.push_back(ls.dQ_cl);
      dqq.push_back(ls.dQ_q);
    }
    s["t"] = t;
    s["du"] = du;
    s["dw"] = dw;
    s["dwfb"] = dwfb;
    s["dqcl"] = dqcl;
    s["dqq"] = dqq;
    j["series"] = s;
  } else {
    j["series"] = nullptr;
  }
  return j;
}

void write_records(const std::string& path, const EnsembleStats& stats) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write records file '" + path + "'");
  json h;
  h["format"] = "qtherm-records";
  h["version"] = 1;
  h["experiment"] = stats.experiment;
  h["n"] = stats.n;
  h["seed"] = stats.master_seed;
  h["dt"] = stats.dt;
  out << h.dump() << "\n";
  for (const auto& r : stats.trajectories) out << record_json(r).dump() << "\n";
  if (!out) throw IoError("failed while writing '" + path + "'");
}

RecordsFile read_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read records file '" + path + "'");
  RecordsFile rf;
  std::string line;
  long long ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const std::exception& e) {
      throw IoError("records line " + std::to_string(ln) + ": " + e.what());
    }
    if (ln == 1) {
      if (!j.is_object() || j.value("format", "") != "qtherm-records")
        throw IoError("records line 1: not a qtherm-records header");
      if (j.value("version", 0) != 1)
        throw IoError("records line 1: unsupported version");
      rf.header = std::move(j);
    } else {
      if (!j.is_object() || !j.contains("i"))
        throw IoError("records line " + std::to_string(ln) +
                      ": not a trajectory object");
      rf.lines.push_back(std::move(j));
    }
  }
  if (ln == 0) throw IoError("records file '" + path + "' is empty");
  return rf;
}

}  // namespace qtherm
