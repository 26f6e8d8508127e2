#include "qtherm/export_data.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace qtherm {

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_tsv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? '\t' : '\n');
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw IoError("tsv row width mismatch for '" + path + "'");
    for (size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? '\t' : '\n');
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

std::vector<std::pair<std::string, EstimatorResult>> build_estimators(
    const std::vector<ProtocolResult>& trajectories,
    const std::vector<double>& weights) {
  std::vector<const ProtocolResult*> ok;
  ok.reserve(trajectories.size());
  for (const auto& r : trajectories)
    if (r.error.empty()) ok.push_back(&r);
  if (!weights.empty() && weights.size() != trajectories.size())
    throw ValidationError("weights must match the trajectory count");
  if (!weights.empty() && ok.size() != trajectories.size())
    throw ValidationError("weighted estimators need a divergence-free set");
  std::vector<std::pair<std::string, EstimatorResult>> es;
  if (ok.empty()) return es;

  auto collect = [&](auto&& get) {
    std::vector<double> v;
    v.reserve(ok.size());
    for (const auto* r : ok) v.push_back(get(*r));
    return v;
  };
  auto put = [&](const char* name, const std::vector<double>& v, bool exp_form) {
    es.emplace_back(name, exp_form ? exp_average(v, weights) : mean_value(v, weights));
  };

  put("mean_u_final", collect([](const ProtocolResult& r) { return r.ledger.u_final; }), false);
  put("mean_delta_u", collect([](const ProtocolResult& r) { return r.ledger.delta_u(); }), false);
  put("mean_work", collect([](const ProtocolResult& r) { return r.ledger.work; }), false);
  put("mean_work_fb", collect([](const ProtocolResult& r) { return r.ledger.work_fb; }), false);
  put("mean_q_cl", collect([](const ProtocolResult& r) { return r.ledger.q_cl; }), false);
  put("mean_q_q", collect([](const ProtocolResult& r) { return r.ledger.q_q; }), false);
  put("jump_fraction",
      collect([](const ProtocolResult& r) { return r.ledger.jump_count > 0 ? 1.0 : 0.0; }),
      false);

  bool all_entropy = true, all_exponent = true, all_fidelity = true;
  for (const auto* r : ok) {
    all_entropy = all_entropy && r->has_entropy;
    all_exponent = all_exponent && r->ledger_exponent.has_value();
    all_fidelity = all_fidelity && r->final_fidelity >= 0;
  }
  if (all_entropy) {
    put("mean_entropy",
        collect([](const ProtocolResult& r) { return r.entropy.total(); }), false);
    put("ft", collect([](const ProtocolResult& r) { return r.entropy.total(); }), true);
  }
  if (all_exponent)
    put("jarzynski",
        collect([](const ProtocolResult& r) { return *r.ledger_exponent; }), true);
  if (all_fidelity)
    put("mean_final_fidelity",
        collect([](const ProtocolResult& r) { return r.final_fidelity; }), false);
  return es;
}

void export_estimators(const std::string& path,
                       const std::vector<std::pair<std::string, EstimatorResult>>& es) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(es.size());
  for (const auto& [name, e] : es)
    rows.push_back({name, fmt17(e.value), fmt17(e.std_error), std::to_string(e.n)});
  write_tsv(path, {"name", "value", "std_error", "n"}, rows);
}

void export_histogram(const std::string& path, const Histogram& h) {
  std::vector<std::vector<std::string>> rows;
  const bool binned = !h.edges.empty();
  for (size_t i = 0; i < h.value.size(); ++i) {
    rows.push_back({fmt17(h.value[i]),
                    binned ? fmt17(h.edges[i]) : fmt17(h.value[i]),
                    binned ? fmt17(h.edges[i + 1]) : fmt17(h.value[i]),
                    fmt17(h.mass[i]), std::to_string(h.count[i])});
  }
  write_tsv(path, {"value", "lo", "hi", "mass", "count"}, rows);
}

namespace {

std::vector<std::string> trajectory_row(const ProtocolResult& r) {
  auto opt = [](const std::optional<double>& v) {
    return v ? fmt17(*v) : std::string("nan");
  };
  return {std::to_string(r.index),
          r.error.empty() ? "-" : r.error,
          std::to_string(r.initial_outcome),
          std::to_string(r.final_outcome),
          fmt17(r.ledger.u_initial),
          fmt17(r.ledger.u_final),
          fmt17(r.ledger.work),
          fmt17(r.ledger.work_fb),
          fmt17(r.ledger.q_cl),
          fmt17(r.ledger.q_q),
          std::to_string(r.ledger.jump_count),
          fmt17(r.ledger.first_jump_time),
          fmt17(r.log_p_initial),
          r.has_entropy ? fmt17(r.entropy.boundary) : "nan",
          r.has_entropy ? fmt17(r.entropy.conditional) : "nan",
          opt(r.ledger_exponent),
          r.final_fidelity >= 0 ? fmt17(r.final_fidelity) : "nan"};
}

const std::vector<std::string> kTrajHeader = {
    "i",    "err",  "init",       "final",    "u0",       "un",
    "w",    "wfb",  "qcl",        "qq",       "jumps",    "first_jump",
    "p0",   "boundary", "conditional", "exponent", "fidelity"};

}  // namespace

std::vector<std::string> export_tables(const std::string& dir,
                                       const EnsembleStats& stats) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::vector<std::string> written;

  {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(stats.trajectories.size());
    for (const auto& r : stats.trajectories) rows.push_back(trajectory_row(r));
    const std::string p = dir + "/trajectories.tsv";
    write_tsv(p, kTrajHeader, rows);
    written.push_back(p);
  }

  if (!stats.mean_density.empty()) {
    const int dim = stats.mean_density.front().dim();
    std::vector<std::string> header = {"t"};
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        header.push_back("re_" + std::to_string(i) + std::to_string(j));
        header.push_back("im_" + std::to_string(i) + std::to_string(j));
      }
    const bool cmp = stats.track.comparable &&
                     stats.track.rho.size() == stats.mean_density.size();
    if (cmp) header.push_back("dist_to_master_eq");
    std::vector<std::vector<std::string>> rows;
    for (size_t s = 0; s < stats.mean_density.size(); ++s) {
      std::vector<std::string> row = {fmt17(stats.sample_times[s])};
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          row.push_back(fmt17(stats.mean_density[s].rho(i, j).real()));
          row.push_back(fmt17(stats.mean_density[s].rho(i, j).imag()));
        }
      if (cmp)
        row.push_back(fmt17(trace_distance(stats.mean_density[s], stats.track.rho[s])));
      rows.push_back(std::move(row));
    }
    const std::string p = dir + "/density.tsv";
    write_tsv(p, header, rows);
    written.push_back(p);
  }

  {
    const std::string p = dir + "/estimators.tsv";
    export_estimators(p, build_estimators(stats.trajectories));
    written.push_back(p);
  }
  return written;
}

std::vector<std::string> export_enumeration(
    const std::string& dir, const std::vector<EnumeratedTrajectory>& leaves) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::vector<std::string> written;

  std::vector<std::vector<std::string>> rows;
  rows.reserve(leaves.size());
  for (const auto& leaf : leaves) {
    auto row = trajectory_row(leaf.result);
    row.insert(row.begin() + 1, fmt17(leaf.prob));
    rows.push_back(std::move(row));
  }
  auto header = kTrajHeader;
  header.insert(header.begin() + 1, "prob");
  const std::string p = dir + "/leaves.tsv";
  write_tsv(p, header, rows);
  written.push_back(p);

  std::vector<ProtocolResult> rs;
  std::vector<double> ws;
  rs.reserve(leaves.size());
  ws.reserve(leaves.size());
  for (const auto& leaf : leaves) {
    rs.push_back(leaf.result);
    ws.push_back(leaf.prob);
  }
  const std::string pe = dir + "/estimators.tsv";
  export_estimators(pe, build_estimators(rs, ws));
  written.push_back(pe);
  return written;
}

}  // namespace qtherm
