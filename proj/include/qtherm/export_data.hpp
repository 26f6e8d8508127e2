#pragma once
#include <string>
#include <utility>
#include <vector>

#include "qtherm/ensemble.hpp"

namespace qtherm {

// shortest text that parses back to the same double; "inf"/"-inf"/"nan" for
// the non-finite values
std::string fmt17(double v);

void write_tsv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// summary estimators computed from an ensemble (or, with weights, from an
// enumerated leaf set); names are stable
std::vector<std::pair<std::string, EstimatorResult>> build_estimators(
    const std::vector<ProtocolResult>& trajectories,
    const std::vector<double>& weights = {});

void export_estimators(const std::string& path,
                       const std::vector<std::pair<std::string, EstimatorResult>>& es);
void export_histogram(const std::string& path, const Histogram& h);

// writes trajectories.tsv, density.tsv (when sampled), estimators.tsv;
// returns the paths written
std::vector<std::string> export_tables(const std::string& dir,
                                       const EnsembleStats& stats);
// leaves.tsv + estimators.tsv for an enumerated tree
std::vector<std::string> export_enumeration(
    const std::string& dir, const std::vector<EnumeratedTrajectory>& leaves);

}  // namespace qtherm
