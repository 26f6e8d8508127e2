#pragma once
#include <json.hpp>

#include "qtherm/ensemble.hpp"

namespace qtherm {

// JSON-lines trajectory archive.
//
// Line 1 is a header object:
//   {"format":"qtherm-records","version":1,"experiment":...,"n":...,
//    "seed":...,"dt":...}
// Every further line is one trajectory:
//   {"i":..,"err":null|"...","p0":..,"init":..,"final":..,
//    "u0":..,"un":..,"w":..,"wfb":..,"qcl":..,"qq":..,
//    "jumps":..,"first_jump":null|..,"exponent":null|..,"fidelity":null|..,
//    "entropy":null|{"boundary":..,"conditional":..|"inf"},
//    "sampled_u":[..],
//    "phases":[{"scheme":"qj","t0":..,"dt":..,"steps":..,"events":[[n,ch],..]}
//              |{"scheme":"qsd","t0":..,"dt":..,"steps":..,"dw":[[..],..]}],
//    "series":null|{"t":[..],"du":[..],"dw":[..],"dwfb":[..],
//                   "dqcl":[..],"dqq":[..]}}
// Numbers are written so that parsing recovers them bit-exactly; +inf is
// encoded as the string "inf" (JSON has no infinities).
void write_records(const std::string& path, const EnsembleStats& stats);

struct RecordsFile {
  nlohmann::json header;
  std::vector<nlohmann::json> lines;
};
// throws IoError naming the offending line on malformed input
RecordsFile read_records(const std::string& path);

// the JSON object a single trajectory serializes to
nlohmann::json record_json(const ProtocolResult& r);

}  // namespace qtherm
