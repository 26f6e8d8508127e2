#pragma once
#include <stdexcept>
#include <string>

namespace qtherm {

// Every failure path throws; nothing is silently patched up.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// operator/state dimensions disagree
struct DimMismatchError : Error { using Error::Error; };
// a vector that should be a state has (near-)zero norm
struct ZeroNormError : Error { using Error::Error; };
// a matrix that should be a density operator is not one
struct InvalidDensityError : Error { using Error::Error; };
// dt is too coarse for the short-time expansion to be trusted
struct TimestepError : Error { using Error::Error; };
// a dissipation channel is malformed or used outside its contract
struct ChannelError : Error { using Error::Error; };
// an experiment protocol is inconsistent
struct ProtocolError : Error { using Error::Error; };
// the discrete outcome tree cannot be enumerated
struct EnumerationError : Error { using Error::Error; };
// a config or CLI value is out of range / unknown
struct ValidationError : Error { using Error::Error; };
// file read/write failure
struct IoError : Error { using Error::Error; };

// config text error with source position
struct ParseError : Error {
  int line = 0, col = 0;
  ParseError(const std::string& msg, int line_, int col_)
      : Error("parse error at line " + std::to_string(line_) + ", col " +
              std::to_string(col_) + ": " + msg),
        line(line_), col(col_) {}
};

}  // namespace qtherm
