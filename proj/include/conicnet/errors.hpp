#pragma once

#include <stdexcept>
#include <string>

namespace conicnet {

enum class Err {
  CoincidentPoints,
  CoincidentLines,
  NotCollinear,
  DegenerateCrossRatio,
  DegenerateInput,
  PointOnWrongEdge,
  PointAtVertex,
  PointNotOnEdge,
  CenterOnLine,
  NotAnEndomorphism,
  NonGenericQuadrilateral,
  DegenerateConic,
  DegenerateBase,
  NonGenericLines,
  NotTangent,
  ParameterOutOfRange,
  PointInsideConic,
  IrrationalPencilRoot,
  DegenerateFamilyMember,
  ZeroLambda,
  ZeroGamma,
  ChartFailure,
  ClosureFailure,
  NonGenericChain,
  ChainPointOffConic,
  NoCommonConic,
  InconsistentStrip,
  NotTangentChord,
  TangentDegeneracy,
  NoIncircle,
  ParseError,
  ReferenceError,
  EmptyViewport,
};

inline const char* err_name(Err code) {
  switch (code) {
    case Err::CoincidentPoints: return "CoincidentPoints";
    case Err::CoincidentLines: return "CoincidentLines";
    case Err::NotCollinear: return "NotCollinear";
    case Err::DegenerateCrossRatio: return "DegenerateCrossRatio";
    case Err::DegenerateInput: return "DegenerateInput";
    case Err::PointOnWrongEdge: return "PointOnWrongEdge";
    case Err::PointAtVertex: return "PointAtVertex";
    case Err::PointNotOnEdge: return "PointNotOnEdge";
    case Err::CenterOnLine: return "CenterOnLine";
    case Err::NotAnEndomorphism: return "NotAnEndomorphism";
    case Err::NonGenericQuadrilateral: return "NonGenericQuadrilateral";
    case Err::DegenerateConic: return "DegenerateConic";
    case Err::DegenerateBase: return "DegenerateBase";
    case Err::NonGenericLines: return "NonGenericLines";
    case Err::NotTangent: return "NotTangent";
    case Err::ParameterOutOfRange: return "ParameterOutOfRange";
    case Err::PointInsideConic: return "PointInsideConic";
    case Err::IrrationalPencilRoot: return "IrrationalPencilRoot";
    case Err::DegenerateFamilyMember: return "DegenerateFamilyMember";
    case Err::ZeroLambda: return "ZeroLambda";
    case Err::ZeroGamma: return "ZeroGamma";
    case Err::ChartFailure: return "ChartFailure";
    case Err::ClosureFailure: return "ClosureFailure";
    case Err::NonGenericChain: return "NonGenericChain";
    case Err::ChainPointOffConic: return "ChainPointOffConic";
    case Err::NoCommonConic: return "NoCommonConic";
    case Err::InconsistentStrip: return "InconsistentStrip";
    case Err::NotTangentChord: return "NotTangentChord";
    case Err::TangentDegeneracy: return "TangentDegeneracy";
    case Err::NoIncircle: return "NoIncircle";
    case Err::ParseError: return "ParseError";
    case Err::ReferenceError: return "ReferenceError";
    case Err::EmptyViewport: return "EmptyViewport";
  }
  return "UnknownError";
}

class GeomError : public std::runtime_error {
 public:
  GeomError(Err code, const std::string& msg)
      : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

// Touching propagation found a vertex whose surrounding 4-loop does not close.
class ClosureError : public GeomError {
 public:
  ClosureError(int i, int j, const std::string& residual)
      : GeomError(Err::ClosureFailure,
                  "monodromy around vertex (" + std::to_string(i) + "," + std::to_string(j) +
                      ") is not the identity; residual " + residual),
        i_(i), j_(j), residual_(residual) {}
  int vertex_i() const { return i_; }
  int vertex_j() const { return j_; }
  const std::string& residual() const { return residual_; }

 private:
  int i_, j_;
  std::string residual_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw GeomError(code, msg); }

inline void require(bool cond, Err code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace conicnet
