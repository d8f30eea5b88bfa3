#include "resd/errors.hpp"

#include "resd/surface.hpp"

namespace resd {

const char* to_string(Err e) {
  switch (e) {
    case Err::BranchPoint: return "BranchPoint";
    case Err::OutsideAnalyticityDomain: return "OutsideAnalyticityDomain";
    case Err::StepSizeUnderflow: return "StepSizeUnderflow";
    case Err::DecayViolation: return "DecayViolation";
    case Err::DivergentIntegral: return "DivergentIntegral";
    case Err::XDependenceDetected: return "XDependenceDetected";
    case Err::ZeroOnBoundary: return "ZeroOnBoundary";
    case Err::PhaseTrackingFailed: return "PhaseTrackingFailed";
    case Err::MaxDepthExceeded: return "MaxDepthExceeded";
    case Err::NotARoot: return "NotARoot";
    case Err::SingularAtResonance: return "SingularAtResonance";
    case Err::ContourInvalid: return "ContourInvalid";
    case Err::UnsupportedPotential: return "UnsupportedPotential";
    case Err::NoAdmissibleRay: return "NoAdmissibleRay";
    case Err::RegionUnreachable: return "RegionUnreachable";
    case Err::ExcludedPoint: return "ExcludedPoint";
  }
  return "UnknownError";
}

const char* to_string(Sheet s) {
  switch (s) {
    case Sheet::First: return "first";
    case Sheet::Second: return "second";
    case Sheet::Cut: return "cut";
  }
  return "unknown";
}

}  // namespace resd
