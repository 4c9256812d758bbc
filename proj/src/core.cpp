#include "mxw/core.hpp"

namespace mxw {

const char* error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidMaterial: return "InvalidMaterial";
    case ErrorKind::DegenerateDirection: return "DegenerateDirection";
    case ErrorKind::NotPartiallyAnisotropic: return "NotPartiallyAnisotropic";
    case ErrorKind::NonFiniteSymbol: return "NonFiniteSymbol";
    case ErrorKind::RealFrequency: return "RealFrequency";
    case ErrorKind::MeanNotZero: return "MeanNotZero";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::MethodsDisagree: return "MethodsDisagree";
    case ErrorKind::OnSingularSet: return "OnSingularSet";
    case ErrorKind::EmptyRegion: return "EmptyRegion";
    case ErrorKind::ExponentOrder: return "ExponentOrder";
    case ErrorKind::Io: return "Io";
  }
  return "Error";
}

}  // namespace mxw
