#include "bhdimer/errors.hpp"

namespace bhd {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::ZeroTunneling: return "ZeroTunneling";
        case ErrorKind::NonAttractive: return "NonAttractive";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::StructureViolation: return "StructureViolation";
        case ErrorKind::RegimeBoundary: return "RegimeBoundary";
        case ErrorKind::ZeroRoot: return "ZeroRoot";
        case ErrorKind::NonRealEnergy: return "NonRealEnergy";
        case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
        case ErrorKind::RegimeViolation: return "RegimeViolation";
        case ErrorKind::InvalidIndex: return "InvalidIndex";
        case ErrorKind::SizeGuard: return "SizeGuard";
        case ErrorKind::NumericalOverflow: return "NumericalOverflow";
        case ErrorKind::ZeroNorm: return "ZeroNorm";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace bhd
