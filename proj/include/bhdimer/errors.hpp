#pragma once

#include <stdexcept>
#include <string>

namespace bhd {

enum class ErrorKind {
    InvalidParams,
    ZeroTunneling,
    NonAttractive,
    IndexOutOfRange,
    ConvergenceFailure,
    LengthMismatch,
    NoConvergence,
    StructureViolation,
    RegimeBoundary,
    ZeroRoot,
    NonRealEnergy,
    DegenerateDenominator,
    RegimeViolation,
    InvalidIndex,
    SizeGuard,
    NumericalOverflow,
    ZeroNorm,
    InsufficientData,
    Io,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace bhd
