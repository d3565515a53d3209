#pragma once

#include <stdexcept>
#include <string>

namespace geobeam {

enum class ErrorKind {
    ConfigInvalid,
    NonPositiveMetric,
    InsufficientTaylorData,
    DegenerateGeodesic,
    HyperbolicGeodesic,
    CertificateRefused,
    GridTooSmall,
    TailTooLarge,
    SmallDivisorBreach,
    BohrSommerfeldViolation,
    GridResolutionError,
    BoundaryLeak,
    StepUnstable,
    IoFailure,
};

const char* kind_name(ErrorKind k);

// short scientific rendering for error messages
std::string sci(double v);

// process exit status used by the command line tool
int exit_code(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

class SmallDivisorBreach : public Error {
public:
    SmallDivisorBreach(int j, int l, double divisor, double coefficient);
    int j, l;
    double divisor, coefficient;
};

class ConfigInvalid : public Error {
public:
    ConfigInvalid(std::string pointer, const std::string& why)
        : Error(ErrorKind::ConfigInvalid, pointer + ": " + why), pointer(std::move(pointer)) {}
    std::string pointer;
};

}  // namespace geobeam
