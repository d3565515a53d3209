#include "geobeam/errors.hpp"

#include <cstdio>

namespace geobeam {

const char* kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::ConfigInvalid: return "ConfigInvalid";
        case ErrorKind::NonPositiveMetric: return "NonPositiveMetric";
        case ErrorKind::InsufficientTaylorData: return "InsufficientTaylorData";
        case ErrorKind::DegenerateGeodesic: return "DegenerateGeodesic";
        case ErrorKind::HyperbolicGeodesic: return "HyperbolicGeodesic";
        case ErrorKind::CertificateRefused: return "CertificateRefused";
        case ErrorKind::GridTooSmall: return "GridTooSmall";
        case ErrorKind::TailTooLarge: return "TailTooLarge";
        case ErrorKind::SmallDivisorBreach: return "SmallDivisorBreach";
        case ErrorKind::BohrSommerfeldViolation: return "BohrSommerfeldViolation";
        case ErrorKind::GridResolutionError: return "GridResolutionError";
        case ErrorKind::BoundaryLeak: return "BoundaryLeak";
        case ErrorKind::StepUnstable: return "StepUnstable";
        case ErrorKind::IoFailure: return "IoFailure";
    }
    return "Unknown";
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::ConfigInvalid: return 2;
        case ErrorKind::DegenerateGeodesic:
        case ErrorKind::HyperbolicGeodesic:
        case ErrorKind::CertificateRefused: return 3;
        case ErrorKind::SmallDivisorBreach: return 4;
        case ErrorKind::GridTooSmall:
        case ErrorKind::GridResolutionError:
        case ErrorKind::BoundaryLeak: return 5;
        case ErrorKind::NonPositiveMetric:
        case ErrorKind::InsufficientTaylorData:
        case ErrorKind::BohrSommerfeldViolation: return 6;
        case ErrorKind::TailTooLarge:
        case ErrorKind::StepUnstable: return 7;
        case ErrorKind::IoFailure: return 8;
    }
    return 1;
}

static std::string breach_message(int j, int l, double d, double c) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "resonant mode (j=%d, l=%d): divisor %.3e with coefficient %.3e", j, l, d, c);
    return buf;
}

SmallDivisorBreach::SmallDivisorBreach(int j_, int l_, double d, double c)
    : Error(ErrorKind::SmallDivisorBreach, breach_message(j_, l_, d, c)), j(j_), l(l_), divisor(d), coefficient(c) {}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

}  // namespace geobeam
