#pragma once

#include <stdexcept>
#include <string>

namespace orbitport {

// Base for all domain/numerical errors thrown by the library. `code()` is a
// stable machine-readable tag; what() carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define ORBITPORT_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}          \
    }

// angle_core
ORBITPORT_DEFINE_ERROR(NonConstantCover);
// portrait
ORBITPORT_DEFINE_ERROR(InvalidPortrait);
ORBITPORT_DEFINE_ERROR(SharedAngle);
// lamination
ORBITPORT_DEFINE_ERROR(NotCriticalArc);
ORBITPORT_DEFINE_ERROR(SizeMismatch);
ORBITPORT_DEFINE_ERROR(CrossingChords);
// poly_seq
ORBITPORT_DEFINE_ERROR(BoundsViolation);
ORBITPORT_DEFINE_ERROR(MonicRequired);
ORBITPORT_DEFINE_ERROR(BranchLoss);
// rays
ORBITPORT_DEFINE_ERROR(NewtonDiverged);
ORBITPORT_DEFINE_ERROR(PrecriticalHit);
ORBITPORT_DEFINE_ERROR(StepTooLarge);
ORBITPORT_DEFINE_ERROR(NonConvergent);
ORBITPORT_DEFINE_ERROR(AmbiguousClustering);
ORBITPORT_DEFINE_ERROR(OnBoundary);
ORBITPORT_DEFINE_ERROR(RealizationFailure);
// verify
ORBITPORT_DEFINE_ERROR(RootSolveFailure);
ORBITPORT_DEFINE_ERROR(EscapingCritical);
ORBITPORT_DEFINE_ERROR(BisectionFailure);
ORBITPORT_DEFINE_ERROR(AngleSearchFailure);
// catalog
ORBITPORT_DEFINE_ERROR(UnknownId);
// formats / cli
ORBITPORT_DEFINE_ERROR(ParseError);

#undef ORBITPORT_DEFINE_ERROR

} // namespace orbitport
