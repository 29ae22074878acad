#pragma once

#include <stdexcept>
#include <string>

namespace pohozaev {

// Error taxonomy. Every failure mode exposed by the library carries a stable
// machine-readable kind string; CLI layers map kinds onto exit codes.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define POHOZAEV_DEFINE_ERROR(ClassName, kind_literal)                        \
    class ClassName : public Error {                                          \
    public:                                                                   \
        explicit ClassName(const std::string& what)                           \
            : Error(kind_literal, what) {}                                    \
    }

POHOZAEV_DEFINE_ERROR(InvalidArgumentError, "invalid-argument");
POHOZAEV_DEFINE_ERROR(ResolutionLossError, "resolution-loss");
POHOZAEV_DEFINE_ERROR(DegenerateInputError, "degenerate-input");
POHOZAEV_DEFINE_ERROR(ProjectionUnavailableError, "projection-unavailable");
POHOZAEV_DEFINE_ERROR(EmptyManifoldError, "empty-manifold");
POHOZAEV_DEFINE_ERROR(ConcentrationDiagnosedError, "concentration-diagnosed");
POHOZAEV_DEFINE_ERROR(UnsupportedRegimeError, "unsupported-regime");
POHOZAEV_DEFINE_ERROR(InsufficientTailError, "insufficient-tail");
POHOZAEV_DEFINE_ERROR(InsufficientDataError, "insufficient-data");
POHOZAEV_DEFINE_ERROR(CertificateUnavailableError, "certificate-unavailable");
POHOZAEV_DEFINE_ERROR(DivisionHazardError, "division-hazard");
POHOZAEV_DEFINE_ERROR(InvalidRegimeError, "invalid-regime");
POHOZAEV_DEFINE_ERROR(NumericError, "numeric");

#undef POHOZAEV_DEFINE_ERROR

}  // namespace pohozaev
