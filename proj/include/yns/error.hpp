#pragma once

#include <stdexcept>
#include <string>

namespace yns {

// Base of every failure the library reports. `kind()` is the stable,
// machine-readable tag the CLI writes into error.json.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define YNS_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(#Name, what) {}      \
    }

YNS_DEFINE_ERROR(ValidationError);
YNS_DEFINE_ERROR(BranchError);
YNS_DEFINE_ERROR(RegimeError);
YNS_DEFINE_ERROR(ScanError);
YNS_DEFINE_ERROR(ResolutionError);
YNS_DEFINE_ERROR(VacuumError);
YNS_DEFINE_ERROR(CflError);
YNS_DEFINE_ERROR(RangeError);
YNS_DEFINE_ERROR(MeanError);
YNS_DEFINE_ERROR(QuadratureError);
YNS_DEFINE_ERROR(WindowError);
YNS_DEFINE_ERROR(NoEscapeError);
YNS_DEFINE_ERROR(FormatError);

#undef YNS_DEFINE_ERROR

}  // namespace yns
