#pragma once

#include <stdexcept>
#include <string>

namespace orlicz {

/// Base of every error raised by the library. The code is module-qualified,
/// e.g. "phi_solver.nonconvergence", and is what the CLI writes to error.json.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    [[nodiscard]] const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define ORLICZ_DEFINE_ERROR(Name, suffix)                                  \
    class Name : public Error {                                           \
    public:                                                               \
        Name(const std::string& module, const std::string& message)       \
            : Error(module + "." suffix, message) {}                      \
    };

ORLICZ_DEFINE_ERROR(ArgumentError, "argument")
ORLICZ_DEFINE_ERROR(ValidationError, "validation")
ORLICZ_DEFINE_ERROR(RangeError, "range")
ORLICZ_DEFINE_ERROR(DomainError, "domain")
ORLICZ_DEFINE_ERROR(PreconditionError, "precondition")
ORLICZ_DEFINE_ERROR(UnsupportedError, "unsupported")
ORLICZ_DEFINE_ERROR(ResourceError, "resource")
ORLICZ_DEFINE_ERROR(InternalError, "internal")
ORLICZ_DEFINE_ERROR(ParseError, "parse")

#undef ORLICZ_DEFINE_ERROR

}  // namespace orlicz
