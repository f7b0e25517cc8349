// Error type shared by every vcsim module.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vcsim {

enum class ErrorKind {
    sequencing,
    validation,
    out_of_range,
    configuration,
    domain,
    singularity,
    stability,
    insufficient_replicas,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

} // namespace vcsim
