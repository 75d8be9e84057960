#pragma once

#include <stdexcept>
#include <string>

namespace mchit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotIrreducible : Error {
    using Error::Error;
};

struct SolverFailure : Error {
    using Error::Error;
};

struct ParamOutOfRange : Error {
    using Error::Error;
};

struct NotReversible : Error {
    using Error::Error;
};

struct NotBirthDeath : Error {
    using Error::Error;
};

struct CurveTooShort : Error {
    using Error::Error;
};

struct InsufficientGrid : Error {
    using Error::Error;
};

struct SmallnessViolated : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace mchit
