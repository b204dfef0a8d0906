#pragma once

#include <stdexcept>
#include <string>

namespace loglattice {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed structurally invalid input (mismatched variable counts, bad indices).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A lattice or complex needed exponents below the window floor.
class WindowOverflow : public Error {
public:
    using Error::Error;
};

/// d∘d was not zero. `degree` is the source degree of the first composite that failed.
class NotAComplex : public Error {
public:
    NotAComplex(int degree, const std::string& what)
        : Error(what), degree_(degree) {}
    int degree() const { return degree_; }

private:
    int degree_;
};

/// Local data outside the supported unramified shape.
class RamifiedInput : public Error {
public:
    using Error::Error;
};

/// A stabilisation loop hit its iteration cap.
class NotStabilized : public Error {
public:
    using Error::Error;
};

/// A linear-algebra block exceeded the configured dimension cap.
class DimensionCap : public Error {
public:
    using Error::Error;
};

}  // namespace loglattice
