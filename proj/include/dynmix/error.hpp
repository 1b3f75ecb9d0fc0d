#pragma once

#include <stdexcept>
#include <string>

namespace dynmix {

// Base of every error thrown by the library. The CLI maps these onto exit
// code 1 (computational failure); UsageError maps onto exit code 2.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Tensor composition with overlapping label sets.
class CompositionError : public Error {
  public:
    using Error::Error;
};

// Unknown, duplicated or mismatched qubit labels.
class LabelError : public Error {
  public:
    using Error::Error;
};

// A state that violates the DensityMatrix / PureStateVector invariants.
class InvalidStateError : public Error {
  public:
    using Error::Error;
};

// Argument outside an operation's documented domain.
class DomainError : public Error {
  public:
    using Error::Error;
};

// Dense-dimension guard of the brute-force oracle.
class CapacityError : public Error {
  public:
    using Error::Error;
};

class IntegrationError : public Error {
  public:
    using Error::Error;
};

// Sampling grid too coarse for the requested diagnostic.
class ResolutionError : public Error {
  public:
    using Error::Error;
};

// Plateau ratio I_f / H_S requested for a (numerically) pure system.
class UndefinedPlateauError : public Error {
  public:
    using Error::Error;
};

class UsageError : public Error {
  public:
    using Error::Error;
};

} // namespace dynmix
