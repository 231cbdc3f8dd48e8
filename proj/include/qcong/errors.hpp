#pragma once

#include <stdexcept>
#include <string>

namespace qcong {

/// Base of every error raised by the engine. A failed congruence is a
/// verdict, never an exception; exceptions signal misuse or impossible input.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotDivisible : public Error { using Error::Error; };
class DivByZero : public Error { using Error::Error; };
class ZeroAtPole : public Error { using Error::Error; };
class InvalidIndex : public Error { using Error::Error; };
class OutOfRange : public Error { using Error::Error; };
class NegativeValuation : public Error { using Error::Error; };
class NonPositiveExponent : public Error { using Error::Error; };
class NonUnitDenominator : public Error { using Error::Error; };
class WrongResidueClass : public Error { using Error::Error; };
class NotPrime : public Error { using Error::Error; };
class InsufficientSamples : public Error { using Error::Error; };
class ParameterPole : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

} // namespace qcong
