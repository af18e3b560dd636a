#pragma once

#include <stdexcept>
#include <string>

namespace rydsqz
{

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error
{
public:
    using Error::Error;
};

// State vector not normalized within tolerance.
class InvalidState : public Error
{
public:
    using Error::Error;
};

class StepSizeError : public Error
{
public:
    using Error::Error;
};

class IntegrationFailure : public Error
{
public:
    using Error::Error;
};

class AmbiguousBranch : public Error
{
public:
    using Error::Error;
};

class UnreliableFit : public Error
{
public:
    using Error::Error;
};

} // namespace rydsqz
