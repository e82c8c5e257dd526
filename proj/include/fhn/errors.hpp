#pragma once

#include <stdexcept>
#include <string>

namespace fhn {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error
{
  public:
    using Error::Error;
};

// Parameters are valid but belong to the wrong wave regime for the request.
class RegimeError : public Error
{
  public:
    using Error::Error;
};

class DomainError : public Error
{
  public:
    using Error::Error;
};

class ConvergenceError : public Error
{
  public:
    using Error::Error;
};

class IoError : public Error
{
  public:
    using Error::Error;
};

}  // namespace fhn
