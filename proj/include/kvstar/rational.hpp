#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace kvstar {

using Rational = mpq_class;
using Integer = mpz_class;

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error
{
  public:
    using Error::Error;
};

/// Parses "3", "-2", "1/2" and the Unicode minus sign U+2212. Result is canonical.
Rational parse_rational(std::string_view text);

/// "1/2", "-3", "0".
std::string to_string(Rational const& q);

Rational factorial(unsigned n);

/// Bernoulli numbers with B_1 = -1/2.
Rational bernoulli(unsigned n);

} // namespace kvstar
