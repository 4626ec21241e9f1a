#include "kvstar/polynomial.hpp"

#include <cctype>

namespace kvstar {

namespace {

class Parser
{
  public:
    Parser(std::string_view text, std::size_t nvars) : text_(text), nvars_(nvars) {}

    Polynomial parse()
    {
        auto p = expression();
        skip_space();
        if (pos_ != text_.size())
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return p;
    }

  private:
    [[noreturn]] void fail(std::string const& what) const
    {
        throw ParseError("polynomial parse error at " + std::to_string(pos_) + ": " + what);
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    // '-' or the UTF-8 minus sign
    bool take_minus()
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '-')
        {
            ++pos_;
            return true;
        }
        if (text_.substr(pos_).starts_with("\xE2\x88\x92"))
        {
            pos_ += 3;
            return true;
        }
        return false;
    }

    bool take(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c)
        {
            ++pos_;
            return true;
        }
        return false;
    }

    bool starts_factor()
    {
        skip_space();
        if (pos_ >= text_.size())
            return false;
        char c = text_[pos_];
        return c == '(' || c == 'x' || std::isdigit(static_cast<unsigned char>(c));
    }

    Polynomial expression()
    {
        Polynomial acc = take_minus() ? -term() : term();
        for (;;)
        {
            if (take('+'))
                acc += term();
            else if (take_minus())
                acc -= term();
            else
                return acc;
        }
    }

    Polynomial term()
    {
        Polynomial acc = power();
        for (;;)
        {
            if (take('*'))
                acc = acc * power();
            else if (starts_factor())
                acc = acc * power();
            else
                return acc;
        }
    }

    Polynomial power()
    {
        Polynomial base = primary();
        if (!take('^'))
            return base;
        skip_space();
        auto n = digits();
        if (n.empty())
            fail("expected exponent");
        unsigned long e = std::stoul(n);
        if (e > 64)
            fail("exponent too large");
        Polynomial r = Polynomial::constant(nvars_, Rational(1));
        for (unsigned long k = 0; k < e; ++k)
            r = r * base;
        return r;
    }

    std::string digits()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    Polynomial primary()
    {
        skip_space();
        if (take('('))
        {
            auto p = expression();
            if (!take(')'))
                fail("expected ')'");
            return p;
        }
        if (take_minus())
            return -primary();
        if (pos_ < text_.size() && text_[pos_] == 'x')
        {
            ++pos_;
            auto n = digits();
            if (n.empty())
                fail("expected variable index after 'x'");
            std::size_t k = std::stoul(n);
            if (k >= nvars_)
                fail("variable x" + n + " out of range for dimension " + std::to_string(nvars_));
            return Polynomial::variable(nvars_, k);
        }
        auto num = digits();
        if (num.empty())
            fail(pos_ < text_.size() ? "unexpected '" + std::string(1, text_[pos_]) + "'"
                                     : "unexpected end of input");
        Rational q{Integer(num)};
        if (pos_ < text_.size() && text_[pos_] == '/')
        {
            ++pos_;
            auto den = digits();
            if (den.empty())
                fail("expected denominator");
            Integer d(den);
            if (d == 0)
                fail("zero denominator");
            q /= Rational(d);
        }
        return Polynomial::constant(nvars_, q);
    }

    std::string_view text_;
    std::size_t nvars_;
    std::size_t pos_ = 0;
};

} // namespace

Polynomial parse_polynomial(std::string_view text, std::size_t nvars)
{
    return Parser(text, nvars).parse();
}

} // namespace kvstar
