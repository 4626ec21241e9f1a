#include "kvstar/rational.hpp"

#include <cctype>
#include <mutex>
#include <vector>

namespace kvstar {

Rational parse_rational(std::string_view text)
{
    std::string s;
    s.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i)
    {
        // U+2212 MINUS SIGN is E2 88 92 in UTF-8
        if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
            static_cast<unsigned char>(text[i + 1]) == 0x88 &&
            static_cast<unsigned char>(text[i + 2]) == 0x92)
        {
            s.push_back('-');
            i += 2;
            continue;
        }
        if (!std::isspace(static_cast<unsigned char>(text[i])))
            s.push_back(text[i]);
    }
    if (s.empty())
        throw ParseError("empty rational literal");
    std::size_t pos = 0;
    if (s[0] == '-' || s[0] == '+')
        pos = 1;
    bool seen_slash = false;
    bool digit_before = false, digit_after = false;
    for (std::size_t i = pos; i < s.size(); ++i)
    {
        char c = s[i];
        if (c == '/' && !seen_slash)
            seen_slash = true;
        else if (std::isdigit(static_cast<unsigned char>(c)))
            (seen_slash ? digit_after : digit_before) = true;
        else
            throw ParseError("invalid rational literal '" + std::string(text) + "'");
    }
    if (!digit_before || (seen_slash && !digit_after))
        throw ParseError("invalid rational literal '" + std::string(text) + "'");
    if (s[0] == '+')
        s.erase(0, 1);
    Rational q;
    if (q.set_str(s, 10) != 0)
        throw ParseError("invalid rational literal '" + std::string(text) + "'");
    if (q.get_den() == 0)
        throw ParseError("zero denominator in '" + std::string(text) + "'");
    q.canonicalize();
    return q;
}

std::string to_string(Rational const& q)
{
    return q.get_str(10);
}

Rational factorial(unsigned n)
{
    Integer r = 1;
    for (unsigned i = 2; i <= n; ++i)
        r *= i;
    return Rational(r);
}

Rational bernoulli(unsigned n)
{
    static std::mutex mutex;
    static std::vector<Rational> table{Rational(1)};
    std::lock_guard lock(mutex);
    // sum_{k=0}^{m} C(m+1,k) B_k = 0
    while (table.size() <= n)
    {
        unsigned m = static_cast<unsigned>(table.size());
        Rational acc = 0;
        Integer binom = 1;
        for (unsigned k = 0; k < m; ++k)
        {
            acc += Rational(binom) * table[k];
            binom = binom * (m + 1 - k) / (k + 1);
        }
        Rational b = -acc / Rational(m + 1);
        b.canonicalize();
        table.push_back(b);
    }
    return table[n];
}

} // namespace kvstar
