#include "kvstar/freelie.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <cctype>
#include <mutex>
#include <sstream>

namespace kvstar::freelie {

bool is_lyndon(Word const& w)
{
    if (w.empty())
        return false;
    for (std::size_t i = 1; i < w.size(); ++i)
    {
        // w must be strictly smaller than each proper suffix
        if (!std::lexicographical_compare(w.begin(), w.end(), w.begin() + i, w.end()))
            return false;
    }
    return true;
}

std::vector<Word> lyndon_words(unsigned num_generators, unsigned degree)
{
    std::vector<Word> out;
    if (num_generators == 0 || degree == 0)
        return out;
    // Duval's generator, all Lyndon words of length <= degree in lexicographic order
    std::vector<int> w{-1};
    while (!w.empty())
    {
        ++w.back();
        std::size_t m = w.size();
        if (m == degree)
            out.emplace_back(w.begin(), w.end());
        while (w.size() < degree)
            w.push_back(w[w.size() - m]);
        while (!w.empty() && w.back() == static_cast<int>(num_generators) - 1)
            w.pop_back();
    }
    return out;
}

namespace {

int moebius(unsigned n)
{
    int mu = 1;
    for (unsigned p = 2; p * p <= n; ++p)
    {
        if (n % p == 0)
        {
            n /= p;
            if (n % p == 0)
                return 0;
            mu = -mu;
        }
    }
    if (n > 1)
        mu = -mu;
    return mu;
}

} // namespace

std::size_t witt_dimension(unsigned num_generators, unsigned degree)
{
    Integer acc = 0;
    for (unsigned d = 1; d <= degree; ++d)
    {
        if (degree % d != 0)
            continue;
        Integer power;
        mpz_ui_pow_ui(power.get_mpz_t(), num_generators, degree / d);
        acc += moebius(d) * power;
    }
    return Integer(acc / degree).get_ui();
}

std::pair<Word, Word> standard_factorization(Word const& w)
{
    assert(w.size() >= 2);
    for (std::size_t i = 1; i < w.size(); ++i)
    {
        Word suffix(w.begin() + i, w.end());
        if (is_lyndon(suffix))
            return {Word(w.begin(), w.begin() + i), suffix};
    }
    throw Error("word has no standard factorization");
}

std::string bracket_string(Word const& w)
{
    if (w.size() == 1)
        return "y" + std::to_string(w[0] + 1);
    auto [u, v] = standard_factorization(w);
    return "[" + bracket_string(u) + "," + bracket_string(v) + "]";
}

// ---------------------------------------------------------------------------
// Associative expansion and basis brackets

namespace {

WordPolynomial commutator(WordPolynomial const& a, WordPolynomial const& b)
{
    WordPolynomial r;
    auto accumulate = [&r](Word const& w, Rational const& c) {
        auto [it, inserted] = r.try_emplace(w, c);
        if (!inserted)
        {
            it->second += c;
            if (it->second == 0)
                r.erase(it);
        }
    };
    for (auto const& [wa, ca] : a)
    {
        for (auto const& [wb, cb] : b)
        {
            Word ab = wa;
            ab.insert(ab.end(), wb.begin(), wb.end());
            Word ba = wb;
            ba.insert(ba.end(), wa.begin(), wa.end());
            Rational c = ca * cb;
            accumulate(ab, c);
            accumulate(ba, -c);
        }
    }
    return r;
}

struct BasisCache
{
    std::mutex mutex;
    std::map<Word, WordPolynomial> expansions;
    std::map<std::pair<Word, Word>, std::vector<std::pair<Word, Rational>>> brackets;
};

BasisCache& cache()
{
    static BasisCache instance;
    return instance;
}

WordPolynomial expand_locked(BasisCache& c, Word const& w)
{
    if (auto it = c.expansions.find(w); it != c.expansions.end())
        return it->second;
    WordPolynomial p;
    if (w.size() == 1)
        p.emplace(w, Rational(1));
    else
    {
        auto [u, v] = standard_factorization(w);
        p = commutator(expand_locked(c, u), expand_locked(c, v));
    }
    c.expansions.emplace(w, p);
    return p;
}

// Lyndon coordinates of a homogeneous or mixed Lie polynomial; the smallest word in
// the support of a Lie polynomial is always Lyndon and leads its basis element.
std::vector<std::pair<Word, Rational>> decompose_locked(BasisCache& c, WordPolynomial p)
{
    std::vector<std::pair<Word, Rational>> out;
    while (!p.empty())
    {
        auto lead = p.begin();
        Word w = lead->first;
        Rational coeff = lead->second;
        if (!is_lyndon(w))
            throw Error("not a Lie polynomial: leading word is not Lyndon");
        for (auto const& [word, value] : expand_locked(c, w))
        {
            auto [it, inserted] = p.try_emplace(word, -coeff * value);
            if (!inserted)
            {
                it->second -= coeff * value;
                if (it->second == 0)
                    p.erase(it);
            }
        }
        out.emplace_back(std::move(w), std::move(coeff));
    }
    return out;
}

std::vector<std::pair<Word, Rational>> const& basis_bracket(Word const& u, Word const& v)
{
    auto& c = cache();
    std::lock_guard lock(c.mutex);
    auto key = std::make_pair(u, v);
    if (auto it = c.brackets.find(key); it != c.brackets.end())
        return it->second;
    std::vector<std::pair<Word, Rational>> result;
    if (u != v)
        result = decompose_locked(c, commutator(expand_locked(c, u), expand_locked(c, v)));
    return c.brackets.emplace(std::move(key), std::move(result)).first->second;
}

} // namespace

WordPolynomial expand_basis(Word const& lyndon_word)
{
    auto& c = cache();
    std::lock_guard lock(c.mutex);
    return expand_locked(c, lyndon_word);
}

WordPolynomial to_associative(FreeLieSeries const& s)
{
    WordPolynomial r;
    for (auto const& [w, c] : s.terms())
    {
        for (auto const& [word, value] : expand_basis(w))
        {
            auto [it, inserted] = r.try_emplace(word, c * value);
            if (!inserted)
            {
                it->second += c * value;
                if (it->second == 0)
                    r.erase(it);
            }
        }
    }
    return r;
}

FreeLieSeries from_associative(WordPolynomial p, int truncation)
{
    std::vector<std::pair<Word, Rational>> coords;
    {
        auto& c = cache();
        std::lock_guard lock(c.mutex);
        coords = decompose_locked(c, std::move(p));
    }
    FreeLieSeries s(truncation);
    for (auto const& [w, c] : coords)
        s.add_term(w, c);
    return s;
}

// ---------------------------------------------------------------------------
// FreeLieSeries

FreeLieSeries FreeLieSeries::generator(unsigned index, int truncation)
{
    return basis(Word{static_cast<std::uint8_t>(index)}, truncation);
}

FreeLieSeries FreeLieSeries::basis(Word const& lyndon_word, int truncation, Rational const& c)
{
    assert(is_lyndon(lyndon_word));
    FreeLieSeries s(truncation);
    s.add_term(lyndon_word, c);
    return s;
}

Rational FreeLieSeries::coefficient(Word const& w) const
{
    auto it = terms_.find(w);
    return it == terms_.end() ? Rational(0) : it->second;
}

int FreeLieSeries::min_degree() const
{
    return terms_.empty() ? 0 : static_cast<int>(terms_.begin()->first.size());
}

int FreeLieSeries::max_degree() const
{
    return terms_.empty() ? 0 : static_cast<int>(terms_.rbegin()->first.size());
}

FreeLieSeries FreeLieSeries::homogeneous_part(int degree) const
{
    FreeLieSeries r(truncation_);
    for (auto const& [w, c] : terms_)
        if (static_cast<int>(w.size()) == degree)
            r.terms_.emplace(w, c);
    return r;
}

FreeLieSeries FreeLieSeries::truncated(int degree) const
{
    FreeLieSeries r(std::min(truncation_, degree));
    for (auto const& [w, c] : terms_)
        if (static_cast<int>(w.size()) <= r.truncation_)
            r.terms_.emplace(w, c);
    return r;
}

void FreeLieSeries::add_term(Word const& w, Rational const& c)
{
    if (c == 0 || static_cast<int>(w.size()) > truncation_)
        return;
    auto [it, inserted] = terms_.try_emplace(w, c);
    if (!inserted)
    {
        it->second += c;
        if (it->second == 0)
            terms_.erase(it);
    }
}

FreeLieSeries& FreeLieSeries::operator+=(FreeLieSeries const& other)
{
    truncation_ = std::min(truncation_, other.truncation_);
    for (auto it = terms_.begin(); it != terms_.end();)
        it = static_cast<int>(it->first.size()) > truncation_ ? terms_.erase(it) : std::next(it);
    for (auto const& [w, c] : other.terms_)
        add_term(w, c);
    return *this;
}

FreeLieSeries& FreeLieSeries::operator-=(FreeLieSeries const& other)
{
    return *this += -other;
}

FreeLieSeries& FreeLieSeries::operator*=(Rational const& c)
{
    if (c == 0)
        terms_.clear();
    for (auto& [w, v] : terms_)
        v *= c;
    return *this;
}

FreeLieSeries operator+(FreeLieSeries a, FreeLieSeries const& b)
{
    a += b;
    return a;
}

FreeLieSeries operator-(FreeLieSeries a, FreeLieSeries const& b)
{
    a -= b;
    return a;
}

FreeLieSeries operator-(FreeLieSeries a)
{
    a *= Rational(-1);
    return a;
}

FreeLieSeries operator*(Rational const& c, FreeLieSeries a)
{
    a *= c;
    return a;
}

FreeLieSeries bracket(FreeLieSeries const& a, FreeLieSeries const& b)
{
    FreeLieSeries r(std::min(a.truncation(), b.truncation()));
    for (auto const& [wa, ca] : a.terms())
    {
        for (auto const& [wb, cb] : b.terms())
        {
            if (static_cast<int>(wa.size() + wb.size()) > r.truncation())
                break; // b's terms are sorted by degree
            if (wa == wb)
                continue;
            Rational c = ca * cb;
            if (wa < wb)
                for (auto const& [w, v] : basis_bracket(wa, wb))
                    r.add_term(w, c * v);
            else
                for (auto const& [w, v] : basis_bracket(wb, wa))
                    r.add_term(w, -c * v);
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// BCH

namespace {

// Universal Z(y1, y2) = log(e^{y1} e^{y2}) by the Varadarajan recursion
//   (n+1) Z_{n+1} = 1/2 [y1 - y2, Z_n]
//                 + sum_{p>=1, 2p<=n} B_{2p}/(2p)! sum_{k_1+..+k_2p=n} [Z_k1,[..,[Z_k2p, y1+y2]..]]
std::vector<FreeLieSeries> universal_bch_components(int degree)
{
    static std::mutex mutex;
    static std::vector<FreeLieSeries> table; // table[n] = Z_n, table[0] unused
    std::lock_guard lock(mutex);
    if (static_cast<int>(table.size()) > degree && !table.empty() &&
        table.back().truncation() >= degree)
        return std::vector<FreeLieSeries>(table.begin(), table.begin() + degree + 1);

    int const top = std::max(degree, 2);
    auto y1 = FreeLieSeries::generator(0, top);
    auto y2 = FreeLieSeries::generator(1, top);
    std::vector<FreeLieSeries> z(top + 1, FreeLieSeries(top));
    z[1] = y1 + y2;
    auto const diff = y1 - y2;
    auto const sum = y1 + y2;
    for (int n = 1; n < top; ++n)
    {
        FreeLieSeries next = Rational(1, 2) * bracket(diff, z[n]);
        // nested[q][m] = sum over k_1..k_q >= 1 with total m of [Z_k1,[..,[Z_kq, sum]..]]
        std::vector<std::vector<FreeLieSeries>> nested(n + 1,
                                                       std::vector<FreeLieSeries>(n + 1, FreeLieSeries(top)));
        nested[0][0] = sum;
        for (int q = 1; q <= n; ++q)
            for (int m = q; m <= n; ++m)
                for (int k = 1; k <= m - (q - 1); ++k)
                    nested[q][m] += bracket(z[k], nested[q - 1][m - k]);
        for (int p = 1; 2 * p <= n; ++p)
            next += (bernoulli(2 * p) / factorial(2 * p)) * nested[2 * p][n];
        next *= Rational(1, n + 1);
        z[n + 1] = next;
    }
    table = z;
    return std::vector<FreeLieSeries>(table.begin(), table.begin() + degree + 1);
}

} // namespace

FreeLieSeries log_exp_product(FreeLieSeries const& a, FreeLieSeries const& b, int degree)
{
    if (degree <= 0)
        throw Error("log_exp_product: degree must be positive");
    if (a.truncation() < degree || b.truncation() < degree)
        throw Error("log_exp_product: operand truncation below requested degree");
    auto parts = universal_bch_components(degree);
    FreeLieSeries universal(degree);
    for (int n = 1; n <= degree; ++n)
        universal += parts[n];
    std::vector<FreeLieSeries> images{a.truncated(degree), b.truncated(degree)};
    return substitute(universal, images, degree);
}

AdSeries parse_ad_series(std::string_view name)
{
    if (name == "one_minus_exp_neg_ad")
        return AdSeries::one_minus_exp_neg_ad;
    if (name == "exp_ad_minus_one")
        return AdSeries::exp_ad_minus_one;
    throw Error("unknown ad series kind '" + std::string(name) + "'");
}

FreeLieSeries series_of_ad(AdSeries kind, FreeLieSeries const& direction,
                           FreeLieSeries const& target, int degree)
{
    if (degree <= 0)
        throw Error("series_of_ad: degree must be positive");
    FreeLieSeries result(degree);
    FreeLieSeries current = target.truncated(degree);
    auto dir = direction.truncated(degree);
    for (int k = 1; k <= degree; ++k)
    {
        current = bracket(dir, current);
        if (current.is_zero())
            break;
        Rational c = Rational(1) / factorial(k);
        if (kind == AdSeries::one_minus_exp_neg_ad && k % 2 == 0)
            c = -c;
        result += c * current;
    }
    return result;
}

namespace {

template <class Leaf, class Combine>
FreeLieSeries recurse_on_basis(FreeLieSeries const& s, int degree, Leaf leaf, Combine combine)
{
    std::map<Word, FreeLieSeries, GradedLex> memo;
    std::function<FreeLieSeries const&(Word const&)> image = [&](Word const& w) -> FreeLieSeries const& {
        if (auto it = memo.find(w); it != memo.end())
            return it->second;
        FreeLieSeries value(degree);
        if (w.size() == 1)
            value = leaf(w[0]);
        else
        {
            auto [u, v] = standard_factorization(w);
            value = combine(u, v, image(u), image(v));
        }
        return memo.emplace(w, std::move(value)).first->second;
    };
    FreeLieSeries result(std::min(degree, s.truncation()));
    for (auto const& [w, c] : s.terms())
    {
        if (static_cast<int>(w.size()) > result.truncation())
            break;
        result += c * image(w);
    }
    return result;
}

} // namespace

FreeLieSeries apply_derivation(FreeLieSeries const& s, std::span<FreeLieSeries const> images,
                               int degree)
{
    auto leaf = [&](std::uint8_t letter) -> FreeLieSeries {
        if (letter < images.size())
            return images[letter].truncated(degree);
        return FreeLieSeries(degree);
    };
    auto combine = [&](Word const& u, Word const& v, FreeLieSeries const& du, FreeLieSeries const& dv) {
        auto pu = FreeLieSeries::basis(u, degree);
        auto pv = FreeLieSeries::basis(v, degree);
        return bracket(du, pv) + bracket(pu, dv);
    };
    return recurse_on_basis(s, degree, leaf, combine);
}

FreeLieSeries substitute(FreeLieSeries const& s, std::span<FreeLieSeries const> images, int degree)
{
    auto leaf = [&](std::uint8_t letter) -> FreeLieSeries {
        if (letter >= images.size())
            throw Error("substitute: missing image for generator");
        return images[letter].truncated(degree);
    };
    auto combine = [](Word const&, Word const&, FreeLieSeries const& a, FreeLieSeries const& b) {
        return bracket(a, b);
    };
    return recurse_on_basis(s, degree, leaf, combine);
}

FreeLieSeries apply_tangential(TangentialDerivation const& u, FreeLieSeries const& s)
{
    int degree = std::min({s.truncation(), u.u1.truncation(), u.u2.truncation()});
    std::vector<FreeLieSeries> images{bracket(FreeLieSeries::generator(0, degree), u.u1),
                                      bracket(FreeLieSeries::generator(1, degree), u.u2)};
    return apply_derivation(s, images, degree);
}

FreeLieSeries directional_substitute(FreeLieSeries const& s,
                                     std::span<FreeLieSeries const> replacements, int degree)
{
    if (degree <= 0)
        throw Error("directional_substitute: degree must be positive");
    return apply_derivation(s, replacements, degree);
}

FreeLieSeries swap_generators(FreeLieSeries const& s)
{
    int degree = s.truncation();
    std::vector<FreeLieSeries> images{FreeLieSeries::generator(1, degree),
                                      FreeLieSeries::generator(0, degree)};
    return substitute(s, images, degree);
}

// ---------------------------------------------------------------------------
// Text form

std::string to_string(FreeLieSeries const& s)
{
    if (s.is_zero())
        return "0";
    std::ostringstream out;
    bool first = true;
    for (auto const& [w, c] : s.terms())
    {
        Rational mag = abs(c);
        if (first)
            out << (c < 0 ? "-" : "");
        else
            out << (c < 0 ? " - " : " + ");
        first = false;
        if (mag != 1)
            out << kvstar::to_string(mag) << " ";
        out << bracket_string(w);
    }
    return out.str();
}

namespace {

class SeriesParser
{
  public:
    SeriesParser(std::string_view text, int truncation) : text_(text), truncation_(truncation) {}

    FreeLieSeries parse()
    {
        FreeLieSeries total(truncation_);
        skip();
        if (text_.substr(pos_) == "0")
            return total;
        bool first = true;
        while (pos_ < text_.size())
        {
            int sign = 1;
            skip();
            if (peek() == '+' || peek() == '-')
            {
                sign = get() == '-' ? -1 : 1;
                skip();
            }
            else if (!first)
                fail("expected '+' or '-'");
            first = false;
            Rational coeff = 1;
            if (std::isdigit(static_cast<unsigned char>(peek())))
            {
                std::size_t start = pos_;
                while (pos_ < text_.size() &&
                       (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '/'))
                    ++pos_;
                coeff = parse_rational(text_.substr(start, pos_ - start));
                skip();
            }
            total += Rational(sign) * coeff * element();
            skip();
        }
        return total;
    }

  private:
    FreeLieSeries element()
    {
        skip();
        if (peek() == '[')
        {
            get();
            auto a = element();
            skip();
            if (get() != ',')
                fail("expected ','");
            auto b = element();
            skip();
            if (get() != ']')
                fail("expected ']'");
            return bracket(a, b);
        }
        if (peek() == 'y')
        {
            get();
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            if (start == pos_)
                fail("expected generator index");
            int index = std::stoi(std::string(text_.substr(start, pos_ - start)));
            if (index < 1)
                fail("generator index starts at 1");
            return FreeLieSeries::generator(static_cast<unsigned>(index - 1), truncation_);
        }
        fail("expected generator or bracket");
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char get() { return pos_ < text_.size() ? text_[pos_++] : '\0'; }
    void skip()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }
    [[noreturn]] void fail(std::string const& what) const
    {
        throw ParseError("series parse error at " + std::to_string(pos_) + ": " + what);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int truncation_;
};

} // namespace

FreeLieSeries parse_series(std::string_view text, int truncation)
{
    return SeriesParser(text, truncation).parse();
}

} // namespace kvstar::freelie
