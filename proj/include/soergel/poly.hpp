#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "soergel/monomial.hpp"
#include "soergel/scalar.hpp"

namespace soergel {

// Sparse multivariate polynomial over K, leading term first (graded lex).
// Zero coefficients are never stored. Variables x1, x2, ... carry degree 2
// in the diagrammatic grading; total_degree counts exponents, graded_degree
// doubles them.
template <class K>
class Poly {
  public:
    using Terms = std::map<Monomial, K, std::greater<Monomial>>;

    Poly() = default;
    explicit Poly(K c) {
        if (!RingTraits<K>::is_zero(c)) terms_[Monomial{}] = std::move(c);
    }
    Poly(Monomial m, K c) {
        if (!RingTraits<K>::is_zero(c)) terms_[std::move(m)] = std::move(c);
    }

    static Poly var(unsigned i, K one) { return Poly(Monomial::var(i), std::move(one)); }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    const K* coeff(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? nullptr : &it->second;
    }
    K constant_term() const {
        auto it = terms_.find(Monomial{});
        return it == terms_.end() ? RingTraits<K>::zero() : it->second;
    }

    void add_term(const Monomial& m, const K& c) {
        if (RingTraits<K>::is_zero(c)) return;
        auto [it, fresh] = terms_.try_emplace(m, c);
        if (!fresh) {
            it->second = it->second + c;
            if (RingTraits<K>::is_zero(it->second)) terms_.erase(it);
        }
    }

    Poly& operator+=(const Poly& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    Poly operator-() const {
        Poly r;
        for (const auto& [m, c] : terms_) r.terms_[m] = -c;
        return r;
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
        return r;
    }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    Poly scaled(const K& c) const {
        Poly r;
        if (RingTraits<K>::is_zero(c)) return r;
        for (const auto& [m, k] : terms_) {
            K v = k * c;
            if (!RingTraits<K>::is_zero(v)) r.terms_[m] = std::move(v);
        }
        return r;
    }

    friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }
    // arbitrary total order for use as map key
    friend bool operator<(const Poly& a, const Poly& b) {
        auto ia = a.terms_.begin(), ib = b.terms_.begin();
        for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
            if (ia->first != ib->first) return std::greater<Monomial>{}(ib->first, ia->first);
            if (!(ia->second == ib->second))
                return RingTraits<K>::str(ia->second) < RingTraits<K>::str(ib->second);
        }
        return ib != b.terms_.end();
    }

    // exponent-count degree of the leading term; empty for 0
    std::optional<unsigned> total_degree() const {
        if (terms_.empty()) return std::nullopt;
        return terms_.begin()->first.total_degree();
    }
    std::optional<int> graded_degree() const {
        auto d = total_degree();
        if (!d) return std::nullopt;
        return 2 * static_cast<int>(*d);
    }
    bool is_homogeneous() const {
        if (terms_.empty()) return true;
        unsigned d = terms_.begin()->first.total_degree();
        for (const auto& [m, c] : terms_)
            if (m.total_degree() != d) return false;
        return true;
    }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
    }
    unsigned max_var() const {
        std::size_t n = 0;
        for (const auto& [m, c] : terms_) n = std::max(n, m.e.size());
        return static_cast<unsigned>(n);
    }

    // Simultaneous substitution x_i -> images[i-1]; variables past the end of
    // images are kept. This is the ring hom extending the assignment.
    Poly substitute(const std::vector<Poly>& images, const K& one) const {
        Poly r;
        for (const auto& [m, c] : terms_) {
            Poly t{c};
            for (std::size_t i = 0; i < m.e.size(); ++i) {
                if (m.e[i] == 0) continue;
                Poly base = i < images.size() ? images[i] : Poly(Monomial::var(static_cast<unsigned>(i + 1)), one);
                for (unsigned k = 0; k < m.e[i]; ++k) t *= base;
            }
            r += t;
        }
        return r;
    }

    // Division with remainder by a single divisor, standard multivariate
    // reduction on leading terms. Over Int a step only fires when the
    // coefficient divides exactly, so rem can be nonzero even when a true
    // quotient exists over Q; all uses divide by monic-up-to-unit linear
    // forms where this does not occur.
    struct DivResult {
        Poly quot, rem;
        bool exact = false;
    };
    friend DivResult divide(const Poly& num, const Poly& den) {
        SOERGEL_REQUIRE(!den.is_zero(), "Poly: division by zero polynomial");
        DivResult res;
        Poly cur = num;
        const auto& [dm, dc] = *den.terms_.begin();
        while (!cur.is_zero()) {
            bool moved = false;
            for (const auto& [m, c] : cur.terms_) {
                Monomial q;
                if (!Monomial::try_divide(m, dm, q)) continue;
                if (!RingTraits<K>::divides(dc, c)) continue;
                K qc = RingTraits<K>::div(c, dc);
                res.quot.add_term(q, qc);
                cur -= den * Poly(q, qc);
                moved = true;
                break;
            }
            if (!moved) break;
        }
        res.rem = cur;
        res.exact = cur.is_zero();
        return res;
    }

    std::size_t hash() const {
        std::size_t h = 0x9e3779b97f4a7c15ULL;
        for (const auto& [m, c] : terms_) {
            hash_mix(h, m.hash());
            hash_mix(h, RingTraits<K>::hash(c));
        }
        return h;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            K a = c;
            bool neg = RingTraits<K>::is_neg(a);
            if (neg) a = -a;
            if (first) {
                if (neg) out += "-";
                first = false;
            } else {
                out += neg ? " - " : " + ";
            }
            std::string cs = RingTraits<K>::str(a);
            if (m.is_one()) {
                out += cs;
            } else {
                if (cs != "1") {
                    out += cs;
                    out += "*";
                }
                bool firstv = true;
                for (std::size_t i = 0; i < m.e.size(); ++i) {
                    if (m.e[i] == 0) continue;
                    if (!firstv) out += "*";
                    firstv = false;
                    out += "x" + std::to_string(i + 1);
                    if (m.e[i] > 1) out += "^" + std::to_string(m.e[i]);
                }
            }
        }
        return out;
    }

  private:
    Terms terms_;
};

template <class K>
std::ostream& operator<<(std::ostream& os, const Poly<K>& p) { return os << p.str(); }

template <class K>
Poly<K> exact_div(const Poly<K>& f, const Poly<K>& g) {
    auto r = divide(f, g);
    SOERGEL_REQUIRE(r.exact, "not divisible: (", f.str(), ") / (", g.str(),
                    "), remainder ", r.rem.str());
    return r.quot;
}

// Recursive descent for "x1^2*x2 - 3*x3" with parentheses allowed.
template <class K>
class PolyParser {
  public:
    PolyParser(std::string_view s, RingCtx<K> ctx) : s_(s), ctx_(ctx) {}

    Poly<K> parse() {
        Poly<K> p = sum();
        skip_ws();
        SOERGEL_REQUIRE(pos_ == s_.size(), "poly parse: trailing input at '", rest(), "'");
        return p;
    }

  private:
    std::string_view s_;
    std::size_t pos_ = 0;
    RingCtx<K> ctx_;

    std::string rest() const { return std::string(s_.substr(pos_, 24)); }
    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    std::uint64_t integer() {
        skip_ws();
        SOERGEL_REQUIRE(pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_]),
                        "poly parse: expected number at '", rest(), "'");
        std::uint64_t v = 0;
        while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) {
            v = v * 10 + (s_[pos_] - '0');
            SOERGEL_REQUIRE(v < (1ULL << 62), "poly parse: literal too large");
            ++pos_;
        }
        return v;
    }

    Poly<K> sum() {
        bool neg = false;
        skip_ws();
        if (eat('-')) neg = true;
        else eat('+');
        Poly<K> acc = product();
        if (neg) acc = -acc;
        for (;;) {
            skip_ws();
            if (eat('+')) acc += product();
            else if (eat('-')) acc -= product();
            else return acc;
        }
    }

    Poly<K> product() {
        Poly<K> acc = power();
        for (;;) {
            skip_ws();
            if (eat('*')) acc *= power();
            else return acc;
        }
    }

    Poly<K> power() {
        Poly<K> base = atom();
        if (eat('^')) {
            std::uint64_t e = integer();
            SOERGEL_REQUIRE(e <= 0xffff, "poly parse: exponent too large");
            Poly<K> r{ctx_.one()};
            for (std::uint64_t i = 0; i < e; ++i) r *= base;
            return r;
        }
        return base;
    }

    Poly<K> atom() {
        skip_ws();
        if (eat('(')) {
            Poly<K> p = sum();
            SOERGEL_REQUIRE(eat(')'), "poly parse: expected ')' at '", rest(), "'");
            return p;
        }
        SOERGEL_REQUIRE(pos_ < s_.size(), "poly parse: unexpected end of input");
        char c = s_[pos_];
        if (c == 'x') {
            ++pos_;
            std::uint64_t i = integer();
            SOERGEL_REQUIRE(i >= 1 && i <= 0xffff, "poly parse: bad variable index ", i);
            return Poly<K>(Monomial::var(static_cast<unsigned>(i)), ctx_.one());
        }
        if (std::isdigit((unsigned char)c)) return Poly<K>{ctx_.from_int(static_cast<std::int64_t>(integer()))};
        SOERGEL_REQUIRE(false, "poly parse: unexpected character at '", rest(), "'");
        return {};
    }
};

template <class K>
Poly<K> parse_poly(std::string_view s, RingCtx<K> ctx = {}) {
    return PolyParser<K>(s, ctx).parse();
}

} // namespace soergel
