#include "operstokes/rational.hpp"

#include <cctype>

namespace operstokes {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char ch : s)
        if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    return true;
}

}  // namespace

BigRational parse_rational(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    const std::string original(text);
    if (s.empty()) throw std::invalid_argument("empty rational literal");

    bool neg = false;
    if (s.front() == '+' || s.front() == '-') {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }

    BigRational q;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        auto num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw std::invalid_argument("malformed rational '" + original + "'");
        BigInteger d(std::string(den), 10);
        if (d == 0) throw std::domain_error("rational with zero denominator: '" + original + "'");
        q = BigRational(BigInteger(std::string(num), 10), d);
    } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
        auto ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) ||
            (!fp.empty() && !all_digits(fp)))
            throw std::invalid_argument("malformed decimal '" + original + "'");
        BigInteger scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
        BigInteger num(std::string(ip.empty() ? "0" : ip) + std::string(fp), 10);
        q = BigRational(num, scale);
    } else {
        if (!all_digits(s)) throw std::invalid_argument("malformed rational '" + original + "'");
        q = BigRational(BigInteger(std::string(s), 10));
    }
    q.canonicalize();
    return neg ? BigRational(-q) : q;
}

std::string to_fraction_string(const BigRational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace operstokes
