#include "hehdc/ckks/params.hpp"

#include <numeric>
#include <sstream>

#include "hehdc/errors.hpp"

namespace hehdc::ckks {

unsigned max_chain_bits(unsigned log2n) {
    switch (log2n) {
        case 11: return 54;
        case 12: return 109;
        case 13: return 218;
        case 14: return 438;
        default: throw ParamError("unsupported ring degree 2^" + std::to_string(log2n));
    }
}

void validate(const CkksParams& p) {
    const unsigned budget = max_chain_bits(p.log2n);
    if (p.prime_bits.size() < 2)
        throw ChainTooShort("modulus chain needs at least one ciphertext prime and one key-switching prime");
    unsigned total = 0;
    for (unsigned w : p.prime_bits) {
        if (w < p.log2n + 2 || w > 60)
            throw ParamError("prime width " + std::to_string(w) + " out of range");
        total += w;
    }
    if (total > budget)
        throw SecurityBudgetExceeded("chain width " + std::to_string(total) +
                                     " bits exceeds the " + std::to_string(budget) +
                                     "-bit budget for degree 2^" + std::to_string(p.log2n));
    if (p.scale_log2 == 0 || p.scale_log2 >= p.prime_bits[0])
        throw ParamError("scale 2^" + std::to_string(p.scale_log2) +
                         " must be positive and below the first prime");
}

CkksParams default_params(unsigned log2n) {
    CkksParams p;
    p.log2n = log2n;
    switch (log2n) {
        case 11: p.prime_bits = {27, 27}; p.scale_log2 = 20; break;
        case 12: p.prime_bits = {54, 54}; p.scale_log2 = 30; break;
        case 13: p.prime_bits = {60, 60}; p.scale_log2 = 30; break;
        case 14: p.prime_bits = {60, 60}; p.scale_log2 = 30; break;
        default: throw ParamError("unsupported ring degree 2^" + std::to_string(log2n));
    }
    return p;
}

CkksParams parse_params(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    if (parts.empty() || parts.size() > 3) throw ParamError("malformed parameter string: " + text);

    const auto to_u = [&](const std::string& s) -> unsigned {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            throw ParamError("malformed parameter string: " + text);
        return static_cast<unsigned>(std::stoul(s));
    };

    CkksParams p = default_params(to_u(parts[0]));
    if (parts.size() >= 2 && !parts[1].empty()) {
        p.prime_bits.clear();
        std::stringstream ss(parts[1]);
        std::string item;
        while (std::getline(ss, item, ',')) p.prime_bits.push_back(to_u(item));
        // A custom chain keeps the stock scale unless one is given; clamp it
        // under the new first prime so "13:40,40" style strings stay usable.
        if (parts.size() < 3 && !p.prime_bits.empty() && p.scale_log2 >= p.prime_bits[0])
            p.scale_log2 = p.prime_bits[0] - 7;
    }
    if (parts.size() == 3 && !parts[2].empty()) p.scale_log2 = to_u(parts[2]);
    validate(p);
    return p;
}

std::string format_params(const CkksParams& p) {
    std::string s = std::to_string(p.log2n) + ":";
    for (std::size_t i = 0; i < p.prime_bits.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(p.prime_bits[i]);
    }
    s += ":" + std::to_string(p.scale_log2);
    return s;
}

}  // namespace hehdc::ckks
