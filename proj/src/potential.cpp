#include "hill/potential.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hill/error.hpp"
#include "json.hpp"

namespace hill {

Potential::Potential(std::map<int, cplx> coeffs) {
    for (const auto& [n, v] : coeffs) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw InvalidArgument("potential coefficient " + std::to_string(n) + " is not finite");
        if (v == cplx{}) continue;
        coeffs_.emplace(n, v);
        terms_.emplace_back(n, v);
        l1_ += std::abs(v);
    }
}

cplx Potential::coeff(int n) const {
    auto it = coeffs_.find(n);
    return it == coeffs_.end() ? cplx{} : it->second;
}

cplx Potential::eval(double x) const {
    cplx sum{};
    for (const auto& [n, v] : terms_) {
        if (n == 0) {
            sum += v;
            continue;
        }
        // Reduce the phase modulo 2*pi through x mod pi so that V(x + pi)
        // reproduces V(x) up to the rounding of a single exponential.
        double xr = std::remainder(x, M_PI);
        sum += v * std::polar(1.0, 2.0 * n * xr);
    }
    return sum;
}

bool Potential::is_constant() const {
    return coeffs_.empty() || (coeffs_.size() == 1 && coeffs_.begin()->first == 0);
}

Potential Potential::shifted(double shift) const {
    std::map<int, cplx> out;
    for (const auto& [n, v] : coeffs_) out.emplace(n, v * std::polar(1.0, 2.0 * n * shift));
    return Potential(std::move(out));
}

Potential model_potential(cplx K) { return Potential({{1, K}}); }

SymmetryFlags classify_symmetry(const Potential& p) {
    SymmetryFlags flags{true, true};
    for (const auto& [n, v] : p.coeffs()) {
        if (v.imag() != 0.0) flags.pt_symmetric = false;
        if (p.coeff(-n) != std::conj(v)) flags.real_valued = false;
    }
    return flags;
}

Potential potential_from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("potential JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("coeffs") || !doc["coeffs"].is_array())
        throw InvalidArgument("potential JSON: expected an object with a \"coeffs\" array");
    std::map<int, cplx> coeffs;
    for (const auto& entry : doc["coeffs"]) {
        if (!entry.is_object() || !entry.contains("n"))
            throw InvalidArgument("potential JSON: every coefficient needs an integer \"n\"");
        const auto& n = entry["n"];
        if (!n.is_number_integer()) throw InvalidArgument("potential JSON: \"n\" must be an integer");
        double re = entry.value("re", 0.0);
        double im = entry.value("im", 0.0);
        coeffs[n.get<int>()] += cplx(re, im);
    }
    return Potential(std::move(coeffs));
}

std::string potential_to_json(const Potential& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [n, v] : p.coeffs()) arr.push_back({{"n", n}, {"re", v.real()}, {"im", v.imag()}});
    return nlohmann::json{{"coeffs", arr}}.dump();
}

cplx parse_complex(std::string_view text) {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.empty()) throw InvalidArgument("empty complex number");
    auto to_double = [&](const std::string& part) {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(part, &used);
        } catch (...) {
            throw InvalidArgument("cannot parse complex number '" + s + "'");
        }
        if (used != part.size()) throw InvalidArgument("cannot parse complex number '" + s + "'");
        return value;
    };
    if (s.back() != 'i') return {to_double(s), 0.0};
    std::string body = s.substr(0, s.size() - 1);
    // Split at the last sign that is not part of an exponent.
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        char c = body[k];
        if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_of = [&](std::string part) {
        if (part.empty() || part == "+") return 1.0;
        if (part == "-") return -1.0;
        return to_double(part);
    };
    if (split == std::string::npos) return {0.0, imag_of(body)};
    return {to_double(body.substr(0, split)), imag_of(body.substr(split))};
}

Potential parse_potential(std::string_view spec) {
    constexpr std::string_view model_prefix = "model:K=";
    if (spec.substr(0, model_prefix.size()) == model_prefix)
        return model_potential(parse_complex(spec.substr(model_prefix.size())));
    if (!spec.empty() && spec.front() == '@') {
        std::ifstream in{std::string(spec.substr(1))};
        if (!in) throw InvalidArgument("cannot open potential file '" + std::string(spec.substr(1)) + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        return potential_from_json(buf.str());
    }
    return potential_from_json(spec);
}

}  // namespace hill
