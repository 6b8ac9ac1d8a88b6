#pragma once

#include <complex>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hill {

using cplx = std::complex<double>;

/// A pi-periodic complex potential V(x) = sum_n v_n exp(2inx) with finitely
/// many non-zero coefficients.  Immutable once built.
class Potential {
public:
    Potential() = default;
    explicit Potential(std::map<int, cplx> coeffs);

    /// V(x).
    [[nodiscard]] cplx eval(double x) const;

    [[nodiscard]] const std::map<int, cplx>& coeffs() const { return coeffs_; }
    [[nodiscard]] cplx coeff(int n) const;

    /// sum_n |v_n|, an upper bound for max_x |V(x)|.
    [[nodiscard]] double l1_norm() const { return l1_; }

    /// True when only the n = 0 coefficient may be non-zero.
    [[nodiscard]] bool is_constant() const;
    [[nodiscard]] bool is_zero() const { return coeffs_.empty(); }

    /// The same potential translated: x -> V(x + shift).
    [[nodiscard]] Potential shifted(double shift) const;

    friend bool operator==(const Potential&, const Potential&) = default;

private:
    std::map<int, cplx> coeffs_;  // zero coefficients are dropped
    std::vector<std::pair<int, cplx>> terms_;
    double l1_ = 0.0;
};

/// V(x) = K exp(2ix).
Potential model_potential(cplx K);

struct SymmetryFlags {
    bool real_valued = false;
    bool pt_symmetric = false;  // conj(V(-x)) == V(x)
};

/// Exact coefficient tests: real-valued iff v_{-n} == conj(v_n), PT-symmetric
/// iff every v_n is real.
SymmetryFlags classify_symmetry(const Potential& p);

/// Parses {"coeffs": [{"n": int, "re": float, "im": float}, ...]}.
Potential potential_from_json(std::string_view text);
std::string potential_to_json(const Potential& p);

/// Parses either the JSON form above, "model:K=<re>[+<im>i]", or "@file"
/// naming a file that holds the JSON form.
Potential parse_potential(std::string_view spec);

/// Parses "<re>", "<re>+<im>i", "<re>-<im>i", "<im>i".
cplx parse_complex(std::string_view text);

}  // namespace hill
