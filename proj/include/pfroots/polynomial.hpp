#pragma once

#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pfroots {

using Complex = std::complex<double>;

class DimensionError : public std::runtime_error {
public:
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

/// Exponent vector over all variables of the ambient system.
struct Monomial {
    std::vector<int> exponents;

    int degree() const {
        int d = 0;
        for (int e : exponents) d += e;
        return d;
    }
    bool operator==(const Monomial& other) const { return exponents == other.exponents; }
};

struct Term {
    Complex coefficient;
    Monomial monomial;
};

/// Sparse polynomial: nonzero coefficients, distinct monomials.
struct Polynomial {
    std::vector<Term> terms;

    Complex evaluate(const Eigen::VectorXcd& point) const {
        Complex acc = 0.0;
        for (const Term& t : terms) {
            Complex m = t.coefficient;
            for (size_t j = 0; j < t.monomial.exponents.size(); ++j)
                for (int e = 0; e < t.monomial.exponents[j]; ++e) m *= point[long(j)];
            acc += m;
        }
        return acc;
    }

    /// d/dz_j by term-wise differentiation.
    Polynomial derivative(int j) const {
        Polynomial out;
        for (const Term& t : terms) {
            const int e = t.monomial.exponents[j];
            if (e == 0) continue;
            Term d = t;
            d.coefficient *= double(e);
            d.monomial.exponents[j] = e - 1;
            out.terms.push_back(std::move(d));
        }
        return out;
    }
};

/// A square system together with the variable-group split the solver
/// tracks in. For algebraized networks the groups are the V block and the
/// U block; arbitrary splits can be attached for experimentation.
struct PolynomialSystem {
    std::vector<std::string> variables;
    std::vector<Polynomial> polynomials;
    std::vector<std::vector<int>> groups;  // disjoint index sets covering all variables

    int variable_count() const { return int(variables.size()); }
    int equation_count() const { return int(polynomials.size()); }

    double max_coefficient_magnitude() const {
        double m = 0.0;
        for (const auto& p : polynomials)
            for (const auto& t : p.terms) m = std::max(m, std::abs(t.coefficient));
        return m;
    }
};

inline Eigen::VectorXcd evaluate(const PolynomialSystem& sys, const Eigen::VectorXcd& point) {
    if (point.size() != sys.variable_count())
        throw DimensionError("evaluate: point has " + std::to_string(point.size()) +
                             " coordinates, system has " + std::to_string(sys.variable_count()) +
                             " variables");
    Eigen::VectorXcd out(sys.equation_count());
    for (int i = 0; i < sys.equation_count(); ++i) out[i] = sys.polynomials[i].evaluate(point);
    return out;
}

inline Eigen::MatrixXcd jacobian(const PolynomialSystem& sys, const Eigen::VectorXcd& point) {
    if (point.size() != sys.variable_count())
        throw DimensionError("jacobian: dimension mismatch");
    const int n = sys.variable_count();
    Eigen::MatrixXcd jac(sys.equation_count(), n);
    for (int i = 0; i < sys.equation_count(); ++i)
        for (int j = 0; j < n; ++j)
            jac(i, j) = sys.polynomials[i].derivative(j).evaluate(point);
    return jac;
}

namespace detail {

inline std::string format_complex(Complex c) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << c.real();
    if (c.imag() >= 0)
        os << "+" << c.imag() << "*I)";
    else
        os << "-" << -c.imag() << "*I)";
    return os.str();
}

}  // namespace detail

/// Debug dump in Bertini input syntax: variable_group declarations, a
/// function list, one equation per line. Useful for cross-checking a
/// system against external path trackers.
inline std::string dump_bertini(const PolynomialSystem& sys) {
    std::ostringstream os;
    for (const auto& group : sys.groups) {
        os << "variable_group ";
        for (size_t j = 0; j < group.size(); ++j)
            os << (j ? ", " : "") << sys.variables[size_t(group[j])];
        os << ";\n";
    }
    os << "function ";
    for (int i = 0; i < sys.equation_count(); ++i) os << (i ? ", " : "") << "f" << i + 1;
    os << ";\n";
    for (int i = 0; i < sys.equation_count(); ++i) {
        os << "f" << i + 1 << " = ";
        const auto& terms = sys.polynomials[i].terms;
        if (terms.empty()) os << "0";
        for (size_t t = 0; t < terms.size(); ++t) {
            if (t) os << " + ";
            os << detail::format_complex(terms[t].coefficient);
            for (size_t j = 0; j < terms[t].monomial.exponents.size(); ++j)
                for (int e = 0; e < terms[t].monomial.exponents[j]; ++e)
                    os << "*" << sys.variables[j];
        }
        os << ";\n";
    }
    return os.str();
}

}  // namespace pfroots
