#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "cslab/carrier.hpp"
#include "cslab/core.hpp"
#include "cslab/linalg.hpp"

namespace cslab {

// ---------------------------------------------------------------------------
// Character: a multiplicative function together with its null ideal I_chi.
// ---------------------------------------------------------------------------

class Character {
public:
    enum class Kind {
        Zero,   // identically 0 (multiplicative, I undefined/full)
        Table,  // finite carrier, explicit values
        Exp,    // rat-add: chi(x) = exp(b . x), I empty
        Power,  // nonneg-real-mul: chi(x) = x^s for x > 0, chi(0) = 0, I = {0}
        Ones,   // identically 1, I empty
    };

    static Character zero(CarrierPtr c) { return Character(std::move(c), Kind::Zero); }

    static Character ones(CarrierPtr c) { return Character(std::move(c), Kind::Ones); }

    static Character table(CarrierPtr c, std::vector<cx> values) {
        if (!c->is_finite()) throw Error("table character needs a finite carrier");
        if (values.size() != c->size())
            throw Error("table character needs one value per element");
        Character ch(std::move(c), Kind::Table);
        ch.values_ = std::move(values);
        return ch;
    }

    static Character exp(CarrierPtr c, std::vector<cx> b) {
        if (c->kind() != CarrierKind::RatAdd)
            throw Error("exp character lives on a rat-add carrier");
        if (static_cast<int>(b.size()) != c->dim())
            throw Error("exp character parameter has wrong dimension");
        Character ch(std::move(c), Kind::Exp);
        ch.b_ = std::move(b);
        return ch;
    }

    static Character power(CarrierPtr c, cx s) {
        if (c->kind() != CarrierKind::NonnegRealMul)
            throw Error("power character lives on the nonneg-real-mul carrier");
        Character ch(std::move(c), Kind::Power);
        ch.s_ = s;
        return ch;
    }

    const CarrierPtr& carrier() const { return carrier_; }
    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::Zero; }
    const std::vector<cx>& b() const { return b_; }
    cx s() const { return s_; }
    const std::vector<cx>& values() const { return values_; }

    cx operator()(const Element& x) const {
        switch (kind_) {
            case Kind::Zero:
                return 0.0;
            case Kind::Ones:
                return 1.0;
            case Kind::Table:
                return values_[x.index()];
            case Kind::Exp: {
                cx e = 0.0;
                for (std::size_t i = 0; i < b_.size(); ++i)
                    e += b_[i] * x.vec()[i].to_double();
                return std::exp(e);
            }
            case Kind::Power: {
                double v = x.real();
                if (v <= 0.0) return 0.0;
                return std::exp(s_ * std::log(v));
            }
        }
        return 0.0;
    }

    /// Membership in I_chi = {x : chi(x) = 0}.  Structural, not numeric.
    bool in_null_ideal(const Element& x) const {
        switch (kind_) {
            case Kind::Zero:
                return true;  // degenerate; zero character has no proper ideal
            case Kind::Ones:
            case Kind::Exp:
                return false;
            case Kind::Power:
                return x.real() == 0.0;
            case Kind::Table:
                return std::abs(values_[x.index()]) <= 1e-14;
        }
        return false;
    }

    bool null_ideal_empty_on_window() const {
        for (const auto& w : carrier_->window())
            if (in_null_ideal(w)) return false;
        return true;
    }

    std::string describe() const {
        switch (kind_) {
            case Kind::Zero:
                return "0";
            case Kind::Ones:
                return "1";
            case Kind::Power: {
                std::ostringstream os;
                os << "x^(" << s_.real() << (s_.imag() < 0 ? "-" : "+")
                   << std::abs(s_.imag()) << "i)";
                return os.str();
            }
            case Kind::Exp: {
                std::ostringstream os;
                os << "exp(b.x), b=[";
                for (std::size_t i = 0; i < b_.size(); ++i)
                    os << (i ? "," : "") << b_[i].real()
                       << (b_[i].imag() ? "+i*..." : "");
                os << "]";
                return os.str();
            }
            case Kind::Table:
                return "table";
        }
        return "?";
    }

private:
    Character(CarrierPtr c, Kind k) : carrier_(std::move(c)), kind_(k) {}

    CarrierPtr carrier_;
    Kind kind_;
    std::vector<cx> values_;  // Table
    std::vector<cx> b_;       // Exp
    cx s_{0.0};               // Power
};

// ---------------------------------------------------------------------------
// AdditiveFn: additive on a stated subsemigroup, typically S \ I_chi.
// ---------------------------------------------------------------------------

class AdditiveFn {
public:
    enum class Kind {
        Zero,    // 0 on the whole carrier
        Linear,  // rat-add: a(x) = alpha . x on all of S
        Log,     // nonneg-real-mul: a(x) = alpha * ln x on (0, inf)
        Table,   // finite carrier: explicit values on a flagged domain
    };

    static AdditiveFn zero(CarrierPtr c) { return AdditiveFn(std::move(c), Kind::Zero); }

    static AdditiveFn linear(CarrierPtr c, std::vector<cx> alpha) {
        if (c->kind() != CarrierKind::RatAdd)
            throw Error("linear additive function lives on a rat-add carrier");
        if (static_cast<int>(alpha.size()) != c->dim())
            throw Error("linear additive parameter has wrong dimension");
        AdditiveFn a(std::move(c), Kind::Linear);
        a.alpha_ = std::move(alpha);
        return a;
    }

    static AdditiveFn log(CarrierPtr c, cx alpha) {
        if (c->kind() != CarrierKind::NonnegRealMul)
            throw Error("log additive function lives on the nonneg-real-mul carrier");
        AdditiveFn a(std::move(c), Kind::Log);
        a.alpha_ = {alpha};
        return a;
    }

    static AdditiveFn table(CarrierPtr c, std::vector<cx> values,
                            std::vector<bool> domain) {
        if (!c->is_finite()) throw Error("table additive needs a finite carrier");
        if (values.size() != c->size() || domain.size() != c->size())
            throw Error("table additive needs one value and flag per element");
        AdditiveFn a(std::move(c), Kind::Table);
        a.values_ = std::move(values);
        a.domain_ = std::move(domain);
        return a;
    }

    const CarrierPtr& carrier() const { return carrier_; }
    Kind kind() const { return kind_; }
    const std::vector<cx>& alpha() const { return alpha_; }
    const std::vector<cx>& values() const { return values_; }

    bool in_domain(const Element& x) const {
        switch (kind_) {
            case Kind::Zero:
            case Kind::Linear:
                return true;
            case Kind::Log:
                return x.real() > 0.0;
            case Kind::Table:
                return domain_[x.index()];
        }
        return false;
    }

    cx operator()(const Element& x) const {
        switch (kind_) {
            case Kind::Zero:
                return 0.0;
            case Kind::Linear: {
                cx v = 0.0;
                for (std::size_t i = 0; i < alpha_.size(); ++i)
                    v += alpha_[i] * x.vec()[i].to_double();
                return v;
            }
            case Kind::Log:
                if (x.real() <= 0.0)
                    throw Error("additive log evaluated outside (0, inf)");
                return alpha_[0] * std::log(x.real());
            case Kind::Table:
                if (!domain_[x.index()])
                    throw Error("additive table evaluated outside its domain");
                return values_[x.index()];
        }
        return 0.0;
    }

    bool zero_on_window() const {
        for (const auto& w : carrier_->window())
            if (in_domain(w) && std::abs((*this)(w)) > 1e-12) return false;
        return true;
    }

private:
    AdditiveFn(CarrierPtr c, Kind k) : carrier_(std::move(c)), kind_(k) {}

    CarrierPtr carrier_;
    Kind kind_;
    std::vector<cx> alpha_;
    std::vector<cx> values_;
    std::vector<bool> domain_;
};

// ---------------------------------------------------------------------------
// ComplexFn with an optional closed-form descriptor.
// A descriptor is a sum of terms  coef * chi * a^power  extended by zero on
// I_chi (power in {0,1,2}); every catalog family lives in this span.
// ---------------------------------------------------------------------------

struct FormTerm {
    cx coef;
    Character chi;
    std::optional<AdditiveFn> add;  // required iff power > 0
    int power = 0;

    cx eval(const Element& x) const {
        if (chi.in_null_ideal(x)) return 0.0;
        cx v = coef * chi(x);
        if (power > 0) {
            cx a = (*add)(x);
            v *= a;
            if (power > 1) v *= a;
        }
        return v;
    }
};

using FormSum = std::vector<FormTerm>;

class ComplexFn {
public:
    ComplexFn() = default;

    static ComplexFn from_lambda(CarrierPtr c, std::function<cx(const Element&)> f) {
        ComplexFn fn;
        fn.carrier_ = std::move(c);
        fn.eval_ = std::move(f);
        return fn;
    }

    static ComplexFn from_form(CarrierPtr c, FormSum form) {
        ComplexFn fn;
        fn.carrier_ = std::move(c);
        fn.form_ = std::move(form);
        fn.eval_ = [terms = *fn.form_](const Element& x) {
            cx v = 0.0;
            for (const auto& t : terms) v += t.eval(x);
            return v;
        };
        return fn;
    }

    static ComplexFn constant(CarrierPtr c, cx value) {
        return from_lambda(std::move(c), [value](const Element&) { return value; });
    }

    static ComplexFn table(CarrierPtr c, std::vector<cx> values) {
        if (!c->is_finite() || values.size() != c->size())
            throw Error("table function needs one value per finite element");
        return from_lambda(std::move(c),
                           [values](const Element& x) { return values[x.index()]; });
    }

    bool valid() const { return static_cast<bool>(eval_); }
    const CarrierPtr& carrier() const { return carrier_; }
    const std::optional<FormSum>& form() const { return form_; }

    cx operator()(const Element& x) const { return eval_(x); }

private:
    CarrierPtr carrier_;
    std::function<cx(const Element&)> eval_;
    std::optional<FormSum> form_;
};

/// Extension by zero: chi * phi on S \ I_chi, 0 on I_chi.
inline ComplexFn psi_extend(const Character& chi, const AdditiveFn& phi) {
    if (chi.is_zero()) throw Error("psi extension needs a nonzero character");
    for (const auto& w : chi.carrier()->window())
        if (!chi.in_null_ideal(w) && !phi.in_domain(w))
            throw Error("psi extension: phi undefined at window element " +
                        w.str() + " of S \\ I_chi");
    return ComplexFn::from_form(chi.carrier(), {FormTerm{1.0, chi, phi, 1}});
}

/// Generic phi given as a raw evaluator (assumed defined off the ideal).
inline ComplexFn psi_extend(const Character& chi,
                            std::function<cx(const Element&)> phi) {
    if (chi.is_zero()) throw Error("psi extension needs a nonzero character");
    return ComplexFn::from_lambda(
        chi.carrier(), [chi, phi = std::move(phi)](const Element& x) -> cx {
            if (chi.in_null_ideal(x)) return 0.0;
            return chi(x) * phi(x);
        });
}

// ---------------------------------------------------------------------------
// Window sweeps and structural checks.
// ---------------------------------------------------------------------------

/// Precomputed values of one function on the window and on all ordered
/// window products; every residual sweep works off these tables.
struct WindowTable {
    std::vector<cx> at;
    std::vector<std::vector<cx>> at_prod;
    double max_abs = 0.0;
};

inline WindowTable tabulate(const Carrier& c, const ComplexFn& f) {
    const auto& w = c.window();
    WindowTable t;
    t.at.resize(w.size());
    t.at_prod.assign(w.size(), std::vector<cx>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) {
        t.at[i] = f(w[i]);
        t.max_abs = std::max(t.max_abs, std::abs(t.at[i]));
    }
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j)
            t.at_prod[i][j] = f(c.compose(w[i], w[j]));
    return t;
}

inline double max_abs_on_window(const Carrier& c, const ComplexFn& f) {
    double m = 0.0;
    for (const auto& x : c.window()) m = std::max(m, std::abs(f(x)));
    return m;
}

/// Max multiplicativity defect |chi(xy) - chi(x)chi(y)| over window pairs.
inline double multiplicativity_defect(const Character& chi) {
    const auto& c = *chi.carrier();
    double worst = 0.0;
    for (const auto& x : c.window())
        for (const auto& y : c.window())
            worst = std::max(worst,
                             std::abs(chi(c.compose(x, y)) - chi(x) * chi(y)));
    return worst;
}

/// Max additivity defect |a(xy) - a(x) - a(y)| over window pairs inside the
/// domain.
inline double additivity_defect(const AdditiveFn& a) {
    const auto& c = *a.carrier();
    double worst = 0.0;
    for (const auto& x : c.window()) {
        if (!a.in_domain(x)) continue;
        for (const auto& y : c.window()) {
            if (!a.in_domain(y)) continue;
            Element xy = c.compose(x, y);
            if (!a.in_domain(xy)) continue;
            worst = std::max(worst, std::abs(a(xy) - a(x) - a(y)));
        }
    }
    return worst;
}

/// Checks on the window that I_chi is a two-sided ideal and S \ I_chi a
/// subsemigroup.  Returns a violating pair if any.
inline std::optional<std::pair<Element, Element>> null_ideal_defect(
    const Character& chi) {
    const auto& c = *chi.carrier();
    for (const auto& x : c.window())
        for (const auto& y : c.window()) {
            Element xy = c.compose(x, y);
            bool ix = chi.in_null_ideal(x), iy = chi.in_null_ideal(y);
            bool ixy = chi.in_null_ideal(xy);
            if ((ix || iy) && !ixy) return std::make_pair(x, y);  // not an ideal
            if (!ix && !iy && ixy) return std::make_pair(x, y);   // not a subsemigroup
        }
    return std::nullopt;
}

struct IndependenceResult {
    bool independent = false;
    Element witness_x, witness_y;
    double max_minor = 0.0;
};

/// 2x2-minor test of linear independence over the window.
inline IndependenceResult linear_independence(const ComplexFn& f,
                                              const ComplexFn& h,
                                              double tol = 1e-9) {
    const auto& c = *f.carrier();
    IndependenceResult r;
    double scale = std::max(1.0, max_abs_on_window(c, f) * max_abs_on_window(c, h));
    for (const auto& x : c.window())
        for (const auto& y : c.window()) {
            double m = std::abs(f(x) * h(y) - f(y) * h(x));
            if (m > r.max_minor) {
                r.max_minor = m;
                r.witness_x = x;
                r.witness_y = y;
            }
        }
    r.independent = r.max_minor > tol * scale;
    return r;
}

/// Max residual of the sine addition law f(xy) = f(x)g(y) + g(x)f(y); the
/// membership test for the space S_g.
inline double law_residual_membership(const ComplexFn& f, const ComplexFn& g) {
    const auto& c = *f.carrier();
    WindowTable tf = tabulate(c, f), tg = tabulate(c, g);
    double worst = 0.0;
    for (std::size_t i = 0; i < c.window().size(); ++i)
        for (std::size_t j = 0; j < c.window().size(); ++j)
            worst = std::max(worst, std::abs(tf.at_prod[i][j] - tf.at[i] * tg.at[j] -
                                             tg.at[i] * tf.at[j]));
    return worst;
}

// ---------------------------------------------------------------------------
// Finite enumeration.
// ---------------------------------------------------------------------------

/// Index and period of an element of a finite semigroup: the least k0, p
/// with x^(k0) = x^(k0 + p).
inline std::pair<int, int> index_and_period(const Carrier& c, int x) {
    std::vector<int> seen;
    int cur = x;
    for (;;) {
        auto it = std::find(seen.begin(), seen.end(), cur);
        if (it != seen.end()) {
            int k0 = static_cast<int>(it - seen.begin());
            return {k0 + 1, static_cast<int>(seen.size()) - k0};
        }
        seen.push_back(cur);
        cur = c.table()[cur][x];
    }
}

/// Complete list of multiplicative functions on a finite carrier, the zero
/// function included.  Backtracking over per-element candidate sets {0} and
/// the p-th roots of unity, where p is the element's period.
inline std::vector<Character> enumerate_characters(const CarrierPtr& cp,
                                                   double tol = 1e-9) {
    const Carrier& c = *cp;
    if (!c.is_finite()) throw Error("character enumeration needs a finite carrier");
    const int n = static_cast<int>(c.size());
    std::vector<std::vector<cx>> candidates(n);
    for (int i = 0; i < n; ++i) {
        candidates[i].push_back(0.0);
        int p = index_and_period(c, i).second;
        for (int j = 0; j < p; ++j)
            candidates[i].push_back(std::polar(1.0, 2.0 * M_PI * j / p));
    }
    std::vector<cx> vals(n);
    std::vector<Character> out;
    std::function<void(int)> assign = [&](int t) {
        if (t == n) {
            out.push_back(Character::table(cp, vals));
            return;
        }
        for (cx v : candidates[t]) {
            vals[t] = v;
            bool ok = true;
            for (int i = 0; i <= t && ok; ++i)
                for (int j = 0; j <= t && ok; ++j) {
                    int p = c.table()[i][j];
                    if (p <= t && std::abs(vals[p] - vals[i] * vals[j]) > tol)
                        ok = false;
                }
            if (ok) assign(t + 1);
        }
    };
    assign(0);
    // drop numerically identical assignments (roots of unity may coincide)
    std::vector<Character> unique;
    for (const auto& ch : out) {
        bool dup = false;
        for (const auto& u : unique) {
            double d = 0.0;
            for (int i = 0; i < n; ++i)
                d = std::max(d, std::abs(ch.values()[i] - u.values()[i]));
            if (d <= tol) { dup = true; break; }
        }
        if (!dup) unique.push_back(ch);
    }
    std::sort(unique.begin(), unique.end(),
              [n](const Character& a, const Character& b) {
                  for (int i = 0; i < n; ++i) {
                      if (a.values()[i].real() != b.values()[i].real())
                          return a.values()[i].real() < b.values()[i].real();
                      if (a.values()[i].imag() != b.values()[i].imag())
                          return a.values()[i].imag() < b.values()[i].imag();
                  }
                  return false;
              });
    return unique;
}

struct AdditiveBasis {
    int dimension = 0;
    std::vector<AdditiveFn> basis;
};

/// Basis of additive functions on a subsemigroup of a finite carrier:
/// the nullspace of a(xy) - a(x) - a(y) = 0 over all domain pairs.
inline AdditiveBasis solve_additive_basis(const CarrierPtr& cp,
                                          const std::vector<int>& domain) {
    const Carrier& c = *cp;
    if (!c.is_finite()) throw Error("additive basis solve needs a finite carrier");
    std::vector<int> pos(c.size(), -1);
    for (std::size_t k = 0; k < domain.size(); ++k) {
        int i = domain[k];
        if (i < 0 || i >= static_cast<int>(c.size()))
            throw Error("domain element out of range");
        pos[i] = static_cast<int>(k);
    }
    for (int i : domain)
        for (int j : domain)
            if (pos[c.table()[i][j]] < 0)
                throw Error("domain not closed under composition: witness pair (" +
                            c.labels()[i] + ", " + c.labels()[j] + ")");
    const int m = static_cast<int>(domain.size());
    RMat A(m * m, m);
    A.setZero();
    int row = 0;
    for (int i : domain)
        for (int j : domain) {
            int p = c.table()[i][j];
            A(row, pos[p]) += 1.0;
            A(row, pos[i]) -= 1.0;
            A(row, pos[j]) -= 1.0;
            ++row;
        }
    RMat kernel = real_nullspace(A);
    AdditiveBasis out;
    out.dimension = static_cast<int>(kernel.cols());
    for (int k = 0; k < kernel.cols(); ++k) {
        std::vector<cx> values(c.size(), 0.0);
        std::vector<bool> flags(c.size(), false);
        for (int t = 0; t < m; ++t) {
            values[domain[t]] = kernel(t, k);
            flags[domain[t]] = true;
        }
        out.basis.push_back(AdditiveFn::table(cp, values, flags));
    }
    return out;
}

/// All element indices of a finite carrier (the canonical full domain).
inline std::vector<int> full_domain(const Carrier& c) {
    std::vector<int> d(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) d[i] = static_cast<int>(i);
    return d;
}

}  // namespace cslab
