#pragma once

#include <string>
#include <vector>

#include "cslab/funcspace.hpp"

namespace cslab {

/// Residual of one addition-law equation over all ordered window pairs.
struct EquationResidual {
    double max_abs = 0.0;
    std::size_t argmax_i = 0, argmax_j = 0;
    /// Largest magnitude among the four terms of the equation over all
    /// pairs; the reference for relative residuals.
    double scale = 0.0;
};

/// Sweep of u(xy) = u(x)g(y) + g(x)u(y) + lambda^2 v(x)v(y).
/// residual_system calls this once per equation, so the swapped system
/// reproduces the same floating-point path term for term.
inline EquationResidual equation_residual(const Carrier& c, const WindowTable& u,
                                          const WindowTable& g,
                                          const WindowTable& v, cx lambda) {
    EquationResidual r;
    const cx l2 = lambda * lambda;
    const std::size_t n = c.window().size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cx t1 = u.at[i] * g.at[j];
            cx t2 = g.at[i] * u.at[j];
            cx t3 = l2 * (v.at[i] * v.at[j]);
            cx res = u.at_prod[i][j] - t1 - t2 - t3;
            double a = std::abs(res);
            if (a > r.max_abs) {
                r.max_abs = a;
                r.argmax_i = i;
                r.argmax_j = j;
            }
            r.scale = std::max({r.scale, std::abs(u.at_prod[i][j]), std::abs(t1),
                                std::abs(t2), std::abs(t3)});
        }
    return r;
}

struct ResidualReport {
    double max_abs = 0.0;
    Element argmax_x, argmax_y;
    std::vector<std::pair<std::string, double>> per_equation;
    double scale = 0.0;
    double r1 = 0.0, r2 = 0.0;
    bool independent = false;  // meaningful for system reports only

    double relative() const { return rel(max_abs, scale); }
};

/// f(xy) = f(x)g(y) + g(x)f(y).
inline ResidualReport residual_sine(const ComplexFn& f, const ComplexFn& g) {
    const Carrier& c = *f.carrier();
    WindowTable tf = tabulate(c, f), tg = tabulate(c, g);
    WindowTable zero;
    zero.at.assign(c.window().size(), 0.0);
    EquationResidual e = equation_residual(c, tf, tg, zero, 0.0);
    ResidualReport rep;
    rep.max_abs = rep.r1 = e.max_abs;
    rep.argmax_x = c.window()[e.argmax_i];
    rep.argmax_y = c.window()[e.argmax_j];
    rep.per_equation = {{"sine", e.max_abs}};
    rep.scale = e.scale;
    return rep;
}

/// f(xy) = f(x)g(y) + g(x)f(y) + h(x)h(y).
inline ResidualReport residual_cosine_sine(const ComplexFn& f, const ComplexFn& g,
                                           const ComplexFn& h) {
    const Carrier& c = *f.carrier();
    WindowTable tf = tabulate(c, f), tg = tabulate(c, g), th = tabulate(c, h);
    EquationResidual e = equation_residual(c, tf, tg, th, 1.0);
    ResidualReport rep;
    rep.max_abs = rep.r1 = e.max_abs;
    rep.argmax_x = c.window()[e.argmax_i];
    rep.argmax_y = c.window()[e.argmax_j];
    rep.per_equation = {{"cosine-sine", e.max_abs}};
    rep.scale = e.scale;
    return rep;
}

/// Residual of the cosine addition law f(xy) = f(x)f(y) + g(x)g(y)
/// (evaluation only; no families are attached to it).
inline ResidualReport residual_cosine(const ComplexFn& f, const ComplexFn& g) {
    const Carrier& c = *f.carrier();
    WindowTable tf = tabulate(c, f), tg = tabulate(c, g);
    ResidualReport rep;
    const std::size_t n = c.window().size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cx t1 = tf.at[i] * tf.at[j];
            cx t2 = tg.at[i] * tg.at[j];
            double a = std::abs(tf.at_prod[i][j] - t1 - t2);
            if (a > rep.max_abs) {
                rep.max_abs = a;
                rep.argmax_x = c.window()[i];
                rep.argmax_y = c.window()[j];
            }
            rep.scale = std::max({rep.scale, std::abs(tf.at_prod[i][j]),
                                  std::abs(t1), std::abs(t2)});
        }
    rep.r1 = rep.max_abs;
    rep.per_equation = {{"f(xy)=ff+gg", rep.max_abs}};
    return rep;
}

struct SystemTuple {
    ComplexFn f, g1, h, g2;
    cx lambda1{0.0}, lambda2{0.0};
};

/// Interchanging the two equations of the system:
/// (f, g1, h, g2, l1, l2) -> (h, g2, f, g1, l2, l1).
inline SystemTuple swap_system(const SystemTuple& t) {
    return SystemTuple{t.h, t.g2, t.f, t.g1, t.lambda2, t.lambda1};
}

/// Residuals of the coupled system
///   f(xy) = f(x)g1(y) + g1(x)f(y) + lambda1^2 h(x)h(y)
///   h(xy) = h(x)g2(y) + g2(x)h(y) + lambda2^2 f(x)f(y)
/// plus the linear-independence check of (f, h).
inline ResidualReport residual_system(const SystemTuple& t) {
    const Carrier& c = *t.f.carrier();
    WindowTable tf = tabulate(c, t.f), tg1 = tabulate(c, t.g1);
    WindowTable th = tabulate(c, t.h), tg2 = tabulate(c, t.g2);
    EquationResidual e1 = equation_residual(c, tf, tg1, th, t.lambda1);
    EquationResidual e2 = equation_residual(c, th, tg2, tf, t.lambda2);
    ResidualReport rep;
    rep.r1 = e1.max_abs;
    rep.r2 = e2.max_abs;
    rep.per_equation = {{"eq1", e1.max_abs}, {"eq2", e2.max_abs}};
    const EquationResidual& worst = e1.max_abs >= e2.max_abs ? e1 : e2;
    rep.max_abs = worst.max_abs;
    rep.argmax_x = c.window()[worst.argmax_i];
    rep.argmax_y = c.window()[worst.argmax_j];
    rep.scale = std::max(e1.scale, e2.scale);
    rep.independent = linear_independence(t.f, t.h).independent;
    return rep;
}

inline ResidualReport residual_system(const ComplexFn& f, const ComplexFn& g1,
                                      const ComplexFn& h, const ComplexFn& g2,
                                      cx lambda1, cx lambda2) {
    return residual_system(SystemTuple{f, g1, h, g2, lambda1, lambda2});
}

}  // namespace cslab
