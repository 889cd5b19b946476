#pragma once

#include <set>

#include "cslab/families.hpp"

namespace cslab {

// ---------------------------------------------------------------------------
// Exponent recovery along sampling lines (Prony / matrix pencil with a
// Gauss-Newton polish).  Works on stacked sequences so exponents shared by
// several components are recovered once.
// ---------------------------------------------------------------------------

struct LineExponents {
    std::vector<cx> b;          // cluster centers (per unit of t)
    std::vector<int> mult;      // cluster multiplicities (capped at 3)
};

namespace detail {

/// Smallest-degree linear recurrence annihilating all sequences; returns the
/// roots of its characteristic polynomial with multiplicities clustered.
inline LineExponents prony_exponents(const std::vector<std::vector<cx>>& seqs,
                                     double dt, int max_deg) {
    const int K = static_cast<int>(seqs.front().size());
    max_deg = std::min(max_deg, K / 2 - 1);
    double mag = 0.0;
    for (const auto& s : seqs)
        for (cx v : s) mag = std::max(mag, std::abs(v));
    if (mag == 0.0) return {};

    std::vector<cx> poly;
    double best_ratio = 1.0;
    std::vector<cx> best_poly;
    for (int L = 1; L <= max_deg; ++L) {
        int rows_per_seq = K - L;
        CMat H(rows_per_seq * static_cast<int>(seqs.size()), L + 1);
        int r = 0;
        for (const auto& s : seqs)
            for (int i = 0; i < rows_per_seq; ++i, ++r)
                for (int j = 0; j <= L; ++j) H(r, j) = s[i + j] / mag;
        Eigen::JacobiSVD<CMat> svd(H, Eigen::ComputeThinV);
        double ratio = svd.singularValues()(L) /
                       std::max(svd.singularValues()(0), kTinyDenominator);
        CVec v = svd.matrixV().col(L);
        std::vector<cx> cand(v.data(), v.data() + L + 1);
        if (ratio < best_ratio) {
            best_ratio = ratio;
            best_poly = cand;
        }
        if (ratio < 1e-8) {
            poly = cand;
            break;
        }
    }
    if (poly.empty()) poly = best_poly;
    if (poly.empty()) return {};

    auto roots = poly_roots(poly, 1e-7);
    // cluster: template terms give exactly repeated exponents
    LineExponents out;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        std::vector<cx> cluster = {roots[i]};
        used[i] = true;
        for (std::size_t j = i + 1; j < roots.size(); ++j)
            if (!used[j] && std::abs(roots[j] - roots[i]) < 2e-3) {
                cluster.push_back(roots[j]);
                used[j] = true;
            }
        cx center = 0.0;
        for (cx z : cluster) center += z;
        center /= static_cast<double>(cluster.size());
        if (std::abs(center) < 1e-6) continue;  // spurious zero root
        out.b.push_back(std::log(center) / dt);
        out.mult.push_back(std::min<int>(3, static_cast<int>(cluster.size())));
    }
    return out;
}

/// Separable nonlinear refit of the cluster exponents against the stacked
/// sequences (coefficients eliminated per sequence).
inline void polish_exponents(LineExponents& le,
                             const std::vector<std::vector<cx>>& seqs,
                             double dt, int gn_iters = 6) {
    if (le.b.empty()) return;
    const int K = static_cast<int>(seqs.front().size());
    int ncol = 0;
    for (int m : le.mult) ncol += m;
    if (ncol >= K) return;

    auto residual_norm = [&](const std::vector<cx>& bs) {
        CMat M(K, ncol);
        int col = 0;
        for (std::size_t k = 0; k < bs.size(); ++k)
            for (int p = 0; p < le.mult[k]; ++p, ++col)
                for (int t = 0; t < K; ++t)
                    M(t, col) = std::pow(static_cast<double>(t), p) *
                                std::exp(bs[k] * (t * dt));
        auto qr = M.colPivHouseholderQr();
        double rr = 0.0;
        for (const auto& s : seqs) {
            CVec y(K);
            double mag = 0.0;
            for (int t = 0; t < K; ++t) {
                y(t) = s[t];
                mag = std::max(mag, std::abs(s[t]));
            }
            if (mag == 0.0) continue;
            CVec coef = qr.solve(y);
            rr += ((M * coef - y) / mag).squaredNorm();
        }
        return rr;
    };

    std::vector<cx> bs = le.b;
    double r0 = residual_norm(bs);
    for (int it = 0; it < gn_iters && r0 > 1e-26; ++it) {
        bool improved = false;
        for (std::size_t k = 0; k < bs.size(); ++k) {
            // coordinate Newton step on the smooth residual in b_k
            cx h = 1e-6;
            std::vector<cx> bp = bs, bm = bs;
            bp[k] += h;
            bm[k] -= h;
            double rp = residual_norm(bp), rm = residual_norm(bm);
            double d1 = (rp - rm) / (2.0 * 1e-6);
            double d2 = (rp - 2.0 * r0 + rm) / (1e-6 * 1e-6);
            if (d2 <= 0.0) continue;
            std::vector<cx> bi = bs;
            bi[k] -= d1 / d2;
            // imaginary direction
            std::vector<cx> bpi = bi, bmi = bi;
            bpi[k] += cx(0.0, 1e-6);
            bmi[k] -= cx(0.0, 1e-6);
            double ri0 = residual_norm(bi);
            double rip = residual_norm(bpi), rim = residual_norm(bmi);
            double e1 = (rip - rim) / (2.0 * 1e-6);
            double e2 = (rip - 2.0 * ri0 + rim) / (1e-6 * 1e-6);
            if (e2 > 0.0) bi[k] -= cx(0.0, 1.0) * (e1 / e2);
            double rn = residual_norm(bi);
            if (rn < r0) {
                bs = bi;
                r0 = rn;
                improved = true;
            }
        }
        if (!improved) break;
    }
    le.b = bs;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Ingredient candidates and basis-coefficient fits.
// ---------------------------------------------------------------------------

struct IngredientCandidates {
    std::vector<Character> chars;
    std::vector<AdditiveFn> directions;  // canonical additive directions
    std::vector<std::string> notes;
};

namespace detail {

inline std::vector<Element> rat_line_points(const Carrier& c, int axis, int K,
                                            const Rational& step) {
    std::vector<Element> pts;
    for (int t = 0; t < K; ++t) {
        std::vector<Rational> v(c.dim(), Rational(0));
        v[axis] = step * Rational(t);
        pts.push_back(el(std::move(v)));
    }
    return pts;
}

inline std::vector<std::vector<cx>> sample_components(
    const Solution& sol, const std::vector<Element>& pts) {
    std::vector<std::vector<cx>> seqs;
    for (const auto& fn : sol.fns) {
        std::vector<cx> s;
        s.reserve(pts.size());
        for (const auto& x : pts) s.push_back(fn(x));
        seqs.push_back(std::move(s));
    }
    return seqs;
}

}  // namespace detail

/// Candidate characters (and canonical additive directions) extracted from
/// a verified solution tuple.  Finite carriers enumerate exactly; analytic
/// carriers recover exponents from samples along probe lines.
inline IngredientCandidates recover_characters(const Solution& sol) {
    IngredientCandidates out;
    const CarrierPtr& c = sol.carrier;
    switch (c->kind()) {
        case CarrierKind::FiniteTable: {
            for (auto& ch : enumerate_characters(c)) {
                double m = 0.0;
                for (const auto& w : c->window()) m = std::max(m, std::abs(ch(w)));
                if (m > 1e-9) out.chars.push_back(ch);
            }
            out.notes.push_back("finite carrier: exact character enumeration");
            return out;
        }
        case CarrierKind::RatAdd: {
            const int K = 24;
            const Rational step(1, 8);
            const double dt = step.to_double();
            std::vector<std::vector<cx>> axis_exponents(c->dim());
            for (int axis = 0; axis < c->dim(); ++axis) {
                auto pts = detail::rat_line_points(*c, axis, K, step);
                auto seqs = detail::sample_components(sol, pts);
                LineExponents le = detail::prony_exponents(seqs, dt, 10);
                detail::polish_exponents(le, seqs, dt);
                axis_exponents[axis] = le.b;
                if (le.b.empty())
                    out.notes.push_back("no stable exponents along axis " +
                                        std::to_string(axis));
            }
            // assemble candidate exponent vectors axis by axis
            std::vector<std::vector<cx>> combos = {{}};
            for (int axis = 0; axis < c->dim(); ++axis) {
                std::vector<std::vector<cx>> next;
                auto bs = axis_exponents[axis];
                if (bs.empty()) bs = {cx(0.0)};
                for (const auto& head : combos)
                    for (cx b : bs) {
                        auto v = head;
                        v.push_back(b);
                        next.push_back(std::move(v));
                        if (next.size() > 64) break;
                    }
                combos = std::move(next);
            }
            for (auto& b : combos) out.chars.push_back(Character::exp(c, b));
            for (int j = 0; j < c->dim(); ++j) {
                std::vector<cx> e(c->dim(), 0.0);
                e[j] = 1.0;
                out.directions.push_back(AdditiveFn::linear(c, e));
            }
            return out;
        }
        case CarrierKind::NonnegRealMul: {
            const int K = 24;
            const double dt = 1.0 / 8.0;
            std::vector<Element> pts;
            for (int t = 0; t < K; ++t) pts.push_back(el(std::exp(t * dt - 1.0)));
            auto seqs = detail::sample_components(sol, pts);
            LineExponents le = detail::prony_exponents(seqs, dt, 10);
            detail::polish_exponents(le, seqs, dt);
            for (cx s : le.b) {
                out.chars.push_back(Character::power(c, s));
                if (std::abs(s) < 1e-7) out.chars.push_back(Character::ones(c));
            }
            out.directions.push_back(AdditiveFn::log(c, 1.0));
            return out;
        }
    }
    throw Error("unreachable");
}

/// Per-character coefficients of one component in the span
///   { chi, chi * a_j, chi * a_j a_k }  (extended by zero on each I_chi).
struct CoeffTable {
    std::vector<cx> c0;
    std::vector<std::vector<cx>> c1;  // [char][direction]
    std::vector<CMat> c2;             // [char] (dim x dim, symmetric)
    double fit_rel = 0.0;
};

namespace detail {

inline std::vector<Element> fit_points(const Carrier& c) {
    std::vector<Element> pts = c.window();
    for (const auto& x : c.window())
        for (const auto& y : c.window()) {
            Element p = c.compose(x, y);
            bool dup = false;
            for (const auto& q : pts)
                if (q == p) { dup = true; break; }
            if (!dup) pts.push_back(p);
        }
    return pts;
}

}  // namespace detail

inline CoeffTable fit_in_basis(const ComplexFn& fn,
                               const IngredientCandidates& cands,
                               const std::vector<Element>& pts) {
    const int nc = static_cast<int>(cands.chars.size());
    const int nd = static_cast<int>(cands.directions.size());
    struct Col {
        int chi, j, k;  // j,k = -1 for the bare character column
    };
    std::vector<Col> cols;
    for (int i = 0; i < nc; ++i) {
        cols.push_back({i, -1, -1});
        bool add_ok = true;
        for (const auto& x : pts)
            for (int j = 0; j < nd && add_ok; ++j)
                if (!cands.chars[i].in_null_ideal(x) &&
                    !cands.directions[j].in_domain(x))
                    add_ok = false;
        if (!add_ok) continue;  // psi terms undefined for this character
        for (int j = 0; j < nd; ++j) cols.push_back({i, j, -1});
        for (int j = 0; j < nd; ++j)
            for (int k = j; k < nd; ++k) cols.push_back({i, j, k});
    }
    const int nrow = static_cast<int>(pts.size());
    CMat A(nrow, static_cast<int>(cols.size()));
    CVec y(nrow);
    double mag = 0.0;
    for (int r = 0; r < nrow; ++r) {
        y(r) = fn(pts[r]);
        mag = std::max(mag, std::abs(y(r)));
    }
    for (int cidx = 0; cidx < static_cast<int>(cols.size()); ++cidx) {
        const Col& cl = cols[cidx];
        const Character& chi = cands.chars[cl.chi];
        for (int r = 0; r < nrow; ++r) {
            const Element& x = pts[r];
            if (chi.in_null_ideal(x)) {
                A(r, cidx) = 0.0;
                continue;
            }
            cx v = chi(x);
            if (cl.j >= 0) v *= cands.directions[cl.j](x);
            if (cl.k >= 0) v *= cands.directions[cl.k](x);
            A(r, cidx) = v;
        }
    }
    // column equilibration keeps wildly different exponent magnitudes tame
    std::vector<double> colscale(cols.size(), 1.0);
    for (std::size_t cidx = 0; cidx < cols.size(); ++cidx) {
        double m = A.col(cidx).cwiseAbs().maxCoeff();
        if (m > kTinyDenominator) {
            colscale[cidx] = m;
            A.col(cidx) /= m;
        }
    }
    CVec coef = A.colPivHouseholderQr().solve(y);
    CoeffTable t;
    t.fit_rel = (A * coef - y).cwiseAbs().maxCoeff() / std::max(1.0, mag);
    for (std::size_t cidx = 0; cidx < cols.size(); ++cidx)
        coef(cidx) /= colscale[cidx];
    t.c0.assign(nc, 0.0);
    t.c1.assign(nc, std::vector<cx>(nd, 0.0));
    t.c2.assign(nc, CMat::Zero(std::max(nd, 1), std::max(nd, 1)));
    for (std::size_t cidx = 0; cidx < cols.size(); ++cidx) {
        const Col& cl = cols[cidx];
        if (cl.j < 0)
            t.c0[cl.chi] = coef(cidx);
        else if (cl.k < 0)
            t.c1[cl.chi][cl.j] = coef(cidx);
        else {
            // split the off-diagonal quadratic coefficient symmetrically
            cx v = coef(cidx);
            if (cl.j == cl.k) {
                t.c2[cl.chi](cl.j, cl.k) = v;
            } else {
                t.c2[cl.chi](cl.j, cl.k) = v / 2.0;
                t.c2[cl.chi](cl.k, cl.j) = v / 2.0;
            }
        }
    }
    return t;
}

}  // namespace cslab

#include "cslab/classify_templates.hpp"
