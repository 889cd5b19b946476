#pragma once

#include <array>
#include <map>
#include <optional>

#include "cslab/laws.hpp"
#include "cslab/rng.hpp"

namespace cslab {

enum class ErrataVariant { AsPrinted, Corrected };

inline std::string to_string(ErrataVariant v) {
    return v == ErrataVariant::AsPrinted ? "as-printed" : "corrected";
}

enum class SolutionShape { SinePair, CosineSineTriple, SystemQuadruple };

inline std::string to_string(SolutionShape s) {
    switch (s) {
        case SolutionShape::SinePair: return "sine";
        case SolutionShape::CosineSineTriple: return "cosine-sine";
        case SolutionShape::SystemQuadruple: return "system";
    }
    return "?";
}

/// Scalars, characters and additive ingredients of one family instance.
struct FamilyParams {
    std::map<std::string, cx> scalars;
    std::map<std::string, Character> chars;
    std::map<std::string, AdditiveFn> adds;

    cx s(const std::string& k) const {
        auto it = scalars.find(k);
        if (it == scalars.end()) throw Error("missing scalar '" + k + "'");
        return it->second;
    }
    const Character& chr(const std::string& k) const {
        auto it = chars.find(k);
        if (it == chars.end()) throw Error("missing character '" + k + "'");
        return it->second;
    }
    const AdditiveFn& add(const std::string& k) const {
        auto it = adds.find(k);
        if (it == adds.end()) throw Error("missing additive function '" + k + "'");
        return it->second;
    }
};

struct ConstraintCheck {
    std::string name;
    bool satisfied = false;
    double magnitude = 0.0;  // |residual| for equalities, |value| for nonzeroness
};

/// A solution tuple detached from any family provenance: what `verify` and
/// `classify` consume.
struct Solution {
    SolutionShape shape = SolutionShape::SystemQuadruple;
    CarrierPtr carrier;
    std::vector<ComplexFn> fns;  // (f,g) | (f,g,h) | (f,g1,h,g2)
    cx lambda1{0.0}, lambda2{0.0};

    ResidualReport verify() const {
        switch (shape) {
            case SolutionShape::SinePair:
                return residual_sine(fns[0], fns[1]);
            case SolutionShape::CosineSineTriple:
                return residual_cosine_sine(fns[0], fns[1], fns[2]);
            case SolutionShape::SystemQuadruple:
                return residual_system(fns[0], fns[1], fns[2], fns[3], lambda1,
                                       lambda2);
        }
        throw Error("unreachable");
    }
};

struct FamilyInstance {
    std::string id;
    FamilyParams params;
    SolutionShape shape = SolutionShape::SystemQuadruple;
    CarrierPtr carrier;
    std::vector<ComplexFn> fns;  // (f,g) | (f,g,h) | (f,g1,h,g2)
    cx lambda1{0.0}, lambda2{0.0};
    ErrataVariant variant = ErrataVariant::Corrected;
    std::string errata_note;  // nonempty when the catalog carries a correction

    Solution solution() const { return {shape, carrier, fns, lambda1, lambda2}; }

    ResidualReport verify() const { return solution().verify(); }
};

namespace detail {

inline FormTerm tm(cx coef, const Character& chi) {
    return FormTerm{coef, chi, std::nullopt, 0};
}
inline FormTerm tm(cx coef, const Character& chi, const AdditiveFn& a, int pow = 1) {
    return FormTerm{coef, chi, a, pow};
}

inline bool same_character(const Character& a, const Character& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Character::Kind::Zero:
        case Character::Kind::Ones:
            return true;
        case Character::Kind::Power:
            return a.s() == b.s();
        case Character::Kind::Exp:
            return a.b() == b.b();
        case Character::Kind::Table:
            return a.values() == b.values();
    }
    return false;
}

inline bool same_additive(const AdditiveFn& a, const AdditiveFn& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case AdditiveFn::Kind::Zero:
            return true;
        case AdditiveFn::Kind::Linear:
        case AdditiveFn::Kind::Log:
            return a.alpha() == b.alpha();
        case AdditiveFn::Kind::Table:
            return a.values() == b.values();
    }
    return false;
}

/// Collapse duplicate (character, additive, power) terms of a formal sum.
inline FormSum merge_terms(FormSum in) {
    FormSum out;
    for (auto& t : in) {
        bool merged = false;
        for (auto& u : out) {
            if (u.power == t.power && same_character(u.chi, t.chi) &&
                (t.power == 0 || same_additive(*u.add, *t.add))) {
                u.coef += t.coef;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(std::move(t));
    }
    FormSum pruned;
    for (auto& t : out)
        if (std::abs(t.coef) > 0.0) pruned.push_back(std::move(t));
    return pruned;
}

inline FormSum lincomb(std::initializer_list<std::pair<cx, const FormSum*>> parts) {
    FormSum out;
    for (const auto& [coef, fs] : parts)
        for (const auto& t : *fs) {
            FormTerm s = t;
            s.coef *= coef;
            out.push_back(std::move(s));
        }
    return merge_terms(std::move(out));
}

}  // namespace detail

/// Everything the catalog knows about one template.
struct FamilyInfo {
    std::string id;
    SolutionShape shape;
    std::vector<std::string> char_roles;
    std::vector<std::string> add_roles;      // "A", "A1"
    std::vector<std::string> scalar_roles;   // free first, derived after
    std::vector<std::string> printed_constraints;
    std::vector<std::string> corrected_constraints;
    bool has_correction = false;
    std::string errata_note;            // empty when printed form verified
    std::string formula;                // one-line rendering of the template
};

// ---------------------------------------------------------------------------
// The catalog.
// ---------------------------------------------------------------------------

class FamilyCatalog {
public:
    static const FamilyCatalog& instance() {
        static FamilyCatalog cat;
        return cat;
    }

    const std::vector<std::string>& ids() const { return ids_; }

    bool has(const std::string& id) const {
        return std::find(ids_.begin(), ids_.end(), id) != ids_.end();
    }

    const FamilyInfo& info(const std::string& id) const {
        auto it = info_.find(id);
        if (it == info_.end()) throw Error("unknown family id '" + id + "'");
        return it->second;
    }

    /// Constraint sweep.  Equality constraints must vanish to 1e-12 of
    /// scale; nonzero constraints must exceed the same threshold.
    std::vector<ConstraintCheck> validate_constraints(
        const std::string& id, const FamilyParams& p, cx l1, cx l2,
        ErrataVariant variant = ErrataVariant::Corrected) const;

    /// Builds the template's solution tuple.  Throws on violated
    /// constraints unless `checked` is false (test hook).
    FamilyInstance build(const std::string& id, const FamilyParams& p,
                         CarrierPtr carrier, cx l1, cx l2,
                         ErrataVariant variant = ErrataVariant::Corrected,
                         bool checked = true) const;

    /// Seeded constraint-satisfying parameter draw on a hosting carrier.
    FamilyParams sample_params(const std::string& id, const CarrierPtr& carrier,
                               cx l1, cx l2, std::uint64_t seed,
                               ErrataVariant variant = ErrataVariant::Corrected) const;

    /// Gauge-fixed representative of a parameter set (canonical character
    /// ordering; scalars transformed along).
    FamilyParams canonicalize(const std::string& id, FamilyParams p) const;

private:
    FamilyCatalog();

    std::vector<std::string> ids_;
    std::map<std::string, FamilyInfo> info_;
};

namespace detail {

inline std::vector<double> character_key(const Character& ch) {
    std::vector<double> k;
    k.push_back(static_cast<double>(ch.kind()));
    switch (ch.kind()) {
        case Character::Kind::Exp:
            for (cx b : ch.b()) { k.push_back(b.real()); k.push_back(b.imag()); }
            break;
        case Character::Kind::Power:
            k.push_back(ch.s().real());
            k.push_back(ch.s().imag());
            break;
        case Character::Kind::Table:
            for (cx v : ch.values()) { k.push_back(v.real()); k.push_back(v.imag()); }
            break;
        default:
            break;
    }
    return k;
}

inline bool char_key_less(const Character& a, const Character& b) {
    return character_key(a) < character_key(b);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Implementation.
// ---------------------------------------------------------------------------

inline FamilyCatalog::FamilyCatalog() {
    auto add = [&](FamilyInfo fi) {
        ids_.push_back(fi.id);
        info_[fi.id] = std::move(fi);
    };

    const std::string kSineConstraint = "none";
    add({"p41.1", SolutionShape::SinePair, {"chi1", "chi2"}, {}, {"alpha"},
         {"alpha != 0", "chi1 != chi2"}, {"alpha != 0", "chi1 != chi2"}, false, "",
         "f = alpha (chi1 - chi2),  g = (chi1 + chi2)/2"});
    add({"p41.2", SolutionShape::SinePair, {"chi"}, {"A"}, {},
         {"chi != 0", "A != 0"}, {"chi != 0", "A != 0"}, false, "",
         "f = Psi_chi(A),  g = chi"});

    add({"p42.1", SolutionShape::CosineSineTriple, {"chi"}, {"A", "A1"}, {"delta"},
         {"chi != 0", "A != 0"}, {"chi != 0", "A != 0"}, false, "",
         "F = 1/2 Psi(A1 + A^2), G = chi, H = Psi(A); delta-transformed"});
    add({"p42.2", SolutionShape::CosineSineTriple, {"chi", "mu"}, {"A"},
         {"c", "delta"}, {"c != 0", "mu != chi", "A != 0"},
         {"c != 0", "mu != chi", "A != 0"}, false, "",
         "F = c^2(mu-chi) - c Psi(A), G = chi, H = c(mu-chi); delta-transformed"});
    add({"p42.3", SolutionShape::CosineSineTriple, {"chi", "mu"}, {"A"},
         {"c", "d", "delta"}, {"1 - c d^2 = 0", "mu != chi", "A != 0"},
         {"1 - c d^2 = 0", "mu != chi", "A != 0"}, false, "",
         "F = c(mu-chi) + c d Psi(A), G = (mu+chi)/2 - d/2 Psi(A), H = Psi(A)"});
    add({"p42.4", SolutionShape::CosineSineTriple, {"chi1", "chi2", "chi3"}, {},
         {"alpha", "beta", "c", "delta"},
         {"2 c alpha^2 beta (2-beta) = 1", "chi1,chi2,chi3 distinct"},
         {"2 c alpha^2 beta (2-beta) = 1", "chi1,chi2,chi3 distinct"}, false, "",
         "F = c beta chi1 + c(2-beta) chi2 - 2c chi3, H = (chi1-chi2)/(2 alpha)"});

    add({"t1.1", SolutionShape::SystemQuadruple, {"m"}, {"A", "A1"}, {},
         {"m != 0", "A != 0"}, {"m != 0", "A != 0"}, false, "",
         "f = Psi_m(A), g1 = m, h = 1/2 Psi_m(A1 + l2^2 A^2), g2 = m"});
    add({"t1.2", SolutionShape::SystemQuadruple, {"m", "mu"}, {"A"}, {"alpha"},
         {"alpha != 0", "mu != m", "A != 0"}, {"alpha != 0", "mu != m", "A != 0"},
         false, "",
         "f = alpha(mu-m), g1 = (mu+m)/2, h = alpha^2 l2^2 (mu-m) - alpha l2 Psi_m(A), g2 = m"});
    add({"t1.3", SolutionShape::SystemQuadruple, {"m", "mu"}, {"A"}, {"c"},
         {"c != 0", "mu != m", "A != 0"}, {"c != 0", "mu != m", "A != 0"}, true,
         "cataloged g2 = (mu-m)/2 - 1/(2c) Psi_m(A) does not satisfy the system; "
         "verified form is g2 = (mu+m)/2 + 1/(2c) Psi_m(A)",
         "f = 1/l2 Psi_m(A), g1 = m, h = c^2(mu-m) - c Psi_m(A)"});
    add({"t1.4", SolutionShape::SystemQuadruple, {"m", "mu"}, {"A"}, {"c", "d"},
         {"c != 0", "d != 0", "mu != m", "A != 0"},
         {"1 - c d^2 = 0", "mu != m", "A != 0"}, true,
         "cataloged form lists no scalar constraint; substitution shows "
         "1 - c d^2 = 0 is required",
         "f = -1/(d l2) (mu-m), g1 = (mu+m)/2, h = c(mu-m) + 1/d Psi_m(A), g2 = m"});
    add({"t1.5", SolutionShape::SystemQuadruple, {"m", "mu"}, {"A"}, {"c", "d"},
         {"1 - c d^2 = 0", "mu != m", "A != 0"},
         {"1 - c d^2 = 0", "mu != m", "A != 0"}, false, "",
         "f = 1/l2 Psi_m(A), g1 = m, h = c(mu-m) + 1/d Psi_m(A), g2 = (mu+m)/2 - d/2 Psi_m(A)"});
    add({"t1.6", SolutionShape::SystemQuadruple, {"chi1", "chi2", "chi3"}, {},
         {"lambda", "beta", "c"},
         {"2 c lambda^2 beta (2-beta) = 1", "chi1,chi2,chi3 distinct"},
         {"2 c lambda^2 beta (2-beta) = 1", "chi1,chi2,chi3 distinct"}, false, "",
         "f = (chi1-chi2)/(2 lambda l2), h = c beta chi1 + c(2-beta) chi2 - 2c chi3"});
    add({"t1.7", SolutionShape::SystemQuadruple, {"chi1", "chi2", "chi3"}, {},
         {"lambda", "beta", "c"},
         {"2 c lambda^2 beta (2-beta) = 1", "beta != 2", "chi1,chi2,chi3 distinct"},
         {"2 c lambda^2 beta (2-beta) = 1", "beta != 2", "chi1,chi2,chi3 distinct"},
         false, "",
         "f = (chi1-chi3)/(lambda l2 (2-beta)), h = c beta chi1 + c(2-beta) chi2 - 2c chi3"});
    add({"t1.8", SolutionShape::SystemQuadruple, {"chi1", "chi2", "chi3"}, {},
         {"lambda", "beta", "c"},
         {"2 c lambda^2 beta (2-beta) = 1", "chi1,chi2,chi3 distinct"},
         {"2 c lambda^2 beta (2-beta) = 1", "chi1,chi2,chi3 distinct"}, false, "",
         "f = -(chi2-chi3)/(lambda l2 beta), h = c beta chi1 + c(2-beta) chi2 - 2c chi3"});

    add({"t2.1", SolutionShape::SystemQuadruple, {"chi"}, {"A", "A1"}, {"delta"},
         {"delta != 0", "chi != 0", "A != 0"},
         {"delta^3 + l1 l2^2 = 0", "chi != 0", "A != 0"}, true,
         "cataloged form leaves delta free; substitution shows delta^3 + l1 l2^2 = 0 "
         "is required (the proof machinery derives it)",
         "f = 1/2 Psi(A1 + A^2), h = -1/(2 l1) Psi(delta A1 - 2A) - delta/(2 l1) Psi(A^2)"});
    add({"t2.2", SolutionShape::SystemQuadruple, {"chi", "mu"}, {"A"},
         {"delta1", "delta2"},
         {"l2 d2 + d1^2 != 0", "l1 d1 + d2^2 != 0", "mu != chi", "A != 0"},
         {"delta1 delta2 = l1 l2", "l2 d2 + d1^2 != 0", "l1 d1 + d2^2 != 0",
          "mu != chi", "A != 0"},
         true,
         "cataloged f has an unbalanced parenthesis (read as the factored form); "
         "g1's Psi coefficient needs an extra delta1; h is missing the term "
         "delta1^2/(l1 L) Psi(A); the constraint delta1 delta2 = l1 l2 is omitted",
         "f = l1/K (l1/K (mu-chi) - Psi(A)), h = (l2/L)^2 (mu-chi) + d1^2/(l1 L) Psi(A)"});
    add({"t2.3", SolutionShape::SystemQuadruple, {"chi", "mu"}, {"A"},
         {"c", "delta"},
         {"c delta^3 - delta^2 + c l1 l2^2 = 0", "mu != chi", "A != 0"},
         {"c delta^3 - delta^2 + c l1 l2^2 = 0", "mu != chi", "A != 0"}, true,
         "cataloged g2 Psi coefficient -delta^3 (c-delta)^2 / (2 c l1 l2^2) should "
         "be -delta^3 (c delta - 1)^2 / (2 c l1 l2^2)",
         "f = c^2(mu-chi) - c Psi(A), h = l2^2 c^2/delta^2 (mu-chi) + delta c/l1 Psi(A)"});
    add({"t2.4", SolutionShape::SystemQuadruple, {"chi", "mu"}, {"A"},
         {"c", "d", "delta"},
         {"1 - c d^2 = 0", "d != delta", "mu != chi", "A != 0"},
         {"1 - c d^2 = 0", "delta (d-delta)^2 + l1 l2^2 = 0", "d != delta",
          "mu != chi", "A != 0"},
         true,
         "cataloged g2 ends in a Psi_chi with no argument (read as Psi_chi(A)); "
         "g1's Psi coefficient (d^2+delta^2)/(2d) should be -(d-delta)^2/(2d); "
         "the constraint delta (d-delta)^2 + l1 l2^2 = 0 is omitted",
         "f = c(mu-chi) + c d Psi(A), h = -delta/(d^2 l1)(mu-chi) + (d-delta)/(d l1) Psi(A)"});

    const std::vector<std::string> t25_constraints = {
        "2 c lambda^2 d (2-d) = 1", "2 alpha gamma^2 beta (2-beta) = 1",
        "chi1,chi2,chi3 distinct"};
    const char* subs[6] = {"i", "ii", "iii", "iv", "v", "vi"};
    for (int k = 0; k < 6; ++k) {
        FamilyInfo fi;
        fi.id = std::string("t2.5.") + subs[k];
        fi.shape = SolutionShape::SystemQuadruple;
        fi.char_roles = {"chi1", "chi2", "chi3"};
        fi.scalar_roles = {"c", "d", "gamma", "lambda",
                           "delta1", "delta2", "alpha", "beta"};
        fi.printed_constraints = t25_constraints;
        fi.corrected_constraints = t25_constraints;
        fi.formula = "f = c d chi1 + c(2-d) chi2 - 2c chi3; paired base triple "
                     "variant " + std::string(subs[k]);
        if (k == 1) {
            fi.has_correction = true;
            fi.errata_note =
                "cataloged base triple lists l2 F2 = (chi1-chi2)/(2 gamma); the "
                "derivation's character roles give (chi2-chi1)/(2 gamma)";
        }
        add(std::move(fi));
    }
}

namespace detail {

struct ScalarEnv {
    const FamilyParams& p;
    cx l1, l2;
    cx operator()(const std::string& k) const { return p.s(k); }
};

/// Derived scalars of the coupled three-character templates.
struct T25Derived {
    cx d1, d2, alpha, beta;
};

inline T25Derived t25_derived(const std::string& id, const FamilyParams& p, cx l1,
                              cx l2) {
    cx c = p.s("c"), d = p.s("d"), g = p.s("gamma"), l = p.s("lambda");
    T25Derived r;
    if (id == "t2.5.i") {
        r.d1 = g * l2 / l;
        r.d2 = l * l1 / g;
        r.alpha = -c * g * l2 / (l * l1);
        r.beta = d - 1.0 / (2.0 * c * g * l2);
    } else if (id == "t2.5.ii") {
        r.d1 = -g * l2 / l;
        r.d2 = -l * l1 / g;
        r.alpha = c * g * l2 / (l * l1);
        r.beta = 2.0 - d - 1.0 / (2.0 * c * g * l2);
    } else if (id == "t2.5.iii") {
        r.d1 = (4.0 * c * g * l2 - 1.0) / (2.0 * c * (2.0 - d) * l);
        r.d2 = (2.0 - d) * l * l1 / (2.0 * g);
        r.alpha = c * g * l2 / (l * l1);
        r.beta = (1.0 - 2.0 * c * d * g * l2) / (c * (2.0 - d) * g * l2);
    } else if (id == "t2.5.iv") {
        r.d1 = -(1.0 + 4.0 * c * g * l2) / (2.0 * c * (2.0 - d) * l);
        r.d2 = -(2.0 - d) * l * l1 / (2.0 * g);
        r.alpha = -c * g * l2 / (l * l1);
        r.beta = (1.0 + 4.0 * c * g * l2) / (c * (2.0 - d) * g * l2);
    } else if (id == "t2.5.v") {
        r.d1 = (1.0 - 4.0 * c * g * l2) / (2.0 * c * d * l);
        r.d2 = -d * l * l1 / (2.0 * g);
        r.alpha = -c * g * l2 / (l * l1);
        r.beta = (1.0 - 2.0 * c * (2.0 - d) * g * l2) / (c * d * g * l2);
    } else if (id == "t2.5.vi") {
        r.d1 = (1.0 + 4.0 * c * g * l2) / (2.0 * c * d * l);
        r.d2 = d * l * l1 / (2.0 * g);
        r.alpha = c * g * l2 / (l * l1);
        r.beta = (1.0 + 4.0 * c * g * l2) / (c * d * g * l2);
    } else {
        throw Error("not a t2.5 id: " + id);
    }
    return r;
}

/// Base triple of the paired equation for a t2.5 sub-variant, in cataloged
/// or corrected form.
struct T25Triple {
    FormSum H2, G2, L2F2;
};

inline T25Triple t25_triple(const std::string& id, const FamilyParams& p,
                            const T25Derived& dv, ErrataVariant variant) {
    const Character &c1 = p.chr("chi1"), &c2 = p.chr("chi2"), &c3 = p.chr("chi3");
    cx g = p.s("gamma");
    cx a = dv.alpha, b = dv.beta;
    auto triple = [&](const Character& xa, const Character& xb,
                      const Character& xc, const Character& fa,
                      const Character& fb) {
        T25Triple t;
        t.H2 = {tm(a * b, xa), tm(a * (2.0 - b), xb), tm(-2.0 * a, xc)};
        t.G2 = {tm(b / 4.0, xa), tm((2.0 - b) / 4.0, xb), tm(cx(0.5), xc)};
        t.L2F2 = {tm(1.0 / (2.0 * g), fa), tm(-1.0 / (2.0 * g), fb)};
        return t;
    };
    if (id == "t2.5.i") return triple(c1, c2, c3, c1, c2);
    if (id == "t2.5.ii") {
        if (variant == ErrataVariant::AsPrinted)
            return triple(c2, c1, c3, c1, c2);
        return triple(c2, c1, c3, c2, c1);
    }
    if (id == "t2.5.iii") return triple(c1, c3, c2, c1, c3);
    if (id == "t2.5.iv") return triple(c3, c1, c2, c3, c1);
    if (id == "t2.5.v") return triple(c2, c3, c1, c2, c3);
    if (id == "t2.5.vi") return triple(c3, c2, c1, c3, c2);
    throw Error("not a t2.5 id: " + id);
}

}  // namespace detail

inline std::vector<ConstraintCheck> FamilyCatalog::validate_constraints(
    const std::string& id, const FamilyParams& p, cx l1, cx l2,
    ErrataVariant variant) const {
    const FamilyInfo& fi = info(id);
    std::vector<ConstraintCheck> out;
    // equality constraints hold to 1e-12 relative to the magnitude of the
    // terms entering them (roots are double-precision)
    auto eq = [&](const std::string& name, cx residual, double scale = 1.0) {
        double tol = 1e-12 * std::max(1.0, scale) * 10.0;
        out.push_back({name, std::abs(residual) <= tol, std::abs(residual)});
    };
    auto nz = [&](const std::string& name, cx value) {
        out.push_back({name, std::abs(value) > 1e-9, std::abs(value)});
    };

    // structural: characters pairwise distinct on the window, role characters
    // nonzero, additive A nonzero on the window
    {
        const auto& c = fi.char_roles;
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = i + 1; j < c.size(); ++j) {
                const Character &a = p.chr(c[i]), &b = p.chr(c[j]);
                double diff = 0.0;
                for (const auto& w : a.carrier()->window())
                    diff = std::max(diff, std::abs(a(w) - b(w)));
                out.push_back({c[i] + " != " + c[j], diff > 1e-9, diff});
            }
        for (const auto& role : c) {
            if (role == "mu") continue;  // mu may be the zero function
            const Character& ch = p.chr(role);
            double m = 0.0;
            for (const auto& w : ch.carrier()->window())
                m = std::max(m, std::abs(ch(w)));
            out.push_back({role + " != 0", m > 1e-9, m});
        }
        for (const auto& role : fi.add_roles) {
            if (role == "A1") continue;  // A1 is unconstrained
            const AdditiveFn& a = p.add(role);
            double m = 0.0;
            for (const auto& w : a.carrier()->window())
                if (a.in_domain(w)) m = std::max(m, std::abs(a(w)));
            out.push_back({role + " != 0", m > 1e-9, m});
        }
    }

    auto S = [&](const std::string& k) { return p.s(k); };
    const bool corrected = variant == ErrataVariant::Corrected;

    if (id == "p41.1") nz("alpha != 0", S("alpha"));
    if (id == "p42.2" || id == "t1.3") nz("c != 0", S("c"));
    if (id == "t1.2") nz("alpha != 0", S("alpha"));
    if (id == "p42.3" || id == "t1.5")
        eq("1 - c d^2 = 0", 1.0 - S("c") * S("d") * S("d"));
    if (id == "t1.4") {
        nz("c != 0", S("c"));
        nz("d != 0", S("d"));
        if (corrected) eq("1 - c d^2 = 0", 1.0 - S("c") * S("d") * S("d"));
    }
    if (id == "p42.4") {
        cx a = S("alpha"), b = S("beta"), c = S("c");
        eq("2 c alpha^2 beta (2-beta) = 1",
           2.0 * c * a * a * b * (2.0 - b) - 1.0);
    }
    if (id == "t1.6" || id == "t1.7" || id == "t1.8") {
        cx l = S("lambda"), b = S("beta"), c = S("c");
        eq("2 c lambda^2 beta (2-beta) = 1",
           2.0 * c * l * l * b * (2.0 - b) - 1.0);
        if (id == "t1.7") nz("beta != 2", 2.0 - b);
        if (id == "t1.8") nz("beta != 0", b);
    }
    if (id == "t2.1") {
        cx d = S("delta");
        nz("delta != 0", d);
        if (corrected)
            eq("delta^3 + l1 l2^2 = 0", d * d * d + l1 * l2 * l2,
               std::abs(d * d * d) + std::abs(l1 * l2 * l2));
    }
    if (id == "t2.2") {
        cx d1 = S("delta1"), d2 = S("delta2");
        nz("delta1 != 0", d1);
        nz("delta2 != 0", d2);
        nz("l1 d1 + d2^2 != 0", l1 * d1 + d2 * d2);
        nz("l2 d2 + d1^2 != 0", l2 * d2 + d1 * d1);
        if (corrected) eq("delta1 delta2 = l1 l2", d1 * d2 - l1 * l2);
    }
    if (id == "t2.3") {
        cx c = S("c"), d = S("delta");
        nz("c != 0", c);
        nz("delta != 0", d);
        eq("c delta^3 - delta^2 + c l1 l2^2 = 0",
           c * d * d * d - d * d + c * l1 * l2 * l2,
           std::abs(c * d * d * d) + std::abs(d * d) + std::abs(c * l1 * l2 * l2));
    }
    if (id == "t2.4") {
        cx c = S("c"), d = S("d"), dl = S("delta");
        eq("1 - c d^2 = 0", 1.0 - c * d * d);
        nz("d != delta", d - dl);
        nz("delta != 0", dl);
        if (corrected)
            eq("delta (d-delta)^2 + l1 l2^2 = 0",
               dl * (d - dl) * (d - dl) + l1 * l2 * l2,
               std::abs(dl * (d - dl) * (d - dl)) + std::abs(l1 * l2 * l2));
    }
    if (id.rfind("t2.5.", 0) == 0) {
        cx c = S("c"), d = S("d"), g = S("gamma"), l = S("lambda");
        eq("2 c lambda^2 d (2-d) = 1", 2.0 * c * l * l * d * (2.0 - d) - 1.0);
        detail::T25Derived dv = detail::t25_derived(id, p, l1, l2);
        eq("2 alpha gamma^2 beta (2-beta) = 1",
           2.0 * dv.alpha * g * g * dv.beta * (2.0 - dv.beta) - 1.0,
           std::abs(2.0 * dv.alpha * g * g * dv.beta * (2.0 - dv.beta)) + 1.0);
        nz("beta != 0", dv.beta);
        nz("beta != 2", 2.0 - dv.beta);
        nz("gamma != 0", g);
        nz("d != 0", d);
        nz("d != 2", 2.0 - d);
    }
    if (fi.shape == SolutionShape::SystemQuadruple) {
        if (id.rfind("t1.", 0) == 0) {
            eq("l1 = 0", l1);
            nz("l2 != 0", l2);
        } else {
            nz("l1 != 0", l1);
            nz("l2 != 0", l2);
        }
    }
    return out;
}

inline FamilyInstance FamilyCatalog::build(const std::string& id,
                                           const FamilyParams& p,
                                           CarrierPtr carrier, cx l1, cx l2,
                                           ErrataVariant variant,
                                           bool checked) const {
    using detail::lincomb;
    using detail::merge_terms;
    using detail::tm;
    const FamilyInfo& fi = info(id);
    if (checked) {
        for (const auto& chk : validate_constraints(id, p, l1, l2, variant))
            if (!chk.satisfied)
                throw Error("family " + id + ": constraint violated: " + chk.name +
                            " (magnitude " + std::to_string(chk.magnitude) + ")");
    }

    FamilyInstance inst;
    inst.id = id;
    inst.params = p;
    inst.shape = fi.shape;
    inst.carrier = carrier;
    inst.lambda1 = l1;
    inst.lambda2 = l2;
    inst.variant = variant;
    if (fi.has_correction && variant == ErrataVariant::Corrected)
        inst.errata_note = fi.errata_note;

    auto S = [&](const std::string& k) { return p.s(k); };
    auto F = [&](FormSum fs) {
        return ComplexFn::from_form(carrier, merge_terms(std::move(fs)));
    };
    const bool printed = variant == ErrataVariant::AsPrinted;

    if (id == "p41.1") {
        const Character &c1 = p.chr("chi1"), &c2 = p.chr("chi2");
        cx a = S("alpha");
        inst.fns = {F({tm(a, c1), tm(-a, c2)}), F({tm(0.5, c1), tm(0.5, c2)})};
        return inst;
    }
    if (id == "p41.2") {
        const Character& ch = p.chr("chi");
        const AdditiveFn& A = p.add("A");
        inst.fns = {F({tm(1.0, ch, A)}), F({tm(1.0, ch)})};
        return inst;
    }

    if (id.rfind("p42.", 0) == 0) {
        FormSum Fm, Gm, Hm;
        if (id == "p42.1") {
            const Character& ch = p.chr("chi");
            const AdditiveFn &A = p.add("A"), &A1 = p.add("A1");
            Fm = {tm(0.5, ch, A1), tm(0.5, ch, A, 2)};
            Gm = {tm(1.0, ch)};
            Hm = {tm(1.0, ch, A)};
        } else if (id == "p42.2") {
            const Character &ch = p.chr("chi"), &mu = p.chr("mu");
            const AdditiveFn& A = p.add("A");
            cx c = S("c");
            Fm = {tm(c * c, mu), tm(-c * c, ch), tm(-c, ch, A)};
            Gm = {tm(1.0, ch)};
            Hm = {tm(c, mu), tm(-c, ch)};
        } else if (id == "p42.3") {
            const Character &ch = p.chr("chi"), &mu = p.chr("mu");
            const AdditiveFn& A = p.add("A");
            cx c = S("c"), d = S("d");
            Fm = {tm(c, mu), tm(-c, ch), tm(c * d, ch, A)};
            Gm = {tm(0.5, mu), tm(0.5, ch), tm(-d / 2.0, ch, A)};
            Hm = {tm(1.0, ch, A)};
        } else {  // p42.4
            const Character &c1 = p.chr("chi1"), &c2 = p.chr("chi2"),
                            &c3 = p.chr("chi3");
            cx a = S("alpha"), b = S("beta"), c = S("c");
            Fm = {tm(c * b, c1), tm(c * (2.0 - b), c2), tm(-2.0 * c, c3)};
            Gm = {tm(b / 4.0, c1), tm((2.0 - b) / 4.0, c2), tm(cx(0.5), c3)};
            Hm = {tm(1.0 / (2.0 * a), c1), tm(-1.0 / (2.0 * a), c2)};
        }
        cx d = S("delta");
        FormSum g = lincomb({{-0.5 * d * d, &Fm}, {1.0, &Gm}, {d, &Hm}});
        FormSum h = lincomb({{-d, &Fm}, {1.0, &Hm}});
        inst.fns = {F(Fm), F(g), F(h)};
        return inst;
    }

    if (id == "t1.1") {
        const Character& m = p.chr("m");
        const AdditiveFn &A = p.add("A"), &A1 = p.add("A1");
        inst.fns = {F({tm(1.0, m, A)}), F({tm(1.0, m)}),
                    F({tm(0.5, m, A1), tm(0.5 * l2 * l2, m, A, 2)}),
                    F({tm(1.0, m)})};
        return inst;
    }
    if (id == "t1.2") {
        const Character &m = p.chr("m"), &mu = p.chr("mu");
        const AdditiveFn& A = p.add("A");
        cx a = S("alpha");
        inst.fns = {F({tm(a, mu), tm(-a, m)}), F({tm(0.5, mu), tm(0.5, m)}),
                    F({tm(a * a * l2 * l2, mu), tm(-a * a * l2 * l2, m),
                       tm(-a * l2, m, A)}),
                    F({tm(1.0, m)})};
        return inst;
    }
    if (id == "t1.3") {
        const Character &m = p.chr("m"), &mu = p.chr("mu");
        const AdditiveFn& A = p.add("A");
        cx c = S("c");
        FormSum g2 = printed
                         ? FormSum{tm(0.5, mu), tm(-0.5, m), tm(-0.5 / c, m, A)}
                         : FormSum{tm(0.5, mu), tm(0.5, m), tm(0.5 / c, m, A)};
        inst.fns = {F({tm(1.0 / l2, m, A)}), F({tm(1.0, m)}),
                    F({tm(c * c, mu), tm(-c * c, m), tm(-c, m, A)}), F(g2)};
        return inst;
    }
    if (id == "t1.4" || id == "t1.5") {
        const Character &m = p.chr("m"), &mu = p.chr("mu");
        const AdditiveFn& A = p.add("A");
        cx c = S("c"), d = S("d");
        FormSum h = {tm(c, mu), tm(-c, m), tm(1.0 / d, m, A)};
        if (id == "t1.4") {
            inst.fns = {F({tm(-1.0 / (d * l2), mu), tm(1.0 / (d * l2), m)}),
                        F({tm(0.5, mu), tm(0.5, m)}), F(h), F({tm(1.0, m)})};
        } else {
            inst.fns = {F({tm(1.0 / l2, m, A)}), F({tm(1.0, m)}), F(h),
                        F({tm(0.5, mu), tm(0.5, m), tm(-d / 2.0, m, A)})};
        }
        return inst;
    }
    if (id == "t1.6" || id == "t1.7" || id == "t1.8") {
        const Character &c1 = p.chr("chi1"), &c2 = p.chr("chi2"),
                        &c3 = p.chr("chi3");
        cx l = S("lambda"), b = S("beta"), c = S("c");
        FormSum h = {tm(c * b, c1), tm(c * (2.0 - b), c2), tm(-2.0 * c, c3)};
        if (id == "t1.6") {
            cx k = 1.0 / (2.0 * l * l2);
            inst.fns = {F({tm(k, c1), tm(-k, c2)}), F({tm(0.5, c1), tm(0.5, c2)}),
                        F(h),
                        F({tm(b / 4.0, c1), tm((2.0 - b) / 4.0, c2),
                           tm(cx(0.5), c3)})};
        } else if (id == "t1.7") {
            cx k = 1.0 / (l * l2 * (2.0 - b));
            inst.fns = {F({tm(k, c1), tm(-k, c3)}), F({tm(0.5, c1), tm(0.5, c3)}),
                        F(h),
                        F({tm(-b / (2.0 * (2.0 - b)), c1), tm(cx(0.5), c2),
                           tm(1.0 / (2.0 - b), c3)})};
        } else {
            cx k = -1.0 / (l * l2 * b);
            inst.fns = {F({tm(k, c2), tm(-k, c3)}), F({tm(0.5, c2), tm(0.5, c3)}),
                        F(h),
                        F({tm(cx(0.5), c1), tm(-(2.0 - b) / (2.0 * b), c2),
                           tm(1.0 / b, c3)})};
        }
        return inst;
    }

    if (id == "t2.1") {
        const Character& ch = p.chr("chi");
        const AdditiveFn &A = p.add("A"), &A1 = p.add("A1");
        cx d = S("delta");
        inst.fns = {
            F({tm(0.5, ch, A1), tm(0.5, ch, A, 2)}),
            F({tm(1.0, ch), tm(-d * d / 4.0, ch, A1), tm(d, ch, A),
               tm(-d * d / 4.0, ch, A, 2)}),
            F({tm(-d / (2.0 * l1), ch, A1), tm(1.0 / l1, ch, A),
               tm(-d / (2.0 * l1), ch, A, 2)}),
            F({tm(1.0, ch), tm(-d * d / 4.0, ch, A1), tm(-d / 2.0, ch, A),
               tm(-d * d / 4.0, ch, A, 2)})};
        return inst;
    }
    if (id == "t2.2") {
        const Character &ch = p.chr("chi"), &mu = p.chr("mu");
        const AdditiveFn& A = p.add("A");
        cx d1 = S("delta1"), d2 = S("delta2");
        cx K = l1 * d1 + d2 * d2, L = l2 * d2 + d1 * d1;
        cx cK = l1 / K, dL = l2 / L;
        FormSum f = {tm(cK * cK, mu), tm(-cK * cK, ch), tm(-cK, ch, A)};
        cx g1_mu = (l1 * d1 / (2.0 * K)) * (1.0 + d2 * d2 / K);
        cx g1_psi = printed ? l1 * d1 / (2.0 * K) : l1 * d1 * d1 / (2.0 * K);
        FormSum g1 = {tm(g1_mu, mu), tm(-g1_mu + 1.0, ch), tm(g1_psi, ch, A)};
        FormSum h = {tm(dL * dL, mu), tm(-dL * dL, ch)};
        if (!printed) h.push_back(tm(d1 * d1 / (l1 * L), ch, A));
        cx g2_mu = (l2 * d2 / (2.0 * L)) * (1.0 + d1 * d1 / L);
        cx g2_psi = -(l2 * d2 / (2.0 * L)) * d1;
        FormSum g2 = {tm(g2_mu, mu), tm(-g2_mu + 1.0, ch), tm(g2_psi, ch, A)};
        inst.fns = {F(f), F(g1), F(h), F(g2)};
        return inst;
    }
    if (id == "t2.3") {
        const Character &ch = p.chr("chi"), &mu = p.chr("mu");
        const AdditiveFn& A = p.add("A");
        cx c = S("c"), d = S("delta");
        cx q = (d * c - 1.0) * (d * c - 1.0);
        cx g2_psi = printed
                        ? -d * d * d * (c - d) * (c - d) / (2.0 * c * l1 * l2 * l2)
                        : -d * d * d * (c * d - 1.0) * (c * d - 1.0) /
                              (2.0 * c * l1 * l2 * l2);
        inst.fns = {
            F({tm(c * c, mu), tm(-c * c, ch), tm(-c, ch, A)}),
            F({tm((1.0 - q) / 2.0, mu), tm((1.0 + q) / 2.0, ch),
               tm(d * d * c / 2.0, ch, A)}),
            F({tm(l2 * l2 * c * c / (d * d), mu), tm(-l2 * l2 * c * c / (d * d), ch),
               tm(d * c / l1, ch, A)}),
            F({tm((1.0 - d * d * c * c) / 2.0, mu),
               tm((1.0 + d * d * c * c) / 2.0, ch), tm(g2_psi, ch, A)})};
        return inst;
    }
    if (id == "t2.4") {
        const Character &ch = p.chr("chi"), &mu = p.chr("mu");
        const AdditiveFn& A = p.add("A");
        cx c = S("c"), d = S("d"), dl = S("delta");
        cx g1_psi = printed ? (d * d + dl * dl) / (2.0 * d)
                            : -(d - dl) * (d - dl) / (2.0 * d);
        cx w = l1 * l2 * l2;
        inst.fns = {
            F({tm(c, mu), tm(-c, ch), tm(c * d, ch, A)}),
            F({tm((d * d - dl * dl) / (2.0 * d * d), mu),
               tm((d * d + dl * dl) / (2.0 * d * d), ch), tm(g1_psi, ch, A)}),
            F({tm(-dl / (d * d * l1), mu), tm(dl / (d * d * l1), ch),
               tm((d - dl) / (d * l1), ch, A)}),
            F({tm((dl * d * d + w) / (2.0 * dl * d * d), mu),
               tm((dl * d * d - w) / (2.0 * dl * d * d), ch),
               tm(-w / (2.0 * d * (d - dl)), ch, A)})};
        return inst;
    }
    if (id.rfind("t2.5.", 0) == 0) {
        const Character &c1 = p.chr("chi1"), &c2 = p.chr("chi2"),
                        &c3 = p.chr("chi3");
        cx c = S("c"), d = S("d"), l = S("lambda");
        detail::T25Derived dv = detail::t25_derived(id, p, l1, l2);
        FormSum F1 = {tm(c * d, c1), tm(c * (2.0 - d), c2), tm(-2.0 * c, c3)};
        FormSum G1 = {tm(d / 4.0, c1), tm((2.0 - d) / 4.0, c2), tm(cx(0.5), c3)};
        FormSum L1H1 = {tm(1.0 / (2.0 * l), c1), tm(-1.0 / (2.0 * l), c2)};
        detail::T25Triple tr = detail::t25_triple(id, p, dv, variant);
        FormSum g1 =
            lincomb({{-0.5 * dv.d1 * dv.d1, &F1}, {1.0, &G1}, {dv.d1, &L1H1}});
        FormSum g2 =
            lincomb({{-0.5 * dv.d2 * dv.d2, &tr.H2}, {1.0, &tr.G2}, {dv.d2, &tr.L2F2}});
        inst.fns = {F(F1), F(g1), F(tr.H2), F(g2)};
        return inst;
    }
    throw Error("unknown family id '" + id + "'");
}

}  // namespace cslab

#include "cslab/families_sampling.hpp"
