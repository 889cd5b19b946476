#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <variant>
#include <vector>

#include "cslab/core.hpp"
#include "cslab/rational.hpp"

namespace cslab {

enum class CarrierKind { FiniteTable, RatAdd, NonnegRealMul };

/// One semigroup element.  Tagged by carrier kind: an index into a finite
/// table, an exact rational vector of (Q^n, +), or a nonnegative real of
/// ([0, inf), *).
struct Element {
    std::variant<int, std::vector<Rational>, double> value;

    int index() const { return std::get<int>(value); }
    const std::vector<Rational>& vec() const {
        return std::get<std::vector<Rational>>(value);
    }
    double real() const { return std::get<double>(value); }

    friend bool operator==(const Element& a, const Element& b) {
        return a.value == b.value;
    }

    std::string str() const {
        if (std::holds_alternative<int>(value))
            return "#" + std::to_string(index());
        if (std::holds_alternative<double>(value)) {
            std::ostringstream os;
            os << real();
            return os.str();
        }
        std::string s = "(";
        const auto& xs = vec();
        for (std::size_t i = 0; i < xs.size(); ++i)
            s += (i ? "," : "") + xs[i].str();
        return s + ")";
    }
};

inline Element el(int i) { return Element{i}; }
inline Element el(std::vector<Rational> v) { return Element{std::move(v)}; }
inline Element el(double x) { return Element{x}; }

struct SquareGenEntry {
    Element element;
    bool reachable = false;
    /// When reachable: x = roots[0]^2 * roots[1]^2 * ... (composition order).
    std::vector<Element> roots;
};

struct SquareGenReport {
    bool all_reachable = true;
    std::vector<SquareGenEntry> entries;
};

/// A semigroup together with the finite evaluation window over which all
/// residual sweeps quantify.  Immutable once constructed; meant to be held
/// by shared_ptr and shared freely across sweeps.
class Carrier {
public:
    static Carrier finite(std::vector<std::string> labels,
                          std::vector<std::vector<int>> table,
                          std::vector<int> window_indices = {}) {
        Carrier c;
        c.kind_ = CarrierKind::FiniteTable;
        c.labels_ = std::move(labels);
        c.table_ = std::move(table);
        const int n = static_cast<int>(c.labels_.size());
        if (n == 0) throw Error("finite carrier needs at least one element");
        if (static_cast<int>(c.table_.size()) != n)
            throw Error("table must have one row per element");
        for (const auto& row : c.table_) {
            if (static_cast<int>(row.size()) != n)
                throw Error("table rows must have one entry per element");
            for (int v : row)
                if (v < 0 || v >= n) throw Error("table entry out of range");
        }
        c.check_associative();
        if (window_indices.empty()) {
            for (int i = 0; i < n; ++i) c.window_.push_back(el(i));
        } else {
            for (int i : window_indices) {
                if (i < 0 || i >= n) throw Error("window element outside carrier");
                c.window_.push_back(el(i));
            }
        }
        c.check_window();
        return c;
    }

    static Carrier rat_add(int dim, std::vector<std::vector<Rational>> window) {
        if (dim < 1) throw Error("rat-add dimension must be positive");
        Carrier c;
        c.kind_ = CarrierKind::RatAdd;
        c.dim_ = dim;
        if (window.empty()) window = default_rat_window(dim);
        for (auto& v : window) {
            if (static_cast<int>(v.size()) != dim)
                throw Error("window element outside carrier: wrong dimension");
            c.window_.push_back(el(std::move(v)));
        }
        c.check_window();
        return c;
    }

    static Carrier nonneg_real_mul(std::vector<double> window) {
        Carrier c;
        c.kind_ = CarrierKind::NonnegRealMul;
        if (window.empty())
            window = {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
        for (double x : window) {
            if (x < 0.0)
                throw Error("window element outside carrier: negative real");
            c.window_.push_back(el(x));
        }
        c.check_window();
        return c;
    }

    CarrierKind kind() const { return kind_; }
    bool is_finite() const { return kind_ == CarrierKind::FiniteTable; }
    int dim() const { return dim_; }
    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<std::vector<int>>& table() const { return table_; }
    const std::vector<Element>& window() const { return window_; }

    int index_of(const std::string& label) const {
        auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end()) throw Error("unknown element label '" + label + "'");
        return static_cast<int>(it - labels_.begin());
    }

    bool contains(const Element& x) const {
        switch (kind_) {
            case CarrierKind::FiniteTable:
                return std::holds_alternative<int>(x.value) && x.index() >= 0 &&
                       x.index() < static_cast<int>(labels_.size());
            case CarrierKind::RatAdd:
                return std::holds_alternative<std::vector<Rational>>(x.value) &&
                       static_cast<int>(x.vec().size()) == dim_;
            case CarrierKind::NonnegRealMul:
                return std::holds_alternative<double>(x.value) && x.real() >= 0.0;
        }
        return false;
    }

    Element compose(const Element& x, const Element& y) const {
        if (!contains(x)) throw Error("compose: element " + x.str() + " not in carrier");
        if (!contains(y)) throw Error("compose: element " + y.str() + " not in carrier");
        switch (kind_) {
            case CarrierKind::FiniteTable:
                return el(table_[x.index()][y.index()]);
            case CarrierKind::RatAdd: {
                std::vector<Rational> z(dim_);
                for (int i = 0; i < dim_; ++i) z[i] = x.vec()[i] + y.vec()[i];
                return el(std::move(z));
            }
            case CarrierKind::NonnegRealMul:
                return el(x.real() * y.real());
        }
        throw Error("unreachable");
    }

    /// Decides, element by element, whether the carrier is generated by its
    /// squares.  Finite tables run a breadth-first closure of the set of
    /// squares under composition; the analytic carriers return constructive
    /// verdicts (halving resp. square roots).
    SquareGenReport check_square_generated(int max_length = 0) const {
        SquareGenReport rep;
        if (kind_ == CarrierKind::RatAdd) {
            for (const auto& w : window_) {
                SquareGenEntry e;
                e.element = w;
                e.reachable = true;
                std::vector<Rational> half(dim_);
                for (int i = 0; i < dim_; ++i)
                    half[i] = w.vec()[i] * Rational(1, 2);
                e.roots = {el(std::move(half))};
                rep.entries.push_back(std::move(e));
            }
            return rep;
        }
        if (kind_ == CarrierKind::NonnegRealMul) {
            for (const auto& w : window_) {
                SquareGenEntry e;
                e.element = w;
                e.reachable = true;
                e.roots = {el(std::sqrt(w.real()))};
                rep.entries.push_back(std::move(e));
            }
            return rep;
        }
        const int n = static_cast<int>(labels_.size());
        if (max_length <= 0) max_length = n;
        // squares[d] holds, for reachable targets, a square root of the last factor
        std::vector<int> sq_of(n, -1);          // a square root for each square
        std::vector<int> squares;
        for (int i = 0; i < n; ++i) {
            int s = table_[i][i];
            if (sq_of[s] < 0) {
                sq_of[s] = i;
                squares.push_back(s);
            }
        }
        // BFS over products of squares; prev[x] = predecessor product, via[x] = square appended
        std::vector<int> depth(n, -1), prev(n, -1), via(n, -1);
        std::vector<int> frontier;
        for (int s : squares) {
            depth[s] = 1;
            via[s] = s;
            frontier.push_back(s);
        }
        for (int len = 1; len < max_length && !frontier.empty(); ++len) {
            std::vector<int> next;
            for (int x : frontier) {
                for (int s : squares) {
                    int y = table_[x][s];
                    if (depth[y] < 0) {
                        depth[y] = len + 1;
                        prev[y] = x;
                        via[y] = s;
                        next.push_back(y);
                    }
                }
            }
            frontier = std::move(next);
        }
        for (int i = 0; i < n; ++i) {
            SquareGenEntry e;
            e.element = el(i);
            e.reachable = depth[i] > 0;
            if (e.reachable) {
                std::vector<int> chain;
                for (int x = i; x >= 0 && via[x] >= 0; x = prev[x])
                    chain.push_back(sq_of[via[x]]);
                std::reverse(chain.begin(), chain.end());
                for (int r : chain) e.roots.push_back(el(r));
            } else {
                rep.all_reachable = false;
            }
            rep.entries.push_back(std::move(e));
        }
        return rep;
    }

    std::string describe() const {
        switch (kind_) {
            case CarrierKind::FiniteTable:
                return "finite(" + std::to_string(labels_.size()) + ")";
            case CarrierKind::RatAdd:
                return "rat-add(dim " + std::to_string(dim_) + ")";
            case CarrierKind::NonnegRealMul:
                return "nonneg-real-mul";
        }
        return "?";
    }

private:
    Carrier() = default;

    void check_associative() const {
        const int n = static_cast<int>(labels_.size());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    if (table_[table_[i][j]][k] != table_[i][table_[j][k]])
                        throw Error("non-associative table: (" + labels_[i] + "*" +
                                    labels_[j] + ")*" + labels_[k] + " != " +
                                    labels_[i] + "*(" + labels_[j] + "*" +
                                    labels_[k] + ")");
    }

    void check_window() const {
        for (std::size_t i = 0; i < window_.size(); ++i) {
            if (!contains(window_[i]))
                throw Error("window element outside carrier: " + window_[i].str());
            for (std::size_t j = i + 1; j < window_.size(); ++j)
                if (window_[i] == window_[j])
                    throw Error("duplicate window element: " + window_[i].str());
        }
        if (window_.empty()) throw Error("empty window");
    }

    static std::vector<std::vector<Rational>> default_rat_window(int dim) {
        // 12 small rationals spread around 0 on the first axis, plus unit
        // steps on the remaining axes so additive directions are separated.
        std::vector<Rational> line = {
            Rational(0),      Rational(1),      Rational(-1),    Rational(1, 2),
            Rational(-1, 2),  Rational(3, 2),   Rational(2),     Rational(-2),
            Rational(5, 2),   Rational(3),      Rational(-3, 2), Rational(7, 2)};
        std::vector<std::vector<Rational>> w;
        for (std::size_t i = 0; i < line.size(); ++i) {
            std::vector<Rational> v(dim, Rational(0));
            v[0] = line[i];
            for (int k = 1; k < dim; ++k)
                v[k] = line[(i + static_cast<std::size_t>(k)) % line.size()] *
                       Rational(1, 2);
            w.push_back(std::move(v));
        }
        return w;
    }

    CarrierKind kind_ = CarrierKind::FiniteTable;
    std::vector<std::string> labels_;
    std::vector<std::vector<int>> table_;
    int dim_ = 0;
    std::vector<Element> window_;
};

using CarrierPtr = std::shared_ptr<const Carrier>;

inline CarrierPtr make_carrier(Carrier c) {
    return std::make_shared<const Carrier>(std::move(c));
}

}  // namespace cslab
