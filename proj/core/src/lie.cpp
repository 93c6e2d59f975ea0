#include "shearmix/lie.hpp"

#include <array>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "shearmix/chains.hpp"
#include "shearmix/dual.hpp"
#include "shearmix/errors.hpp"
#include "shearmix/rng.hpp"

namespace shearmix {

namespace {

template <class T>
using Vec4 = std::array<T, 4>;

template <class T>
Vec4<T> field_t(FieldFamily fam, const Model& m, int i, const Vec4<T>& x) {
    const T zero(0.0);
    switch (fam) {
        case FieldFamily::base:
            if (i == 1) return {m.f1.eval(x[1]), zero, zero, zero};
            return {zero, m.f2.eval(x[0]), zero, zero};
        case FieldFamily::lifted:
            if (i == 1) return {m.f1.eval(x[1]), zero, m.f1.eval(x[1], 1) * x[3], zero};
            return {zero, m.f2.eval(x[0]), zero, m.f2.eval(x[0], 1) * x[2]};
        case FieldFamily::projective: {
            T w0 = zero;
            T w1 = zero;
            if (i == 1) w0 = m.f1.eval(x[1], 1) * x[3];
            else w1 = m.f2.eval(x[0], 1) * x[2];
            const T s = w0 * x[2] + w1 * x[3];
            if (i == 1) return {m.f1.eval(x[1]), zero, w0 - s * x[2], w1 - s * x[3]};
            return {zero, m.f2.eval(x[0]), w0 - s * x[2], w1 - s * x[3]};
        }
        case FieldFamily::two_point:
            if (i == 1) return {m.f1.eval(x[1]), zero, m.f1.eval(x[3]), zero};
            return {zero, m.f2.eval(x[0]), zero, m.f2.eval(x[2])};
    }
    return {zero, zero, zero, zero};
}

// Budget counts the remaining levels of nested duals.
template <int Budget, class T>
Vec4<T> word_t(FieldFamily fam, const Model& m, const BracketWord& w, const Vec4<T>& x, int dim) {
    if (w.is_field()) return field_t<T>(fam, m, w.index(), x);
    if constexpr (Budget == 0) {
        throw PreconditionError("bracket word deeper than supported");
    } else {
        const Vec4<T> a = word_t<Budget, T>(fam, m, w.left(), x, dim);
        const Vec4<T> b = word_t<Budget, T>(fam, m, w.right(), x, dim);
        Vec4<Dual<T>> xa, xb;
        for (int k = 0; k < 4; ++k) {
            const T dir_a = k < dim ? a[static_cast<std::size_t>(k)] : T(0.0);
            const T dir_b = k < dim ? b[static_cast<std::size_t>(k)] : T(0.0);
            xa[static_cast<std::size_t>(k)] = Dual<T>(x[static_cast<std::size_t>(k)], dir_a);
            xb[static_cast<std::size_t>(k)] = Dual<T>(x[static_cast<std::size_t>(k)], dir_b);
        }
        const Vec4<Dual<T>> db_a = word_t<Budget - 1, Dual<T>>(fam, m, w.right(), xa, dim);
        const Vec4<Dual<T>> da_b = word_t<Budget - 1, Dual<T>>(fam, m, w.left(), xb, dim);
        Vec4<T> out;
        for (std::size_t k = 0; k < 4; ++k) out[k] = db_a[k].d - da_b[k].d;
        return out;
    }
}

Vec4<double> to_array(const Eigen::VectorXd& v, int dim) {
    if (v.size() != dim) throw PreconditionError("point dimension does not match the field family");
    Vec4<double> a{0.0, 0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) a[static_cast<std::size_t>(k)] = v[k];
    return a;
}

Eigen::VectorXd to_vector(const Vec4<double>& a, int dim) {
    Eigen::VectorXd v(dim);
    for (int k = 0; k < dim; ++k) v[k] = a[static_cast<std::size_t>(k)];
    return v;
}

bool is_sine(const ShearProfile& f) { return f == ShearProfile::sine(); }

// Directional derivative of a word along v, Richardson over steps h and h/2.
Eigen::VectorXd directional_fd(FieldFamily fam, const Model& model, const BracketWord& w, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& v) {
    auto central = [&](double h) {
        return ((eval_word(fam, model, w, x + h * v) - eval_word(fam, model, w, x - h * v)) / (2.0 * h)).eval();
    };
    const Eigen::VectorXd d1 = central(1e-4);
    const Eigen::VectorXd d2 = central(5e-5);
    return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

int ambient_dim(FieldFamily fam) { return fam == FieldFamily::base ? 2 : 4; }

int target_rank(FieldFamily fam) {
    switch (fam) {
        case FieldFamily::base: return 2;
        case FieldFamily::projective: return 3;
        default: return 4;
    }
}

std::string to_string(FieldFamily fam) {
    switch (fam) {
        case FieldFamily::base: return "base";
        case FieldFamily::lifted: return "lifted";
        case FieldFamily::projective: return "projective";
        case FieldFamily::two_point: return "two_point";
    }
    return "?";
}

FieldFamily parse_family(std::string_view s) {
    if (s == "base") return FieldFamily::base;
    if (s == "lifted") return FieldFamily::lifted;
    if (s == "projective") return FieldFamily::projective;
    if (s == "two_point") return FieldFamily::two_point;
    throw ConfigError("family: expected base|lifted|projective|two_point, got '" + std::string(s) + "'");
}

BracketWord BracketWord::field(int index) {
    if (index != 1 && index != 2) throw ConfigError("bracket word: field index must be 1 or 2");
    BracketWord w;
    w.index_ = index;
    return w;
}

BracketWord BracketWord::bracket(const BracketWord& a, const BracketWord& b) {
    BracketWord w;
    w.left_ = std::make_shared<const BracketWord>(a);
    w.right_ = std::make_shared<const BracketWord>(b);
    if (w.depth() > kMaxBracketDepth) throw ConfigError("bracket word: nesting deeper than 3");
    return w;
}

BracketWord BracketWord::parse(std::string_view text) {
    std::string s;
    for (char c : text)
        if (c != ' ') s.push_back(c);
    std::size_t pos = 0;
    auto fail = [&]() -> BracketWord { throw ConfigError("bracket word: cannot parse '" + std::string(text) + "'"); };
    auto rec = [&](auto&& self) -> BracketWord {
        if (pos + 1 < s.size() && (s[pos] == 'X' || s[pos] == 'x')) {
            const char d = s[pos + 1];
            pos += 2;
            if (d == '1' || d == '2') return field(d - '0');
            return fail();
        }
        if (pos < s.size() && s[pos] == '[') {
            ++pos;
            BracketWord a = self(self);
            if (pos >= s.size() || s[pos] != ',') return fail();
            ++pos;
            BracketWord b = self(self);
            if (pos >= s.size() || s[pos] != ']') return fail();
            ++pos;
            return bracket(a, b);
        }
        return fail();
    };
    BracketWord w = rec(rec);
    if (pos != s.size()) return fail();
    return w;
}

int BracketWord::depth() const { return is_field() ? 0 : 1 + std::max(left_->depth(), right_->depth()); }

std::string BracketWord::str() const {
    if (is_field()) return "X" + std::to_string(index_);
    return "[" + left_->str() + "," + right_->str() + "]";
}

Eigen::VectorXd eval_field(FieldFamily fam, const Model& model, int index, const Eigen::VectorXd& point) {
    const int dim = ambient_dim(fam);
    return to_vector(field_t<double>(fam, model, index, to_array(point, dim)), dim);
}

Eigen::VectorXd eval_word(FieldFamily fam, const Model& model, const BracketWord& w, const Eigen::VectorXd& point) {
    const int dim = ambient_dim(fam);
    return to_vector(word_t<kMaxBracketDepth, double>(fam, model, w, to_array(point, dim), dim), dim);
}

Eigen::VectorXd bracket_fd(FieldFamily fam, const Model& model, const BracketWord& a, const BracketWord& b,
                           const Eigen::VectorXd& point) {
    const Eigen::VectorXd va = eval_word(fam, model, a, point);
    const Eigen::VectorXd vb = eval_word(fam, model, b, point);
    return directional_fd(fam, model, b, point, va) - directional_fd(fam, model, a, point, vb);
}

std::optional<Eigen::VectorXd> closed_form(FieldFamily fam, const Model& model, const BracketWord& w,
                                           const Eigen::VectorXd& x) {
    using std::cos;
    using std::sin;
    const std::string s = w.str();
    const auto& f1 = model.f1;
    const auto& f2 = model.f2;
    if (s == "[X1,X2]") {
        if (fam == FieldFamily::base) {
            Eigen::VectorXd r(2);
            r << -f1(x[1], 1) * f2(x[0]), f1(x[1]) * f2(x[0], 1);
            return r;
        }
        if (fam == FieldFamily::two_point) {
            Eigen::VectorXd r(4);
            r << -f1(x[1], 1) * f2(x[0]), f1(x[1]) * f2(x[0], 1), -f1(x[3], 1) * f2(x[2]), f1(x[3]) * f2(x[2], 1);
            return r;
        }
        const double q = x[0], p = x[1], u1 = x[2], u2 = x[3];
        const double a = f1(p), a1 = f1(p, 1), a2 = f1(p, 2);
        const double b = f2(q), b1 = f2(q, 1), b2 = f2(q, 2);
        Eigen::VectorXd r(4);
        if (fam == FieldFamily::lifted) {
            r << -a1 * b, a * b1, -a2 * b * u2 - a1 * b1 * u1, b2 * a * u1 + b1 * a1 * u2;
            return r;
        }
        if (std::abs(u1 * u1 + u2 * u2 - 1.0) > 1e-12) return std::nullopt;
        r << -a1 * b, a * b1, -u1 * u1 * u2 * a * b2 - 2.0 * u1 * u2 * u2 * a1 * b1 - u2 * u2 * u2 * b * a2,
            u1 * u1 * u1 * a * b2 + 2.0 * u1 * u1 * u2 * a1 * b1 + u1 * u2 * u2 * b * a2;
        return r;
    }
    if (!is_sine(f1)) return std::nullopt;
    const bool sine_model = is_sine(f2);
    const bool identity_model = f2.is_identity();
    if (fam == FieldFamily::lifted && s == "[X1,[X1,X2]]") {
        const double q = wrap_angle(x[0]), p = x[1], u = x[2], v = x[3];
        Eigen::VectorXd r(4);
        if (sine_model) {
            r << -2.0 * cos(p) * cos(q) * sin(p), -sin(p) * sin(p) * sin(q),
                -2.0 * v * cos(p) * cos(p) * cos(q) + 2.0 * v * cos(q) * sin(p) * sin(p) + u * sin(2.0 * p) * sin(q),
                -sin(p) * (u * cos(q) * sin(p) + 2.0 * v * cos(p) * sin(q));
            return r;
        }
        if (identity_model) {
            r << -2.0 * cos(p) * sin(p), 0.0, -2.0 * v * cos(2.0 * p), 0.0;
            return r;
        }
    }
    if (fam == FieldFamily::two_point) {
        const double q = x[0], p = x[1], q1 = x[2], p1 = x[3];
        Eigen::VectorXd r(4);
        if (sine_model && s == "[[X1,X2],X1]") {
            r << cos(q) * sin(2.0 * p), sin(q) * sin(p) * sin(p), cos(q1) * sin(2.0 * p1), sin(q1) * sin(p1) * sin(p1);
            return r;
        }
        if (identity_model && s == "[X1,[X1,X2]]") {
            r << -sin(2.0 * p), 0.0, -sin(2.0 * p1), 0.0;
            return r;
        }
    }
    return std::nullopt;
}

Eigen::VectorXd bracket(FieldFamily fam, const Model& model, const BracketWord& a, const BracketWord& b,
                        const Eigen::VectorXd& point) {
    const BracketWord w = BracketWord::bracket(a, b);
    const Eigen::VectorXd exact = eval_word(fam, model, w, point);
    const Eigen::VectorXd fd = bracket_fd(fam, model, a, b, point);
    const double fd_err = (exact - fd).lpNorm<Eigen::Infinity>();
    if (!(fd_err <= 1e-5 * (1.0 + exact.lpNorm<Eigen::Infinity>())))
        throw NumericalIntegrityError("bracket " + w.str() + ": derivative routes disagree by " + std::to_string(fd_err));
    if (const auto cf = closed_form(fam, model, w, point)) {
        const double err = (exact - *cf).lpNorm<Eigen::Infinity>();
        if (!(err <= 1e-6))
            throw NumericalIntegrityError("bracket " + w.str() + ": closed form disagrees by " + std::to_string(err));
    }
    return exact;
}

RankCertificate rank_certificate(FieldFamily fam, const Model& model, const Eigen::VectorXd& point,
                                 std::span<const BracketWord> columns) {
    const int dim = ambient_dim(fam);
    RankCertificate c;
    c.family = fam;
    c.point = point;
    c.target = target_rank(fam);
    c.matrix.resize(dim, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const auto& w = columns[j];
        c.columns.push_back(w.str());
        c.matrix.col(static_cast<Eigen::Index>(j)) =
            w.is_field() ? eval_field(fam, model, w.index(), point) : bracket(fam, model, w.left(), w.right(), point);
    }
    const auto ncols = c.matrix.cols();
    if (ncols == dim) c.det = c.matrix.determinant();
    Eigen::MatrixXd m = c.matrix;
    if (fam == FieldFamily::projective) {
        if (ncols == 3) c.det = c.matrix.topRows(3).determinant();
        // Drop the component normal to the fibre circle.
        Eigen::Vector4d n(0.0, 0.0, point[2], point[3]);
        n.normalize();
        m = (Eigen::Matrix4d::Identity() - n * n.transpose()) * m;
    }
    if (ncols == 0) return c;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    c.singular_values = svd.singularValues();
    const double top = c.singular_values.size() ? c.singular_values[0] : 0.0;
    for (Eigen::Index k = 0; k < c.singular_values.size(); ++k)
        if (top > 0.0 && c.singular_values[k] > 1e-8 * top) ++c.rank;
    c.pass = c.rank >= c.target;
    return c;
}

std::vector<BracketWord> default_columns() {
    const auto x1 = BracketWord::field(1);
    const auto x2 = BracketWord::field(2);
    const auto b12 = BracketWord::bracket(x1, x2);
    return {x1, x2, b12, BracketWord::bracket(x1, b12), BracketWord::bracket(x2, b12)};
}

std::string to_string(HypothesisStatus s) {
    switch (s) {
        case HypothesisStatus::established: return "established";
        case HypothesisStatus::not_established: return "not_established";
        case HypothesisStatus::not_applicable: return "not_applicable";
    }
    return "?";
}

HypothesisResult check_hypothesis(FieldFamily fam, const Model& model, std::size_t n_points, std::uint64_t seed) {
    HypothesisResult r;
    if (!check_h1(model.f1).pass || !check_h1(model.f2).pass) {
        r.status = HypothesisStatus::not_applicable;
        r.reason = "(H1) fails for a profile";
        return r;
    }
    const auto F = critical_points(model);
    const auto cols = default_columns();
    const InvariantSet delta = fam == FieldFamily::two_point ? build_invariant_set(model) : InvariantSet{};
    auto admissible = [&](TorusPoint x) {
        for (const auto& c : F)
            if (torus_distance(x, c) < 1e-3) return false;
        // Stay clear of the identity profile's branch cut so derivatives exist.
        if (model.f2.is_identity() && circle_distance(x.q, 0.0) < 1e-3) return false;
        if (model.f1.is_identity() && circle_distance(x.p, 0.0) < 1e-3) return false;
        return true;
    };
    for (std::size_t i = 0; i < n_points; ++i) {
        CounterRng rng(seed, tags::witness, i);
        const TorusPoint x{rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
        const double a = rng.uniform(0.0, kTwoPi);
        const TorusPoint y{rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
        ++r.points_tried;
        if (!admissible(x)) continue;
        Eigen::VectorXd pt(ambient_dim(fam));
        switch (fam) {
            case FieldFamily::base: pt << x.q, x.p; break;
            case FieldFamily::lifted:
            case FieldFamily::projective: pt << x.q, x.p, std::cos(a), std::sin(a); break;
            case FieldFamily::two_point:
                if (!admissible(y) || dist_to_invariant({x, y}, delta) < 1e-3) continue;
                pt << x.q, x.p, y.q, y.p;
                break;
        }
        RankCertificate c = rank_certificate(fam, model, pt, cols);
        if (c.pass) {
            r.status = HypothesisStatus::established;
            r.witness = std::move(c);
            return r;
        }
    }
    r.status = HypothesisStatus::not_established;
    r.reason = "no full-rank point among " + std::to_string(n_points) + " samples";
    return r;
}

std::vector<ReferenceCase> reference_cases() {
    const double s = std::sqrt(2.0) / 2.0;
    Eigen::VectorXd lifted_pt(4), ph_pair(4), ch_pair(4);
    lifted_pt << kPi / 3.0, kPi / 3.0, s, s;
    ph_pair << kPi / 3.0, kPi / 2.0, kPi / 2.0, kPi / 3.0;
    ch_pair << kPi, kPi / 2.0, kPi / 2.0, kPi / 3.0;
    return {
        {"pierrehumbert_lifted", pierrehumbert(), FieldFamily::lifted, lifted_pt, {"X1", "X2", "[X1,X2]", "[X1,[X1,X2]]"}},
        {"pierrehumbert_two_point", pierrehumbert(), FieldFamily::two_point, ph_pair, {"X1", "X2", "[X1,X2]", "[[X1,X2],X1]"}},
        {"chirikov_lifted", chirikov_analog(), FieldFamily::lifted, lifted_pt, {"X1", "X2", "[X1,X2]", "[X1,[X1,X2]]"}},
        {"chirikov_two_point", chirikov_analog(), FieldFamily::two_point, ch_pair, {"X1", "X2", "[X1,X2]", "[X1,[X1,X2]]"}},
    };
}

}  // namespace shearmix
