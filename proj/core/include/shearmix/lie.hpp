#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "shearmix/profiles.hpp"

namespace shearmix {

/// Base: (q, p).  Lifted and projective: (q, p, u1, u2).  TwoPoint: (q1, p1, q2, p2).
enum class FieldFamily { base, lifted, projective, two_point };

int ambient_dim(FieldFamily fam);
/// Rank needed for the bracket condition (3 for the projective bundle).
int target_rank(FieldFamily fam);
std::string to_string(FieldFamily fam);
FieldFamily parse_family(std::string_view s);

/// A field X1, X2 or a nested bracket of them, e.g. "[X1,[X1,X2]]".
class BracketWord {
public:
    static BracketWord field(int index);
    static BracketWord bracket(const BracketWord& a, const BracketWord& b);
    static BracketWord parse(std::string_view text);

    bool is_field() const { return left_ == nullptr; }
    int index() const { return index_; }
    const BracketWord& left() const { return *left_; }
    const BracketWord& right() const { return *right_; }
    int depth() const;
    std::string str() const;

private:
    int index_ = 0;
    std::shared_ptr<const BracketWord> left_;
    std::shared_ptr<const BracketWord> right_;
};

/// Maximum bracket nesting supported.
inline constexpr int kMaxBracketDepth = 3;

Eigen::VectorXd eval_field(FieldFamily fam, const Model& model, int index, const Eigen::VectorXd& point);

/// Exact evaluation by nested forward-mode differentiation.
/// Convention: [A, B] = DB A - DA B.
Eigen::VectorXd eval_word(FieldFamily fam, const Model& model, const BracketWord& w, const Eigen::VectorXd& point);

/// [A, B] by Richardson-extrapolated central differences (steps 1e-4, 5e-5)
/// of the inner words.
Eigen::VectorXd bracket_fd(FieldFamily fam, const Model& model, const BracketWord& a, const BracketWord& b,
                           const Eigen::VectorXd& point);

/// Hand-derived formula for a word, where one is known for this family and model.
std::optional<Eigen::VectorXd> closed_form(FieldFamily fam, const Model& model, const BracketWord& w,
                                           const Eigen::VectorXd& point);

/// [A, B] from eval_word, cross-checked against bracket_fd (1e-5) and the
/// closed form when available (1e-6).  Throws NumericalIntegrityError on
/// disagreement.
Eigen::VectorXd bracket(FieldFamily fam, const Model& model, const BracketWord& a, const BracketWord& b,
                        const Eigen::VectorXd& point);

struct RankCertificate {
    FieldFamily family = FieldFamily::base;
    Eigen::VectorXd point;
    std::vector<std::string> columns;
    Eigen::MatrixXd matrix;
    Eigen::VectorXd singular_values;
    int rank = 0;
    int target = 0;
    std::optional<double> det;  // square matrices; projective with 3 columns uses rows 0..2
    bool pass = false;
};

RankCertificate rank_certificate(FieldFamily fam, const Model& model, const Eigen::VectorXd& point,
                                 std::span<const BracketWord> columns);

/// X1, X2 and all brackets up to depth 2.
std::vector<BracketWord> default_columns();

enum class HypothesisStatus { established, not_established, not_applicable };
std::string to_string(HypothesisStatus s);

struct HypothesisResult {
    HypothesisStatus status = HypothesisStatus::not_established;
    std::optional<RankCertificate> witness;
    std::size_t points_tried = 0;
    std::string reason;
};

/// Search random points for one where the default columns reach full rank.
HypothesisResult check_hypothesis(FieldFamily fam, const Model& model, std::size_t n_points, std::uint64_t seed);

/// The explicit determinant evaluations for the two named models.
struct ReferenceCase {
    std::string name;
    Model model;
    FieldFamily family;
    Eigen::VectorXd point;
    std::vector<std::string> columns;
};

std::vector<ReferenceCase> reference_cases();

}  // namespace shearmix
