#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shearmix/profiles.hpp"

namespace shearmix::cli {

using KeyValues = std::map<std::string, std::string>;

/// Every knob of a run.  Unset m / samples take the subcommand default in
/// resolve().
struct RunConfig {
    std::string subcommand;
    std::string model = "pierrehumbert";
    std::string f1;  // custom model: "identity" or "cos=a0,a1,...;sin=b1,..."
    std::string f2;
    double T = 10.0;
    std::uint64_t seed = 20240917;
    std::optional<std::uint64_t> m;
    std::optional<std::uint64_t> samples;
    std::uint64_t grid = 256;
    double beta = 0.2;
    std::vector<double> h{0.1, 0.25, 0.5};
    std::vector<double> radii;  // empty: dyadic default
    std::string out = "shearmix_out";
    std::vector<double> T_grid;  // lyapunov sweep; empty: {T}
    bool horizontal_only = false;
    double eps0 = 0.1;
    double s_star = 0.5;
    double a = 0.1;
    double c0 = 1.0;
    std::string u0 = "sine:2";
    double threshold = 1.0;
    double ball_q = 1.5707963267948966;
    double ball_p = 1.5707963267948966;
    double ball_radius = 0.05;
    std::string chain = "one_point";
    std::vector<double> start;   // steer; empty: drawn from the seed
    std::vector<double> target;
    std::uint64_t n_steps = 6;
    double t_cap = 2.0;

    bool operator==(const RunConfig&) const = default;
};

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s{"simulate", "lyapunov", "hypotheses", "drift", "correlations", "steer", "mix"};
    return s;
}

/// Canonical key=value form (sorted keys, round-trip number formatting).
KeyValues to_kv(const RunConfig& c);
/// Throws ConfigError naming the offending key.
RunConfig from_kv(const KeyValues& kv);

/// Parse the key=value text format: one pair per line, '#' starts a comment.
KeyValues parse_kv_text(const std::string& text);
std::string format_kv_text(const KeyValues& kv);

/// Fill subcommand defaults and validate.
RunConfig resolve(RunConfig c);

/// Build the model named by the config.
Model make_model(const RunConfig& c);
/// "identity" or "cos=...;sin=..." (either list optional).
ShearProfile parse_profile(const std::string& spec, const std::string& field);

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& c);

}  // namespace shearmix::cli
