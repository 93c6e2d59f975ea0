#include "shearmix_cli/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "shearmix/errors.hpp"
#include "shearmix/observable.hpp"

namespace shearmix::cli {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    char* end = nullptr;
    errno = 0;
    const double d = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(d))
        throw ConfigError(key + ": expected a finite number, got '" + v + "'");
    return d;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    char* end = nullptr;
    errno = 0;
    if (t.empty() || t[0] == '-') throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    const unsigned long long u = std::strtoull(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size() || errno == ERANGE)
        throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    return u;
}

bool to_bool(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
    return out;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

}  // namespace

KeyValues to_kv(const RunConfig& c) {
    KeyValues kv;
    kv["subcommand"] = c.subcommand;
    kv["model"] = c.model;
    kv["f1"] = c.f1;
    kv["f2"] = c.f2;
    kv["T"] = fmt(c.T);
    kv["seed"] = std::to_string(c.seed);
    if (c.m) kv["m"] = std::to_string(*c.m);
    if (c.samples) kv["samples"] = std::to_string(*c.samples);
    kv["grid"] = std::to_string(c.grid);
    kv["beta"] = fmt(c.beta);
    kv["h"] = fmt_list(c.h);
    kv["radii"] = fmt_list(c.radii);
    kv["out"] = c.out;
    kv["T_grid"] = fmt_list(c.T_grid);
    kv["horizontal_only"] = c.horizontal_only ? "true" : "false";
    kv["eps0"] = fmt(c.eps0);
    kv["s_star"] = fmt(c.s_star);
    kv["a"] = fmt(c.a);
    kv["c0"] = fmt(c.c0);
    kv["u0"] = c.u0;
    kv["threshold"] = fmt(c.threshold);
    kv["ball_q"] = fmt(c.ball_q);
    kv["ball_p"] = fmt(c.ball_p);
    kv["ball_radius"] = fmt(c.ball_radius);
    kv["chain"] = c.chain;
    kv["start"] = fmt_list(c.start);
    kv["target"] = fmt_list(c.target);
    kv["n_steps"] = std::to_string(c.n_steps);
    kv["t_cap"] = fmt(c.t_cap);
    return kv;
}

RunConfig from_kv(const KeyValues& kv) {
    RunConfig c;
    for (const auto& [key, v] : kv) {
        if (key == "subcommand") c.subcommand = trim(v);
        else if (key == "model") c.model = trim(v);
        else if (key == "f1") c.f1 = trim(v);
        else if (key == "f2") c.f2 = trim(v);
        else if (key == "T") c.T = to_double(key, v);
        else if (key == "seed") c.seed = to_uint(key, v);
        else if (key == "m") c.m = to_uint(key, v);
        else if (key == "samples") c.samples = to_uint(key, v);
        else if (key == "grid") c.grid = to_uint(key, v);
        else if (key == "beta") c.beta = to_double(key, v);
        else if (key == "h") c.h = to_list(key, v);
        else if (key == "radii") c.radii = to_list(key, v);
        else if (key == "out") c.out = trim(v);
        else if (key == "T_grid") c.T_grid = to_list(key, v);
        else if (key == "horizontal_only") c.horizontal_only = to_bool(key, v);
        else if (key == "eps0") c.eps0 = to_double(key, v);
        else if (key == "s_star") c.s_star = to_double(key, v);
        else if (key == "a") c.a = to_double(key, v);
        else if (key == "c0") c.c0 = to_double(key, v);
        else if (key == "u0") c.u0 = trim(v);
        else if (key == "threshold") c.threshold = to_double(key, v);
        else if (key == "ball_q") c.ball_q = to_double(key, v);
        else if (key == "ball_p") c.ball_p = to_double(key, v);
        else if (key == "ball_radius") c.ball_radius = to_double(key, v);
        else if (key == "chain") c.chain = trim(v);
        else if (key == "start") c.start = to_list(key, v);
        else if (key == "target") c.target = to_list(key, v);
        else if (key == "n_steps") c.n_steps = to_uint(key, v);
        else if (key == "t_cap") c.t_cap = to_double(key, v);
        else throw ConfigError(key + ": unknown configuration key");
    }
    return c;
}

KeyValues parse_kv_text(const std::string& text) {
    KeyValues kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::string format_kv_text(const KeyValues& kv) {
    std::string s;
    for (const auto& [k, v] : kv) s += k + "=" + v + "\n";
    return s;
}

ShearProfile parse_profile(const std::string& spec, const std::string& field) {
    const std::string t = trim(spec);
    if (t == "identity") return ShearProfile::circle_identity();
    if (t == "sin") return ShearProfile::sine();
    if (t.empty()) throw ConfigError(field + ": profile required for the custom model");
    std::vector<double> cos_c, sin_c;
    bool any = false;
    std::stringstream ss(t);
    std::string part;
    while (std::getline(ss, part, ';')) {
        part = trim(part);
        if (part.empty()) continue;
        const auto eq = part.find('=');
        const std::string name = eq == std::string::npos ? "" : trim(part.substr(0, eq));
        if (name != "cos" && name != "sin")
            throw ConfigError(field + ": expected 'identity' or 'cos=a0,a1,...;sin=b1,...', got '" + spec + "'");
        auto list = to_list(field, part.substr(eq + 1));
        (name == "cos" ? cos_c : sin_c) = std::move(list);
        any = true;
    }
    if (!any) throw ConfigError(field + ": empty profile");
    try {
        return ShearProfile::trig(cos_c, sin_c);
    } catch (const ConfigError& e) {
        throw ConfigError(field + ": " + e.what());
    }
}

Model make_model(const RunConfig& c) {
    if (c.model == "pierrehumbert") return pierrehumbert();
    if (c.model == "chirikov") return chirikov_analog();
    if (c.model == "custom") return {"custom", parse_profile(c.f1, "f1"), parse_profile(c.f2, "f2")};
    throw ConfigError("model: expected pierrehumbert, chirikov or custom, got '" + c.model + "'");
}

RunConfig resolve(RunConfig c) {
    const auto& subs = subcommands();
    require(std::find(subs.begin(), subs.end(), c.subcommand) != subs.end(),
            "subcommand: unknown subcommand '" + c.subcommand + "'");
    const std::string& s = c.subcommand;
    auto def = [](std::optional<std::uint64_t>& f, std::uint64_t v) {
        if (!f) f = v;
    };
    if (s == "simulate") def(c.m, 100), def(c.samples, 4);
    if (s == "lyapunov") def(c.m, 1000), def(c.samples, 200);
    if (s == "hypotheses") def(c.samples, 10000);
    if (s == "drift") def(c.samples, 10000);
    if (s == "correlations") def(c.m, 30), def(c.samples, 10000);
    if (s == "mix") def(c.m, 20);

    make_model(c);
    require(c.T >= 0.0, "T: must be >= 0");
    if (s == "simulate" || s == "lyapunov" || s == "correlations" || s == "mix")
        require(*c.m >= 1, "m: m >= 1 required");
    if (s == "simulate") require(*c.samples >= 1, "samples: samples >= 1 required");
    if (s == "lyapunov" || s == "drift" || s == "correlations") require(*c.samples >= 2, "samples: samples >= 2 required");
    if (s == "hypotheses") require(*c.samples >= 1, "samples: samples >= 1 required");
    require(c.grid >= 16, "grid: grid >= 16 required");
    require(c.beta > 0.0 && c.beta < 0.5, "beta: must lie in (0, 1/2)");
    require(!c.h.empty() && std::all_of(c.h.begin(), c.h.end(), [](double v) { return v > 0.0; }),
            "h: positive values required");
    for (std::size_t i = 0; i < c.radii.size(); ++i) {
        require(c.radii[i] > 0.0, "radii: positive values required");
        require(i == 0 || c.radii[i] < c.radii[i - 1], "radii: must be strictly descending");
    }
    require(std::all_of(c.T_grid.begin(), c.T_grid.end(), [](double v) { return v >= 0.0; }), "T_grid: values must be >= 0");
    require(c.eps0 > 0.0, "eps0: must be positive");
    require(c.s_star > 0.0, "s_star: must be positive");
    require(c.a > 0.0, "a: must be positive");
    require(c.c0 >= 1.0, "c0: must be >= 1");
    Observable::parse(c.u0);
    require(c.threshold > 0.0, "threshold: must be positive");
    require(c.ball_radius > 0.0, "ball_radius: must be positive");
    require(c.chain == "one_point" || c.chain == "projective" || c.chain == "two_point",
            "chain: expected one_point, projective or two_point");
    const std::size_t dim = c.chain == "one_point" ? 2 : c.chain == "projective" ? 3 : 4;
    require(c.start.empty() || c.start.size() == dim, "start: expected " + std::to_string(dim) + " values");
    require(c.target.empty() || c.target.size() == dim, "target: expected " + std::to_string(dim) + " values");
    require(c.n_steps >= 1, "n_steps: must be >= 1");
    require(c.t_cap > 0.0, "t_cap: must be positive");
    require(!c.out.empty(), "out: output directory required");
    return c;
}

std::string config_hash(const RunConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : format_kv_text(to_kv(c))) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace shearmix::cli
