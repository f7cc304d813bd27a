#pragma once

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include "ckn/params.hpp"
#include "ckn/poincare.hpp"
#include "ckn/ratio.hpp"
#include "ckn/transforms.hpp"

namespace ckn {

using Json = nlohmann::ordered_json;

inline Json to_json(const Rational& r) { return r.str(); }

inline Rational rational_from_json(const Json& j, const std::string& key) {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    throw InputError("field '" + key + "' must be a \"num/den\" string or an integer");
}

inline Json to_json(const ParameterSet& P) {
    Json j;
    j["mode"] = P.mode == Mode::isotropic ? "isotropic" : "anisotropic";
    j["n"] = P.n;
    j["s"] = P.s.str();
    j["p"] = P.p.str();
    j["q"] = P.q.str();
    j["a"] = P.a.str();
    j["gamma1"] = P.gamma1.str();
    j["gamma2"] = P.gamma2.str();
    j["gamma3"] = P.gamma3.str();
    j["alpha"] = P.alpha.str();
    j["mu"] = P.mu.str();
    j["beta"] = P.beta.str();
    return j;
}

/// Missing weight fields default to 0; mode defaults to anisotropic.
inline ParameterSet parameter_set_from_json(const Json& j) {
    if (!j.is_object()) throw InputError("parameter tuple must be a JSON object");
    ParameterSet P;
    if (!j.contains("n") || !j["n"].is_number_integer()) throw InputError("field 'n' must be an integer");
    P.n = j["n"].get<int>();
    auto field = [&](const char* key, bool required) -> Rational {
        if (!j.contains(key)) {
            if (required) throw InputError(std::string("missing field '") + key + "'");
            return Rational(0);
        }
        return rational_from_json(j[key], key);
    };
    P.s = field("s", true);
    P.p = field("p", true);
    P.q = field("q", true);
    P.a = field("a", true);
    P.gamma1 = field("gamma1", false);
    P.gamma2 = field("gamma2", false);
    P.gamma3 = field("gamma3", false);
    P.alpha = field("alpha", false);
    P.mu = field("mu", false);
    P.beta = field("beta", false);
    std::string mode = j.value("mode", std::string("anisotropic"));
    if (mode == "isotropic") {
        P.mode = Mode::isotropic;
    } else if (mode == "anisotropic") {
        P.mode = Mode::anisotropic;
    } else {
        throw InputError("mode must be 'isotropic' or 'anisotropic'");
    }
    P.validate();
    return P;
}

inline Json to_json(const ConditionEntry& e) {
    return Json{{"id", std::string(to_string(e.id))},
                {"satisfied", e.satisfied},
                {"slack", e.slack.str()},
                {"relation", std::string(to_string(e.relation))}};
}

inline Json to_json(const ConditionReport& r) {
    Json entries = Json::array();
    for (const auto& e : r.entries) entries.push_back(to_json(e));
    return Json{{"verdict", std::string(to_string(r.verdict))}, {"conditions", entries}};
}

inline Json to_json(const TransformedParams& t) {
    Json aux = Json::object();
    for (const auto& [k, v] : t.aux) aux[k] = v.str();
    return Json{{"kind", std::string(to_string(t.kind))},
                {"source", to_json(t.source)},
                {"target", to_json(t.target)},
                {"aux", aux}};
}

inline Json to_json(const SplitResult& r) {
    auto part = [](const SplitPart& x) {
        return Json{{"a", x.a.str()}, {"alpha", x.alpha.str()}, {"s", x.s.str()}, {"gamma1", x.gamma1.str()}};
    };
    return Json{{"kind", "SPLIT"}, {"first", part(r.first)}, {"second", part(r.second)}, {"step", r.step.str()}};
}

/// Finite doubles as numbers; NaN and infinities as null.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const Domain& d) { return d.str(); }

inline Json to_json(const FamilyInstance& F) {
    return Json{{"kind", std::string(to_string(F.kind()))},
                {"n", F.n()},
                {"parameter", number(F.parameter())},
                {"amplitude", number(F.amplitude())}};
}

inline Json to_json(const RatioSample& s) {
    return Json{{"t", number(s.t)},
                {"lhs", number(s.lhs)},
                {"grad_factor", number(s.grad_factor)},
                {"q_factor", number(s.q_factor)},
                {"ratio", number(s.ratio)}};
}

inline Json to_json(const SweepResult& r) {
    Json samples = Json::array();
    for (const auto& s : r.samples) samples.push_back(to_json(s));
    return Json{{"family", std::string(to_string(r.kind))},
                {"slope", number(r.slope)},
                {"slope_stderr", number(r.slope_stderr)},
                {"r_squared", number(r.r_squared)},
                {"max_ratio", number(r.max_ratio())},
                {"samples", samples}};
}

inline Json to_json(const NecessityEntry& e) {
    Json j{{"condition", std::string(to_string(e.condition))},
           {"family", std::string(to_string(e.family))},
           {"predicted", e.predicted ? Json(e.predicted->str()) : Json(nullptr)},
           {"fitted", number(e.fitted)},
           {"confirmed", e.confirmed}};
    if (!e.note.empty()) j["note"] = e.note;
    if (e.sweep) j["sweep"] = to_json(*e.sweep);
    return j;
}

inline Json to_json(const NecessityReport& r) {
    Json entries = Json::array();
    for (const auto& e : r.entries) entries.push_back(to_json(e));
    return Json{{"all_confirmed", r.all_confirmed()}, {"entries", entries}};
}

inline Json to_json(const ConstantEstimate& c) {
    Json per = Json::array();
    for (const auto& f : c.per_family) {
        Json j{{"family", std::string(to_string(f.family))}};
        if (f.skipped.empty()) {
            j["sup"] = number(f.sup);
            j["at"] = number(f.at);
        } else {
            j["skipped"] = f.skipped;
        }
        per.push_back(j);
    }
    return Json{{"value", number(c.value)},
                {"family", std::string(to_string(c.family))},
                {"at", number(c.at)},
                {"per_family", per}};
}

inline Json to_json(const PoincareResult& r) {
    return Json{{"power_mean", number(r.power_mean)},
                {"deviation_norm", number(r.deviation_norm)},
                {"gradient_norm", number(r.gradient_norm)},
                {"ratio", number(r.ratio)},
                {"deviation_integral", number(r.deviation_integral)},
                {"gradient_integral", number(r.gradient_integral)},
                {"integral_ratio", number(r.integral_ratio)},
                {"subunit_p", r.subunit_p}};
}

inline Json to_json(const CorollaryReport& r) {
    return Json{{"lhs", number(r.lhs)},
                {"mean_term", number(r.mean_term)},
                {"gradient_term", number(r.gradient_term)},
                {"constant", number(r.constant)},
                {"holds", r.holds}};
}

/// Shortest round-trip decimal form.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Header t,lhs,grad_factor,q_factor,ratio; one row per sample.
inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
    os << "t,lhs,grad_factor,q_factor,ratio\n";
    for (const auto& s : r.samples) {
        os << format_double(s.t) << ',' << format_double(s.lhs) << ',' << format_double(s.grad_factor) << ','
           << format_double(s.q_factor) << ',' << format_double(s.ratio) << '\n';
    }
}

}  // namespace ckn
