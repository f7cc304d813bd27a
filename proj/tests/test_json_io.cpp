#include <gtest/gtest.h>

#include <sstream>

#include "ckn/json_io.hpp"

using namespace ckn;

namespace {

ParameterSet strengthened_hardy() {
    return parameter_set_from_json(Json::parse(
        R"({"n":3,"s":"2","p":"2","q":"2","a":"1","gamma1":"-1/2","gamma2":"-1/2","alpha":"-1/2","mu":"1/2"})"));
}

}  // namespace

TEST(Tuple, RoundTrip) {
    auto P = strengthened_hardy();
    auto Q = parameter_set_from_json(to_json(P));
    EXPECT_EQ(to_json(P), to_json(Q));
    EXPECT_EQ(Q.gamma3, Rational(0));
    EXPECT_EQ(Q.mode, Mode::anisotropic);
    EXPECT_EQ(to_json(P)["mu"], "1/2");
}

TEST(Tuple, IntegersAccepted) {
    auto P = parameter_set_from_json(Json::parse(R"({"mode":"isotropic","n":3,"s":2,"p":2,"q":2,"a":1,"gamma1":-1})"));
    EXPECT_EQ(P.gamma1, Rational(-1));
    EXPECT_EQ(check(P).verdict, Verdict::holds);
}

TEST(Tuple, Errors) {
    EXPECT_THROW(parameter_set_from_json(Json::parse("[]")), InputError);
    EXPECT_THROW(parameter_set_from_json(Json::parse(R"({"s":"1","p":"1","q":"1","a":"0"})")), InputError);
    EXPECT_THROW(parameter_set_from_json(Json::parse(R"({"n":2,"p":"1","q":"1","a":"0"})")), InputError);
    EXPECT_THROW(parameter_set_from_json(Json::parse(R"({"n":2,"s":0.5,"p":"1","q":"1","a":"0"})")), InputError);
    EXPECT_THROW(parameter_set_from_json(Json::parse(R"({"n":2,"s":"1/0","p":"1","q":"1","a":"0"})")), InputError);
    EXPECT_THROW(parameter_set_from_json(Json::parse(R"({"n":2,"s":"1","p":"1","q":"1","a":"0","mode":"x"})")),
                 InputError);
}

TEST(Report, ConditionReport) {
    auto j = to_json(check(strengthened_hardy()));
    EXPECT_EQ(j["verdict"], "HOLDS");
    bool saw_a5 = false;
    for (const auto& e : j["conditions"]) {
        if (e["id"] == "A5") {
            saw_a5 = true;
            EXPECT_EQ(e["slack"], "0");
            EXPECT_EQ(e["relation"], "=0");
        }
    }
    EXPECT_TRUE(saw_a5);
}

TEST(Numbers, NonFiniteBecomeNull) {
    EXPECT_TRUE(number(std::nan("")).is_null());
    EXPECT_TRUE(number(kInfinity).is_null());
    EXPECT_EQ(number(0.5).get<double>(), 0.5);
}

TEST(Numbers, ShortestRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 2.5e-300, 12345.678}) EXPECT_EQ(std::stod(format_double(v)), v);
    EXPECT_EQ(format_double(0.125), "0.125");
}

TEST(Sweep, JsonAndCsv) {
    SweepResult r;
    r.kind = FamilyKind::cone_collapse;
    r.slope = -0.1;
    for (int i = 0; i < 4; ++i) r.samples.push_back({0.5 / (1 << i), 1.0, 2.0, 3.0, 1.0 / 6 * (i + 1)});
    auto j = to_json(r);
    EXPECT_EQ(j["family"], "CONE_COLLAPSE");
    EXPECT_EQ(j["samples"].size(), 4u);
    EXPECT_DOUBLE_EQ(j["max_ratio"].get<double>(), 4.0 / 6);
    std::ostringstream csv;
    write_sweep_csv(csv, r);
    std::istringstream lines(csv.str());
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    EXPECT_EQ(header, "t,lhs,grad_factor,q_factor,ratio");
    EXPECT_EQ(first, "0.5,1,2,3," + format_double(1.0 / 6));
}

TEST(Necessity, EntryWithoutSweep) {
    NecessityEntry e;
    e.condition = ConditionId::A7;
    e.family = FamilyKind::dyadic_sum;
    e.note = "DYADIC_SUM not applicable";
    NecessityReport r;
    r.entries.push_back(e);
    auto j = to_json(r);
    EXPECT_FALSE(j["all_confirmed"].get<bool>());
    EXPECT_TRUE(j["entries"][0]["predicted"].is_null());
    EXPECT_TRUE(j["entries"][0]["fitted"].is_null());
    EXPECT_FALSE(j["entries"][0].contains("sweep"));
    EXPECT_EQ(j["entries"][0]["note"], "DYADIC_SUM not applicable");
}

TEST(Constant, SkippedFamilies) {
    ConstantEstimate c;
    c.value = 1.5;
    c.family = FamilyKind::radial_log;
    c.per_family.push_back({FamilyKind::radial_log, 1.5, 1e-4, ""});
    c.per_family.push_back({FamilyKind::cyl_log, 0, 0, "diverges"});
    auto j = to_json(c);
    EXPECT_EQ(j["per_family"][0]["sup"], 1.5);
    EXPECT_EQ(j["per_family"][1]["skipped"], "diverges");
    EXPECT_FALSE(j["per_family"][1].contains("sup"));
}

TEST(Poincare, ResultFields) {
    auto g = GridFunction::uniform(1, 8);
    g.sample([](std::span<const double> x) { return 2.0 + x[0]; });
    auto j = to_json(grid_poincare_ratio(g, 1.0, 0.5));
    EXPECT_TRUE(j["subunit_p"].get<bool>());
    for (const char* key : {"power_mean", "deviation_norm", "gradient_norm", "ratio", "integral_ratio"}) {
        EXPECT_TRUE(j[key].is_number()) << key;
    }
    auto c = to_json(corollary_bound(g, 2.0, 1.0, 1.0));
    EXPECT_TRUE(c["holds"].get<bool>());
}

TEST(Domain, SerialisesAsSpec) {
    EXPECT_EQ(to_json(Domain::cone(0, kInfinity, 0.5)), "CONE:0:inf:0.5");
    EXPECT_EQ(Domain::parse(to_json(Domain::cylinder(0.25, 2)).get<std::string>()).str(), "CYLINDER:0.25:2");
}

TEST(Family, Instance) {
    auto j = to_json(scaled_bump(3, 0.5));
    EXPECT_EQ(j["kind"], "SCALED_BUMP");
    EXPECT_EQ(j["n"], 3);
    EXPECT_EQ(j["parameter"], 0.5);
}
