#include <cmath>

#include <gtest/gtest.h>

#include "qrt/symbol.hpp"

using namespace qrt;

TEST(Symbol, ParsesConstant) {
    auto a = parse_symbol(R"({"kind":"const","value":1.0})");
    EXPECT_EQ(a.declared_sup(), 1.0);
    std::vector<double> s = {3.7};
    EXPECT_EQ(a(s), cplx(1.0));
}

TEST(Symbol, CappedPower) {
    auto a = parse_symbol(R"({"kind":"power","coord":0,"exponent":2,"cap":100})");
    EXPECT_EQ(a.declared_sup(), 100.0);
    std::vector<double> s = {2.0}, big = {20.0};
    EXPECT_EQ(a(s), cplx(4.0));
    EXPECT_EQ(a(big), cplx(100.0));
}

TEST(Symbol, BoxOutside) {
    auto a = parse_symbol(R"({"kind":"indicator","lower":[0,0],"upper":[1,1]})");
    std::vector<double> in = {0.5, 0.2}, out = {0.5, 1.2};
    EXPECT_EQ(a(in), cplx(1.0));
    EXPECT_EQ(a(out), cplx(0.0));
}

TEST(Symbol, UnknownKindIsUnsupported) {
    EXPECT_THROW(parse_symbol(R"({"kind":"banana"})"), UnsupportedError);
}

TEST(Symbol, MalformedJsonReportsPosition) {
    try {
        parse_symbol(R"({"kind": "const", "value": })");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(e.position(), ParseError::npos);
    }
}

TEST(Symbol, MissingFieldIsParseError) {
    EXPECT_THROW(parse_symbol(R"({"kind":"power","coord":0,"exponent":2})"), ParseError);
}

TEST(Symbol, ArityMismatch) {
    auto a = parse_symbol(R"({"kind":"indicator","lower":[0,0],"upper":[1,1]})");
    std::vector<double> s = {0.5};
    EXPECT_THROW(a(s), ArityError);
    EXPECT_FALSE(a.conforms(1));
    EXPECT_TRUE(a.conforms(2));
}

TEST(Symbol, RoundTrip) {
    const char* docs[] = {
        R"({"kind":"sum","terms":[{"weight":[0.5,0.25],"expr":{"kind":"sin","coord":0,"freq":2}},{"weight":1,"expr":{"kind":"gauss","coord":1,"scale":0.3}}]})",
        R"({"kind":"grid","edges":[[0,1,3],[0,2]],"values":[1,[0,-1]],"outside":0.5})",
        R"({"kind":"product","factors":[{"kind":"cos","coord":0,"freq":1.5},{"kind":"indicator","coords":[1],"lower":[1],"upper":[null]}]})",
    };
    for (const char* d : docs) {
        auto a = parse_symbol(d);
        auto b = parse_symbol(serialize_symbol(a));
        EXPECT_EQ(serialize_symbol(a), serialize_symbol(b));
        std::vector<double> s = {0.7, 1.9};
        EXPECT_EQ(a(s), b(s));
    }
}

TEST(Symbol, SupBoundsAreUpperBounds) {
    auto a = parse_symbol(
        R"({"kind":"sum","terms":[{"weight":0.5,"expr":{"kind":"cos","coord":0,"freq":2}},{"weight":[0,0.5],"expr":{"kind":"sin","coord":0,"freq":0.7}}]})");
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        std::vector<double> s = {0.01 * i};
        worst = std::max(worst, std::abs(a(s)));
    }
    EXPECT_LE(worst, a.declared_sup());
}

TEST(Lattice, ClosedForm) {
    auto s = parse_lattice(R"({"kind":"closed","expr":{"kind":"sin","coord":0}})");
    EXPECT_NEAR(s({4}).real(), 0.9092974268256817, 1e-15);
}

TEST(Lattice, IndicatorAndTable) {
    auto chi = LatticeFunction::indicator({{3}});
    EXPECT_EQ(chi({3}), cplx(1.0));
    EXPECT_EQ(chi({4}), cplx(0.0));
    auto t = parse_lattice(R"({"kind":"table","dims":[2],"values":[2,5],"tail":0})");
    EXPECT_EQ(t({1}), cplx(5.0));
    EXPECT_EQ(t({7}), cplx(0.0));
    EXPECT_EQ(t.declared_sup(), 5.0);
}

TEST(Lattice, NegativeIndexRejected) {
    auto t = LatticeFunction::table({2}, {1.0, 2.0}, 0.0);
    std::vector<std::int64_t> m = {-1};
    EXPECT_THROW(t(m), ParameterError);
}

TEST(Lattice, ProductOfFactors) {
    auto p = LatticeFunction::product({LatticeFunction::table({3}, {1.0, 2.0, 3.0}, 0.0),
                                       LatticeFunction::table({2}, {5.0, 7.0}, 1.0)});
    EXPECT_EQ(p.arity(), 2u);
    EXPECT_EQ(p({2, 1}), cplx(21.0));
    EXPECT_EQ(p({1, 9}), cplx(2.0));
}

TEST(Partition, Parse) {
    auto n = Partition::parse("2,1");
    EXPECT_EQ(n.k(), 2u);
    EXPECT_EQ(n.total(), 3);
    EXPECT_THROW(Partition::parse("2,x"), ParameterError);
    EXPECT_THROW(Partition::parse("0"), ParameterError);
}
