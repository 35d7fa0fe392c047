#include <doctest.h>

#include <algorithm>

#include "orbitport/catalog.hpp"

using namespace orbitport;

namespace {

// Convenience: run an id and demand every check passed, returning the list
// so individual details can still be inspected.
std::vector<CatalogCheck> run_clean(const std::string& id) {
    std::vector<CatalogCheck> checks = run_example(id);
    for (const CatalogCheck& c : checks) {
        INFO(id, " / ", c.name, ": ", c.detail);
        CHECK(c.ok);
    }
    return checks;
}

const CatalogCheck& find_check(const std::vector<CatalogCheck>& checks,
                               const std::string& name) {
    auto it = std::find_if(checks.begin(), checks.end(),
                           [&](const CatalogCheck& c) { return c.name == name; });
    REQUIRE(it != checks.end());
    return *it;
}

} // namespace

TEST_CASE("the catalog lists six entry families") {
    std::vector<std::string> ids = catalog_ids();
    REQUIRE(ids.size() == 6);
    CHECK(std::count(ids.begin(), ids.end(), "cubic_fixed") == 1);
    CHECK(std::count(ids.begin(), ids.end(), "word_seq(<word>)") == 1);
    CHECK(std::count(ids.begin(), ids.end(), "degree6_lamination") == 1);
}

TEST_CASE("entries are fully populated and self-describing") {
    for (const std::string& id :
         {std::string("cubic_fixed"), std::string("cubic_portrait12"),
          std::string("rabbit_rotation"), std::string("word_seq(\"010\")"),
          std::string("e5_quadratic"), std::string("degree6_lamination")}) {
        CatalogEntry e = get_example(id);
        CHECK(e.id == id);
        CHECK(!e.title.empty());
        CHECK(!e.expected.empty());
        CHECK(e.str().find(e.id) == 0);
        CHECK(e.str().find("expected:") != std::string::npos);
        if (e.portrait) CHECK(e.portrait->validate().valid);
        // Combinatorial-only entries carry no sequence; word entries no portrait.
        CHECK((e.sequence.has_value() || e.portrait.has_value()));
    }
}

TEST_CASE("unknown ids and malformed word specs are rejected") {
    CHECK_THROWS_AS(get_example("nope"), UnknownId);
    CHECK_THROWS_AS(get_example(""), UnknownId);
    CHECK_THROWS_AS(get_example("word_seq(\"\")"), UnknownId);
    CHECK_THROWS_AS(get_example("word_seq()"), UnknownId);
    CHECK_THROWS_AS(get_example("word_seq(\"02\")"), UnknownId);
    CHECK_THROWS_AS(get_example("word_seq(01"), UnknownId);
}

TEST_CASE("word ids accept quoted and bare spellings") {
    CatalogEntry quoted = get_example("word_seq(\"01\")");
    CatalogEntry bare = get_example("word_seq(01)");
    CHECK(quoted.id == bare.id);
    CHECK(quoted.sequence->period() == 4); // letters 0,1 across times 1..4
}

TEST_CASE("the constant cubic entry passes its checks") {
    auto checks = run_clean("cubic_fixed");
    CHECK(find_check(checks, "fixed point repelling").detail == "multiplier 1.5");
    CHECK(find_check(checks, "rays 0/1 and 1/2 land at the fixed point").ok);
}

TEST_CASE("the cubic preimage portrait entry passes its checks") {
    auto checks = run_clean("cubic_portrait12");
    CHECK(find_check(checks, "preperiod, period").detail == "1, 1");
    // sqrt(3/2) i to landing precision
    CHECK(find_check(checks, "co-landing point").detail == "0+1.22474i");
}

TEST_CASE("the alternating rabbit entry passes its checks") {
    auto checks = run_clean("rabbit_rotation");
    CHECK(find_check(checks, "rotation to the fixed triple").detail == "1/3");
    CHECK(find_check(checks, "even and odd sets linked").detail == "true");
}

TEST_CASE("a word entry passes its checks") {
    auto checks = run_clean("word_seq(\"01\")");
    CHECK(find_check(checks, "postcritical set on {0, -1}").ok);
    CHECK(find_check(checks, "expansion rate").ok);
}

TEST_CASE("the largest-value-arc entry passes its checks") {
    auto checks = run_clean("e5_quadratic");
    CHECK(find_check(checks, "value arc at time 1").detail == "(4/7, 1/7)");
}

TEST_CASE("the degree-six entry passes its checks") {
    auto checks = run_clean("degree6_lamination");
    CHECK(find_check(checks, "matching count").detail == "132");
    CHECK(find_check(checks, "groups").detail ==
          "{ { {7/36,11/36}*, {13/36,17/36}, {19/36,5/36} }, "
          "{ {23/36,31/36}, {25/36,29/36} }, { {35/36,1/36} } }");
}

TEST_CASE("realized entries keep every critical value arc wide") {
    for (const std::string& id : {std::string("cubic_fixed"),
                                  std::string("cubic_portrait12"),
                                  std::string("rabbit_rotation")}) {
        std::vector<CatalogCheck> checks = run_example(id);
        const CatalogCheck& wide = find_check(checks, "value arcs wide");
        INFO(id, ": ", wide.detail);
        CHECK(wide.ok);
    }
}
