#include "doctest.h"

#include <cmath>
#include <string>

#include "vofrac/error.hpp"
#include "vofrac/fast_fl21.hpp"
#include "vofrac/study.hpp"

using namespace vofrac;

namespace {

ConvergenceRow row(int m, int n, double err, double time, std::size_t storage)
{
    ConvergenceRow r;
    r.m = m;
    r.n = n;
    r.error = err;
    r.wall_time = time;
    r.storage = storage;
    return r;
}

} // namespace

TEST_SUITE("study") {

TEST_CASE("ladder parsing")
{
    const auto l = parse_ladder("20:400, 40:1600,80:6400");
    REQUIRE(l.size() == 3);
    CHECK(l[1].m == 40);
    CHECK(l[1].n == 1600);
    const auto bare = parse_ladder("1024,2048");
    CHECK(bare[0].m == 0);
    CHECK(bare[1].n == 2048);
    CHECK(parse_ladder("").empty());
    CHECK_THROWS_AS(validate_ladder({}, StudyKind::kernel_certify), InvalidArgument);
    CHECK_THROWS_AS(parse_ladder("20:x"), InvalidArgument);
    CHECK_THROWS_AS(parse_ladder("20:400,"), InvalidArgument);
}

TEST_CASE("ladder validation")
{
    CHECK_NOTHROW(validate_ladder(parse_ladder("20:400,40:1600"), StudyKind::spacetime_order));
    CHECK_NOTHROW(validate_ladder(parse_ladder("160:40,160:80"), StudyKind::temporal_order));
    CHECK_THROWS_AS(validate_ladder(parse_ladder("20:400"), StudyKind::spacetime_order), InvalidArgument);
    CHECK_THROWS_AS(validate_ladder(parse_ladder("20:400,20:400"), StudyKind::spacetime_order), InvalidArgument);
    CHECK_THROWS_AS(validate_ladder(parse_ladder("20:400,60:400"), StudyKind::scaling), InvalidArgument);
    CHECK_THROWS_AS(validate_ladder(parse_ladder("40:400,20:1600"), StudyKind::agreement), InvalidArgument);
    CHECK_NOTHROW(validate_ladder(parse_ladder("100,1000"), StudyKind::kernel_certify));
    CHECK_THROWS_AS(validate_ladder(parse_ladder("1000,100"), StudyKind::coefficient_audit), InvalidArgument);
}

TEST_CASE("names round trip")
{
    for (StudyKind k : {StudyKind::temporal_order, StudyKind::spacetime_order, StudyKind::scaling,
                        StudyKind::agreement, StudyKind::kernel_certify, StudyKind::coefficient_audit})
        CHECK(parse_study_kind(to_string(k)) == k);
    for (ProblemId p : {ProblemId::example1_2d, ProblemId::example2_3d, ProblemId::scalar_ode})
        CHECK(parse_problem_id(to_string(p)) == p);
    CHECK_THROWS_AS(parse_study_kind("bogus"), InvalidArgument);
}

TEST_CASE("epsilon policy")
{
    const EpsilonPolicy dt2 = EpsilonPolicy::parse("dt2");
    CHECK(dt2.dt_squared);
    CHECK(dt2.resolve(0.5, 0.75, 1e-2) == default_epsilon(0.5, 0.75, 1e-2));
    const EpsilonPolicy fixed = EpsilonPolicy::parse("1e-8");
    CHECK_FALSE(fixed.dt_squared);
    CHECK(fixed.resolve(0.5, 0.75, 1e-2) == 1e-8);
    CHECK_THROWS_AS(EpsilonPolicy::parse("0.9"), InvalidArgument);
    CHECK_THROWS_AS(EpsilonPolicy::parse("-1"), InvalidArgument);
}

TEST_CASE("orders from errors")
{
    ConvergenceReport r;
    r.rows = {row(20, 400, 1.6e-5, 0.1, 10), row(40, 1600, 1e-6, 0.4, 20), row(80, 6400, 2.5e-7, 1.6, 40)};
    fill_orders(r);
    CHECK_FALSE(r.rows[0].order);
    CHECK(*r.rows[1].order == doctest::Approx(4.0));
    CHECK(*r.rows[2].order == doctest::Approx(2.0));
    CHECK(r.ok());

    r.rows[1].error.reset();
    r.rows[1].failure = "cap";
    fill_orders(r);
    CHECK_FALSE(r.rows[1].order);
    CHECK_FALSE(r.rows[2].order);
    CHECK_FALSE(r.ok());
}

TEST_CASE("csv")
{
    SUBCASE("empty report is header only")
    {
        CHECK(to_csv(ConvergenceReport{}) == "m,n,error,order,wall_time_s,storage_scalars\n");
        CHECK(parse_csv(to_csv(ConvergenceReport{})).rows.empty());
    }
    SUBCASE("round trip")
    {
        ConvergenceReport r;
        r.rows = {row(20, 400, 1.14216e-6, 0.25, 1234), row(40, 1600, 7.28991e-8, 1.5, 5678)};
        fill_orders(r);
        const std::string text = to_csv(r);
        CHECK(text.find("20,400,1.14216e-06,,0.25,1234\n") != std::string::npos);
        const ConvergenceReport back = parse_csv(text);
        REQUIRE(back.rows.size() == 2);
        CHECK(*back.rows[0].error == doctest::Approx(1.14216e-6));
        CHECK_FALSE(back.rows[0].order);
        CHECK(*back.rows[1].order == doctest::Approx(*r.rows[1].order).epsilon(1e-5));
        CHECK(back.rows[1].storage == 5678);
        CHECK(to_csv(back) == text);
    }
    SUBCASE("failed rung")
    {
        ConvergenceReport r;
        ConvergenceRow bad;
        bad.m = 10;
        bad.n = 100;
        bad.failure = "storage";
        r.rows = {bad};
        CHECK(to_csv(r) == "m,n,error,order,wall_time_s,storage_scalars\n10,100,-,-,-,-\n");
        const ConvergenceReport back = parse_csv(to_csv(r));
        REQUIRE(back.rows.size() == 1);
        CHECK_FALSE(back.rows[0].error);
        CHECK_FALSE(back.ok());
    }
    SUBCASE("malformed input")
    {
        CHECK_THROWS_AS(parse_csv("a,b\n"), InvalidArgument);
        CHECK_THROWS_AS(parse_csv("m,n,error,order,wall_time_s,storage_scalars\n1,2,3\n"), InvalidArgument);
    }
}

TEST_CASE("markdown table")
{
    ConvergenceReport r;
    r.rows = {row(20, 400, 1.14216e-6, 0.25, 1234), row(40, 1600, 7.28991e-8, 1.5, 5678)};
    fill_orders(r);
    StudySpec spec;
    const std::string md = to_markdown(r, spec);
    CHECK(md.find("| 20 | 400 | 1.1422e-06 | - |") != std::string::npos);
    CHECK(md.find("| 40 | 1600 | 7.2899e-08 | 3.97 |") != std::string::npos);
}

TEST_CASE("small scalar study end to end")
{
    StudySpec spec;
    spec.kind = StudyKind::temporal_order;
    spec.problem = ProblemId::scalar_ode;
    spec.scheme = Scheme::direct;
    spec.ladder = parse_ladder("64,128,256");
    spec.order = "const:0.5";
    const ConvergenceReport r = run_study(spec);
    REQUIRE(r.ok());
    REQUIRE(r.rows.size() == 3);
    CHECK(*r.rows[2].order > 2.0);
}

TEST_CASE("storage cap marks the rung failed")
{
    StudySpec spec;
    spec.kind = StudyKind::spacetime_order;
    spec.problem = ProblemId::example1_2d;
    spec.scheme = Scheme::direct;
    spec.ladder = parse_ladder("6:10,12:40");
    spec.max_storage = 2000;
    const ConvergenceReport r = run_study(spec);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].error);
    CHECK_FALSE(r.rows[1].error);
    CHECK_FALSE(r.rows[1].failure.empty());
}

}
