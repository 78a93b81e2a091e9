#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <isoboltz/grid.hpp>

using namespace isoboltz;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "isoboltz_test_grid";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("grid geometry") {
    Grid g{3, 32, 8.0};
    CHECK(g.h() == 0.5);
    CHECK(g.cell() == 0.125);
    CHECK(g.size() == 32768);
    CHECK(g.coord(0, 0) == -8.0);
    CHECK(g.coord(0, 16) == 0.0);
    for (std::size_t i : {std::size_t{0}, std::size_t{12345}, g.size() - 1}) CHECK(g.flat(g.index(i)) == i);
    auto v = g.node(g.flat({16, 17, 15}));
    CHECK(v == Point{0.0, 0.5, -0.5});

    Grid shifted{2, 8, 1.0, {1.0, -2.0, 0.0}};
    CHECK(shifted.node(0) == Point{0.0, -3.0, 0.0});
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS((Grid{3, 7, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((Grid{3, 6, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((Grid{4, 8, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((Grid{2, 8, 0.0}.validate()), DomainError);
    CHECK_NOTHROW((Grid{1, 10, 1.0}.validate()));
}

TEST_CASE("gaussian moments on the grid") {
    Grid g{3, 32, 8.0};
    Field f = build_field(g, Gaussian{2.0, {0.5, 0.0, -0.25}, 1.0});
    auto r = diagnostics(f, 0.0, {2.0});
    CHECK_THAT(r.mass, WithinRel(2.0, 1e-12));
    CHECK_THAT(r.momentum[0], WithinRel(1.0, 1e-10));
    CHECK_THAT(r.momentum[2], WithinRel(-0.5, 1e-10));
    CHECK_THAT(r.energy, WithinRel(2.0 * (3.0 + 0.25 + 0.0625), 1e-10));
    double peak = 2.0 * std::pow(2.0 * std::numbers::pi, -1.5);
    CHECK(r.linf <= peak);
    CHECK(r.linf > 0.9 * peak);
    CHECK(r.min_f >= 0.0);
    CHECK_THAT(r.l2, WithinRel(std::sqrt(4.0 * std::pow(4.0 * std::numbers::pi, -1.5)), 1e-10));
}

TEST_CASE("diagnostics of the zero field") {
    Grid g{2, 8, 2.0};
    auto r = diagnostics(Field(g), 0.5, {2.0, 4.0});
    CHECK(r.t == 0.5);
    CHECK(r.mass == 0.0);
    CHECK(r.entropy == 0.0);
    CHECK(r.wsup == std::vector<double>{0.0, 0.0});
}

TEST_CASE("seam node momentum uses the grid center") {
    Grid g{1, 8, 2.0, {1.0, 0.0, 0.0}};
    Field f(g);
    f[0] = 1.0;
    auto r = diagnostics(f, 0.0, {});
    CHECK_THAT(r.momentum[0], WithinAbs(1.0 * g.h(), 1e-15));
}

TEST_CASE("diagnostics csv") {
    CHECK(diagnostics_csv_header(3, {2.0, 4.5}) == "t,mass,p1,p2,p3,energy,entropy,l2,linf,min_f,wsup_2,wsup_4.5");
    DiagnosticsRecord r;
    r.t = 0.1;
    r.mass = 1.0 / 3.0;
    r.momentum = {0.0};
    r.wsup = {2.0};
    auto row = diagnostics_csv_row(r);
    CHECK(row.rfind("0.10000000000000001,0.33333333333333331,0,", 0) == 0);
    CHECK(std::count(row.begin(), row.end(), ',') == 8);
}

TEST_CASE("snapshot round trip") {
    Grid g{2, 10, 3.0, {0.5, -1.0, 0.0}};
    Field f = build_field(g, Gaussian{1.0, {0.2, 0.1, 0.0}, 0.7});
    f[3] = -1e-300;
    auto stem = scratch("snap_rt");
    write_snapshot(stem, f, 0.25, {2, -1.5, 0.5});
    auto s = read_snapshot(stem);
    CHECK(s.field.grid == g);
    CHECK(s.field.values == f.values);
    CHECK(s.t == 0.25);
    CHECK(s.params.gamma == -1.5);
    CHECK(std::filesystem::file_size(stem.string() + ".f64") == 100 * sizeof(double));
}

TEST_CASE("snapshot format errors") {
    Grid g{1, 8, 1.0};
    auto stem = scratch("snap_bad");
    write_snapshot(stem, Field(g, 1.0), 0.0, {1, -0.5, 0.2});
    std::filesystem::resize_file(stem.string() + ".f64", 7 * sizeof(double));
    CHECK_THROWS_AS(read_snapshot(stem), FileFormatError);
    CHECK_THROWS_AS(read_snapshot(scratch("does_not_exist")), FileFormatError);
    std::ofstream(stem.string() + ".json") << "{\"d\": 1}";
    CHECK_THROWS_AS(read_snapshot(stem), FileFormatError);
}

TEST_CASE("file initial condition") {
    Grid g{2, 8, 2.0};
    Field f = build_field(g, Gaussian{});
    auto stem = scratch("ic");
    write_snapshot(stem, f, 0.0, {2, -1.5, 0.5});
    Field back = build_field(g, FileIC{stem.string() + ".json"});
    CHECK(back.values == f.values);
    CHECK_THROWS_AS(build_field(Grid{2, 10, 2.0}, FileIC{stem.string()}), FileFormatError);
}

TEST_CASE("gaussian sum and bad variance") {
    Grid g{1, 96, 12.0};
    GaussianSum gs{{Gaussian{1.0, {-2.0, 0, 0}, 0.5}, Gaussian{0.5, {3.0, 0, 0}, 1.0}}};
    auto r = diagnostics(build_field(g, gs), 0.0, {});
    CHECK_THAT(r.mass, WithinRel(1.5, 1e-12));
    CHECK_THAT(r.momentum[0], WithinRel(-2.0 + 1.5, 1e-10));
    CHECK_THROWS_AS(build_field(g, Gaussian{1.0, {}, 0.0}), DomainError);
}
