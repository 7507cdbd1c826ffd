#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "atl/analytic_arrival.hpp"
#include "atl/errors.hpp"
#include "atl/field_io.hpp"
#include "doctest.h"

using namespace atl;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

ScalarField wavy_with_holes(int dim) {
    const GridSpec g = GridSpec::centered_cube(dim, 0.25, 1.0);
    ScalarField f(g, "wavy", 0.0);
    for (std::size_t p = 0; p < g.size(); ++p) {
        const Vec x = g.coord(g.unflatten(p));
        f.values[p] = 0.3 * std::sin(2.0 * x[0]) + 0.7 * x[1] - 0.1 * x[2] * x[2];
        if (p % 11 == 3) f.values[p] = std::numeric_limits<double>::quiet_NaN();
    }
    return f;
}

}  // namespace

TEST_CASE("field dumps reload exactly") {
    for (int dim : {2, 3}) {
        const ScalarField f = wavy_with_holes(dim);
        const std::string path = tmp_path("atl_field_roundtrip.csv");
        write_field_csv(f, path);
        const ScalarField r = read_field_csv(path);
        CHECK(r.grid.dim == f.grid.dim);
        CHECK(r.grid.counts == f.grid.counts);
        for (int a = 0; a < dim; ++a) CHECK(r.grid.origin[a] == f.grid.origin[a]);
        CHECK(r.grid.spacing == doctest::Approx(f.grid.spacing).epsilon(1e-14));
        REQUIRE(r.values.size() == f.values.size());
        for (std::size_t p = 0; p < f.values.size(); ++p) {
            if (std::isnan(f.values[p]))
                CHECK(std::isnan(r.values[p]));
            else
                CHECK(r.values[p] == f.values[p]);
        }
    }
}

TEST_CASE("field dump bytes are deterministic with the documented header") {
    const ScalarField f = wavy_with_holes(2);
    const std::string a = tmp_path("atl_field_a.csv"), b = tmp_path("atl_field_b.csv");
    write_field_csv(f, a);
    write_field_csv(f, b);
    const std::string ta = slurp(a);
    CHECK(ta == slurp(b));
    CHECK(ta.substr(0, ta.find('\n')) == "i,j,x,y,value");
    std::size_t lines = 0;
    for (char c : ta) lines += c == '\n';
    CHECK(lines == f.grid.size() + 1);

    const ScalarField f3 = wavy_with_holes(3);
    const std::string c3 = tmp_path("atl_field_c.csv");
    write_field_csv(f3, c3);
    const std::string tc = slurp(c3);
    CHECK(tc.substr(0, tc.find('\n')) == "i,j,k,x,y,z,value");
}

TEST_CASE("vtk dump uses the structured points preamble with x fastest") {
    const GridSpec g = GridSpec::centered_cube(3, 0.5, 1.0);
    ScalarField f(g, "flat_index", 0.0);
    for (std::size_t p = 0; p < g.size(); ++p) f.values[p] = static_cast<double>(p);
    const std::string path = tmp_path("atl_field.vtk");
    write_field_vtk(f, path);

    std::ifstream in(path);
    std::string line;
    std::vector<std::string> head;
    while (std::getline(in, line)) head.push_back(line);
    REQUIRE(head.size() == 10 + g.size());
    CHECK(head[0] == "# vtk DataFile Version 3.0");
    CHECK(head[1] == "flat_index");
    CHECK(head[2] == "ASCII");
    CHECK(head[3] == "DATASET STRUCTURED_POINTS");
    CHECK(head[4] == "DIMENSIONS 5 5 5");
    CHECK(head[5] == "ORIGIN -1 -1 -1");
    CHECK(head[6] == "SPACING 0.5 0.5 0.5");
    CHECK(head[7] == "POINT_DATA 125");
    CHECK(head[8].rfind("SCALARS value double", 0) == 0);
    CHECK(head[9] == "LOOKUP_TABLE default");
    // Value row 1 (0-based) in x-fastest order is node (1,0,0).
    const double v1 = std::stod(head[10 + 1]);
    CHECK(v1 == static_cast<double>(f.grid.index(Idx{1, 0, 0})));
    // Value row DIMX is node (0,1,0).
    const double v5 = std::stod(head[10 + 5]);
    CHECK(v5 == static_cast<double>(f.grid.index(Idx{0, 1, 0})));
}

TEST_CASE("field reader rejects malformed dumps") {
    CHECK_THROWS_AS(read_field_csv(tmp_path("atl_does_not_exist.csv")), ConfigError);

    const std::string bad_header = tmp_path("atl_bad_header.csv");
    spit(bad_header, "x,y,value\n0,0,0\n");
    CHECK_THROWS_AS(read_field_csv(bad_header), ConfigError);

    // A duplicated node displaces another one, so either the duplicate or
    // the count check trips.
    const std::string dup = tmp_path("atl_dup.csv");
    std::string text = "i,j,x,y,value\n";
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const int ii = (i == 4 && j == 4) ? 0 : i;
            const int jj = (i == 4 && j == 4) ? 0 : j;
            text += std::to_string(ii) + "," + std::to_string(jj) + "," +
                    std::to_string(0.25 * ii) + "," + std::to_string(0.25 * jj) + ",1\n";
        }
    spit(dup, text);
    CHECK_THROWS_AS(read_field_csv(dup), ConfigError);

    const std::string truncated = tmp_path("atl_short.csv");
    spit(truncated, "i,j,x,y,value\n0,0,0,0,1\n4,4,1,1,1\n");
    CHECK_THROWS_AS(read_field_csv(truncated), ConfigError);

    const std::string garbled = tmp_path("atl_garbled.csv");
    spit(garbled, "i,j,x,y,value\n0,zero,0,0,1\n");
    CHECK_THROWS_AS(read_field_csv(garbled), ConfigError);
}

TEST_CASE("critical point table lists location, spectrum, class and residuals") {
    const auto circle = AnalyticArrival::sphere(2, 0.6);
    const auto u = circle.sample(GridSpec::centered_cube(2, 1.0 / 32.0, 0.8), "u");
    const auto pts = find_critical_points(wrap_field(u));
    REQUIRE(pts.size() == 1);
    const std::string path = tmp_path("atl_criticals.csv");
    write_critical_points_csv(pts, 2, path);
    const std::string text = slurp(path);
    const std::string header = text.substr(0, text.find('\n'));
    CHECK(header == "i,j,x,y,lambda_1,lambda_2,class_k,spectrum_residual,equation_residual");
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    CHECK(lines == 2);
    // One spot value: the circle center classifies as the full spherical
    // class with both eigenvalues at -1.
    std::istringstream row(text.substr(text.find('\n') + 1));
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 9);
    CHECK(std::stod(cells[4]) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(std::stod(cells[5]) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(cells[6] == "1");
}
