#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "fracsob.h"

namespace {

struct GridHandle {
    fs_grid* g = nullptr;
    ~GridHandle() { fs_grid_destroy(g); }
};
struct FuncHandle {
    fs_func* f = nullptr;
    ~FuncHandle() { fs_func_destroy(f); }
};

std::vector<std::vector<std::string>> parse_csv(const char* text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace

TEST_CASE("grid lifecycle and validation") {
    GridHandle h;
    CHECK(fs_grid_create(1, 64, &h.g) == FS_OK);
    CHECK(fs_grid_dim(h.g) == 1);
    CHECK(fs_grid_points_per_axis(h.g) == 64);

    fs_grid* bad = nullptr;
    CHECK(fs_grid_create(3, 64, &bad) == FS_ERR_CONFIG);
    CHECK(std::strlen(fs_last_error()) > 0);
    CHECK(fs_grid_create(1, 48, &bad) == FS_ERR_CONFIG);
}

TEST_CASE("synthesis, samples, norms") {
    GridHandle h;
    REQUIRE(fs_grid_create(1, 64, &h.g) == FS_OK);
    FuncHandle f;
    REQUIRE(fs_func_synthesize(h.g, "spec:{k=0:1}", &f.f) == FS_OK);
    CHECK(fs_func_size(f.f) == 64);

    std::vector<double> re(64), im(64);
    CHECK(fs_func_samples(f.f, re.data(), im.data()) == FS_OK);
    CHECK(re[10] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(im[10]) < 1e-13);

    double value = 0.0;
    CHECK(fs_norm(f.f, "Lp:p=2", &value) == FS_OK);
    CHECK(value == doctest::Approx(1.0).epsilon(1e-13));

    CHECK(fs_norm(f.f, "Nonsense:p=2", &value) == FS_ERR_CONFIG);
    FuncHandle bad;
    CHECK(fs_func_synthesize(h.g, "rand:band=64,seed=1", &bad.f) == FS_ERR_CONFIG);
}

TEST_CASE("potential operators through the C surface") {
    GridHandle h;
    REQUIRE(fs_grid_create(1, 64, &h.g) == FS_OK);
    FuncHandle f;
    REQUIRE(fs_func_synthesize(h.g, "rand:band=8,seed=3,zero-mean", &f.f) == FS_OK);

    FuncHandle ident;
    REQUIRE(fs_potential(f.f, "bessel:s=0", &ident.f) == FS_OK);
    std::vector<double> re0(64), re1(64);
    fs_func_samples(f.f, re0.data(), nullptr);
    fs_func_samples(ident.f, re1.data(), nullptr);
    for (int i = 0; i < 64; ++i) CHECK(re1[i] == doctest::Approx(re0[i]).epsilon(1e-13));

    FuncHandle riesz;
    CHECK(fs_potential(f.f, "riesz:s=0.5", &riesz.f) == FS_OK);
    FuncHandle grad;
    CHECK(fs_potential(f.f, "dgrad:s=0.5,j=0", &grad.f) == FS_OK);
    FuncHandle bad;
    CHECK(fs_potential(f.f, "warp:s=1", &bad.f) == FS_ERR_CONFIG);

    // mean guard surfaces as a config error without the project flag
    FuncHandle with_mean;
    REQUIRE(fs_func_synthesize(h.g, "rand:band=8,seed=3", &with_mean.f) == FS_OK);
    FuncHandle out;
    CHECK(fs_potential(with_mean.f, "riesz:s=0.5", &out.f) == FS_ERR_CONFIG);
    CHECK(fs_potential(with_mean.f, "riesz:s=0.5,project", &out.f) == FS_OK);
}

TEST_CASE("kernel and sequence norms") {
    double v = 0.0;
    CHECK(fs_bessel_kernel(1.0, 0.5, 1, &v) == FS_OK);
    CHECK(v == doctest::Approx(0.079710670782930459).epsilon(1e-8));
    CHECK(fs_bessel_kernel(-1.0, 0.5, 1, &v) == FS_ERR_CONFIG);

    const double xs[3] = {1.0, 1.0, 1.0};
    CHECK(fs_sequence_norm_lsq(xs, 3, 1.0, 2.0, &v) == FS_OK);
    CHECK(v == doctest::Approx(std::sqrt(21.0)).epsilon(1e-13));
}

TEST_CASE("rearrangement CSV") {
    GridHandle h;
    REQUIRE(fs_grid_create(1, 64, &h.g) == FS_OK);
    FuncHandle f;
    REQUIRE(fs_func_synthesize(h.g, "ind:[0.25,0.5)", &f.f) == FS_OK);
    char* csv = nullptr;
    REQUIRE(fs_rearrangement_csv(f.f, &csv) == FS_OK);
    auto rows = parse_csv(csv);
    fs_string_free(csv);
    REQUIRE(rows.size() == 65);
    CHECK(rows[0][0] == "t_right");
    CHECK(std::stod(rows[1][1]) == doctest::Approx(1.0));   // first 16 steps at height 1
    CHECK(std::stod(rows[17][1]) == doctest::Approx(0.0));  // then zero
}

TEST_CASE("K curve CSV on (L1, Linf) matches the indicator closed form") {
    GridHandle h;
    REQUIRE(fs_grid_create(1, 64, &h.g) == FS_OK);
    FuncHandle f;
    REQUIRE(fs_func_synthesize(h.g, "ind:[0,0.25),l2=1", &f.f) == FS_OK);
    // height a with ||u||_2 = 1 over measure 1/4  ->  a = 2
    char* csv = nullptr;
    REQUIRE(fs_kcurve_csv(f.f, "L1-Linf,tmin=0.001,tmax=10,perdecade=8", &csv) == FS_OK);
    auto rows = parse_csv(csv);
    fs_string_free(csv);
    REQUIRE(rows.size() > 2);
    CHECK(rows[0][0] == "t");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double t = std::stod(rows[i][0]);
        const double k = std::stod(rows[i][1]);
        CHECK(k == doctest::Approx(2.0 * std::min(t, 0.25)).epsilon(1e-10));
    }

    char* env = nullptr;
    REQUIRE(fs_kcurve_csv(f.f, "L2-Hs2:s=0.5,tmin=0.01,tmax=10,perdecade=4", &env) == FS_OK);
    auto erows = parse_csv(env);
    fs_string_free(env);
    REQUIRE(erows[0].size() == 6);  // t,K,split0,split1,K2,sqrt2K2
    for (std::size_t i = 1; i < erows.size(); ++i) {
        const double k = std::stod(erows[i][1]);
        const double k2 = std::stod(erows[i][4]);
        const double k2hi = std::stod(erows[i][5]);
        CHECK(k >= k2 * (1.0 - 5e-3));
        CHECK(k <= k2hi * (1.0 + 5e-3));
    }

    char* bad = nullptr;
    CHECK(fs_kcurve_csv(f.f, "L3-couple", &bad) == FS_ERR_CONFIG);
}

TEST_CASE("K curve over the Lebesgue/Sobolev couple via the first-order solver") {
    GridHandle h;
    REQUIRE(fs_grid_create(1, 32, &h.g) == FS_OK);
    FuncHandle f;
    REQUIRE(fs_func_synthesize(h.g, "rand:band=6,seed=4", &f.f) == FS_OK);
    char* csv = nullptr;
    REQUIRE(fs_kcurve_csv(f.f, "Lp-W1p:p=2,tmin=0.01,tmax=10,perdecade=4", &csv) == FS_OK);
    auto rows = parse_csv(csv);
    fs_string_free(csv);
    CHECK(rows.size() > 8);  // header plus the validated curve
}

TEST_CASE("experiment runner end to end") {
    char* report = nullptr;
    char* csv = nullptr;
    int pass = -1;
    const char* cfg = R"({"tag":"FFTC","n":1,"N":32,"s":0.5,"seed":9,"ensemble":4})";
    REQUIRE(fs_experiment_run(cfg, &report, &csv, &pass) == FS_OK);
    CHECK(pass == 1);
    std::string json = report;
    CHECK(json.find("\"schema\": \"report-v1\"") != std::string::npos);
    CHECK(json.find("\"pass\": true") != std::string::npos);
    fs_string_free(report);
    fs_string_free(csv);

    // regime mismatch surfaces as config error (exit code 2 at the CLI)
    const char* mismatched =
        R"({"tag":"FSET-subcritical","n":1,"N":32,"s":0.7,"p":2,"ensemble":4})";
    CHECK(fs_experiment_run(mismatched, &report, &csv, &pass) == FS_ERR_CONFIG);
    const char* unknown = R"({"tag":"FFTC","wibble":3})";
    CHECK(fs_experiment_run(unknown, &report, &csv, &pass) == FS_ERR_CONFIG);
}
