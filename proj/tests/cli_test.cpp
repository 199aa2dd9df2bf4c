#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"

using nlohmann::json;
using testutil::run_cli;

namespace {

std::string spath(const char* file) {
    return testutil::surface_path(file);
}

std::string write_temp(const char* name, const std::string& text) {
    std::string path = std::string("/tmp/") + name;
    std::ofstream out(path);
    out << text;
    return path;
}

} // namespace

TEST_CASE("compute reports invariants at a point") {
    testutil::CliResult human = run_cli(
        "compute --surface " + spath("sphere.srf") + " --point 1,0,0,0,0,0");
    CHECK(human.code == 0);
    CHECK(human.out.find("Levi curvature") != std::string::npos);

    testutil::CliResult r = run_cli("compute --surface " + spath("sphere.srf") +
                                    " --point 1,0,0,0,0,0 --json --no-timing");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["tool_version"] == "1.0.0");
    CHECK(j["surface"]["name"] == "sphere");
    CHECK(j["surface"]["n"] == 2);
    CHECK(j["command"] == "compute");
    CHECK_FALSE(j.contains("timing_ms"));
    const json& res = j["results"];
    CHECK(res["pivot"] == 1);
    CHECK(std::abs(res["grad_norm"].get<double>() - 2.0) < 1e-12);
    CHECK(std::abs(res["H"].get<double>() - 1.0) < 1e-12);
    CHECK(std::abs(res["H_closed_form"].get<double>() - 1.0) < 1e-12);
    CHECK(std::abs(res["H_real"].get<double>() - 1.0) < 1e-12);
    CHECK(std::abs(res["h_TT"].get<double>() - 1.0) < 1e-12);
    REQUIRE(res["levi_eigs"].size() == 2);
    REQUIRE(res["shape_eigs"].size() == 5);
    for (const json& e : res["shape_eigs"])
        CHECK(std::abs(e.get<double>() - 1.0) < 1e-12);
    // complex entries are [re, im] pairs
    CHECK(std::abs(res["metric"][0][0][0].get<double>() - 0.5) < 1e-12);
    CHECK(std::abs(res["metric"][0][0][1].get<double>()) < 1e-12);
    CHECK(res["hesse_gap"].get<double>() < 1e-12);

    testutil::CliResult timed = run_cli(
        "compute --surface " + spath("sphere.srf") + " --point 1,0,0,0,0,0 --json");
    CHECK(json::parse(timed.out).contains("timing_ms"));
}

TEST_CASE("check sweeps residuals and reports a verdict") {
    testutil::CliResult r = run_cli("check --surface " + spath("sphere.srf") +
                                    " --samples 30 --json --no-timing");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["command"] == "check");
    const json& res = j["results"];
    CHECK(res["sampled"] == 30);
    CHECK(res["well_conditioned"] == 30);
    CHECK(res["pass"] == true);
    CHECK(res["max_residual"].get<double>() < 1e-9);
    CHECK(res["residuals"].size() == 16);
    for (auto it = res["residuals"].begin(); it != res["residuals"].end(); ++it)
        CHECK(it.value().get<double>() < 1e-9);
}

TEST_CASE("check exits 7 when a residual exceeds the tolerance") {
    // drive the tolerance below floating-point noise; sampling still succeeds
    testutil::CliResult r =
        run_cli("check --surface " + spath("ellipsoid_lm05.srf") +
                " --samples 30 --tol 1e-15 --json --no-timing");
    CHECK(r.code == 7);
    json j = json::parse(r.out);
    CHECK(j["results"]["pass"] == false);
    CHECK(j["results"]["max_residual"].get<double>() > 1e-15);
}

TEST_CASE("check accepts an explicit start point and step") {
    testutil::CliResult r =
        run_cli("check --surface " + spath("sphere.srf") +
                " --samples 15 --start 2,0,0,0,0,0 --step 0.02");
    CHECK(r.code == 0);
    testutil::CliResult far =
        run_cli("check --surface " + spath("sphere.srf") +
                " --samples 15 --start 9,0,0,0,0,0 --max-iter 1");
    CHECK(far.code == 4);
}

TEST_CASE("classify emits verdict and parameters") {
    testutil::CliResult r = run_cli("classify --surface " + spath("sphere.srf") +
                                    " --samples 40 --json --no-timing");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    const json& res = j["results"];
    CHECK(res["kind"] == "Sphere");
    CHECK(std::abs(res["params"]["radius"].get<double>() - 1.0) < 1e-8);
    for (const json& c : res["params"]["center"]) {
        CHECK(std::abs(c[0].get<double>()) < 1e-8);
        CHECK(std::abs(c[1].get<double>()) < 1e-8);
    }
    CHECK(res["diagnostics"]["case_label"] == "A");
    CHECK(res["diagnostics"]["orientation_flipped"] == false);

    testutil::CliResult cyl = run_cli(
        "classify --surface " + spath("cylinder_m2.srf") + " --json --no-timing");
    REQUIRE(cyl.code == 0);
    json jc = json::parse(cyl.out);
    CHECK(jc["results"]["kind"] == "HermitianCylinder");
    CHECK(jc["results"]["params"]["m"] == 1);
    CHECK(std::abs(jc["results"]["params"]["radius"].get<double>() - 1.0) < 1e-6);
}

TEST_CASE("classify exit codes") {
    CHECK(run_cli("classify --surface " + spath("plane.srf")).code == 5);
    CHECK(run_cli("classify --surface " + spath("sphere.srf") + " --samples 5")
              .code == 1);
}

TEST_CASE("scan writes a CSV of per-sample invariants") {
    std::string csv = "/tmp/levi_cli_scan.csv";
    std::remove(csv.c_str());
    testutil::CliResult r =
        run_cli("scan --surface " + spath("sphere.srf") +
                " --samples 20 --csv " + csv + " --json --no-timing");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["results"]["count"] == 20);
    CHECK(std::abs(j["results"]["H_mean"].get<double>() - 1.0) < 1e-9);
    CHECK(j["results"]["H_dev"].get<double>() < 1e-10);
    CHECK(j["results"]["umbilical_dev"].get<double>() < 1e-10);

    std::ifstream in(csv);
    REQUIRE(in.good());
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    REQUIRE(lines.size() == 21);
    CHECK(lines[0] ==
          "index,re_z1,im_z1,re_z2,im_z2,re_z3,im_z3,H,levi_1,levi_2,h_TT,"
          "umbilical_dev");
    for (size_t i = 1; i < lines.size(); ++i) {
        std::stringstream row(lines[i]);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 12);
        CHECK(std::abs(std::stod(cells[7]) - 1.0) < 1e-9); // H column
        CHECK(std::stod(cells[11]) < 1e-10);               // umbilical deviation
    }

    testutil::CliResult bad =
        run_cli("scan --surface " + spath("sphere.srf") +
                " --samples 10 --csv /nonexistent_dir/out.csv");
    CHECK(bad.code == 6);
}

TEST_CASE("errors map to documented exit codes") {
    // malformed expression -> parse failure
    std::string bad = write_temp("levi_cli_bad.srf", "n = 2\nF = z1 +\n");
    CHECK(run_cli("compute --surface " + bad + " --point 1,0,0,0,0,0").code == 2);
    // F not real-valued -> rejected at load time
    std::string unreal = write_temp("levi_cli_unreal.srf", "n = 2\nF = z1 - 1\n");
    CHECK(run_cli("compute --surface " + unreal + " --point 1,0,0,0,0,0").code == 2);
    // point not on the surface
    CHECK(run_cli("compute --surface " + spath("sphere.srf") +
                  " --point 2,0,0,0,0,0")
              .code == 3);
    // wrong coordinate count
    CHECK(run_cli("compute --surface " + spath("sphere.srf") + " --point 1,0")
              .code == 3);
    // no usable starting point anywhere
    CHECK(run_cli("check --surface " + spath("empty.srf")).code == 4);
    // unclassifiable verdict
    CHECK(run_cli("classify --surface " + spath("plane.srf")).code == 5);
    // usage errors
    CHECK(run_cli("compute --surface " + spath("sphere.srf")).code == 1);
    CHECK(run_cli("check").code == 1);
    CHECK(run_cli("frobnicate --surface x").code == 1);
    CHECK(run_cli("").code == 1);
    CHECK(run_cli("--help").code == 0);
    // unreadable file is an I/O error, not a parse error
    CHECK(run_cli("check --surface /no/such/file.srf").code == 3);
}

TEST_CASE("reports are byte-identical for a fixed seed") {
    std::string args = "classify --surface " + spath("tube.srf") +
                       " --samples 25 --seed 3 --json --no-timing";
    testutil::CliResult a = run_cli(args);
    testutil::CliResult b = run_cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);

    // the parallel residual sweep must not change the bytes either
    std::string check_args = "check --surface " + spath("ellipsoid_l03.srf") +
                             " --samples 20 --seed 5 --json --no-timing";
    setenv("LEVI_THREADS", "1", 1);
    testutil::CliResult one = run_cli(check_args);
    setenv("LEVI_THREADS", "3", 1);
    testutil::CliResult three = run_cli(check_args);
    unsetenv("LEVI_THREADS");
    REQUIRE(one.code == 0);
    CHECK(one.out == three.out);
}
