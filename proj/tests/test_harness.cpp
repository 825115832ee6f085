#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "syk/harness.hpp"
#include "syk/io.hpp"
#include "syk/model.hpp"

using namespace syk;
using doctest::Approx;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json slurp_json(const std::string& path) { return json::parse(slurp(path)); }

// rows of a CSV file, split into fields, header dropped
std::vector<std::vector<std::string>> csv_rows(const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(path));
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        fields.push_back(cur);
        rows.push_back(std::move(fields));
    }
    return rows;
}

} // namespace

TEST_CASE("no subcommand prints help and succeeds") {
    CHECK(run_cli({}) == 0);
    CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("constants command writes the radius sheet") {
    const std::string dir = oracle::fresh_dir("cli-constants");
    const std::string out = dir + "/constants.json";
    REQUIRE(run_cli({"constants", "--q", "4", "--out", out}) == 0);
    const json j = slurp_json(out);
    CHECK(j["q"] == 4);
    CHECK(j["alpha"] == 4);
    CHECK(j["whp_radius"].get<double>() == Approx(0.21163944296584375).epsilon(1e-15));
    CHECK(j["lambda_gamma_annealed"].get<double>() == 0.125);

    // metadata sidecar names the command
    CHECK(slurp(out + ".meta.json").find("\"constants\"") != std::string::npos);
}

TEST_CASE("exact command reproduces the single-string closed form") {
    const std::string dir = oracle::fresh_dir("cli-exact");
    const std::string out = dir + "/exact.json";
    REQUIRE(run_cli({"exact", "--n", "8", "--q", "4", "--zero-couplings", "--obs", "1*0,1",
                     "--lambda", "1", "--beta", "1.0", "--out", out}) == 0);
    const json j = slurp_json(out);
    CHECK(j["dim"] == 16);
    CHECK(j["e_min"].get<double>() == Approx(-0.5).epsilon(1e-12));
    CHECK(j["e_max"].get<double>() == Approx(0.5).epsilon(1e-12));
    CHECK(j["spectral_norm"].get<double>() == Approx(0.5).epsilon(1e-12));
    CHECK(j["z"].get<double>() == Approx(std::cosh(0.5)).epsilon(1e-12));
    CHECK(j["log_z"].get<double>() == Approx(std::log(std::cosh(0.5))).epsilon(1e-12));
    CHECK(j["obs_expectation"].get<double>() ==
          Approx(-0.5 * std::tanh(0.5)).epsilon(1e-12));
}

TEST_CASE("estimate command: zero Hamiltonian control run with verification") {
    const std::string dir = oracle::fresh_dir("cli-estimate");
    const std::string inst_path = dir + "/zero.inst";
    save_instance(zero_instance(12, 4), inst_path);
    const std::string out = dir + "/est.json";
    REQUIRE(run_cli({"estimate", "--instance", inst_path, "--obs", "1*0,1,2,3", "--beta", "0.1",
                     "--epsilon", "0.05", "--kmax", "40", "--verify", "--out", out}) == 0);
    const json j = slurp_json(out);
    CHECK(j["n"] == 12);
    CHECK(j["h"].get<double>() == 4.3402777777777778e-4);
    CHECK(j["K"].get<int>() >= 1);
    CHECK(std::abs(j["estimate"].get<double>()) <= 0.05);
    CHECK(std::abs(j["exact"].get<double>()) <= 1e-12);
    CHECK(j["within_epsilon"].get<bool>());
    CHECK(j["mu_bare"].size() == static_cast<std::size_t>(j["K"].get<int>()) + 1);
}

TEST_CASE("estimate command rejects misuse with exit code 2") {
    const std::string dir = oracle::fresh_dir("cli-estimate-err");
    // lambda is chosen internally
    CHECK(run_cli({"estimate", "--n", "12", "--q", "4", "--obs", "1*0,1,2,3", "--lambda", "0.5",
                   "--beta", "0.1", "--epsilon", "0.05", "--out", dir + "/a.json"}) == 2);
    // beta beyond the q = 4 ceiling
    CHECK(run_cli({"estimate", "--n", "12", "--q", "4", "--obs", "1*0,1,2,3", "--beta", "0.25",
                   "--epsilon", "0.05", "--out", dir + "/b.json"}) == 2);
    // no observable
    CHECK(run_cli({"estimate", "--n", "12", "--q", "4", "--beta", "0.1", "--epsilon", "0.05",
                   "--out", dir + "/c.json"}) == 2);
    // unknown flag
    CHECK(run_cli({"estimate", "--bogus"}) == 2);
}

TEST_CASE("resource ceilings map to exit codes 3 and 5") {
    const std::string dir = oracle::fresh_dir("cli-budget");
    // needs K in the hundreds, far past the order cap
    CHECK(run_cli({"estimate", "--n", "12", "--q", "4", "--obs", "1*0,1,2,3", "--beta", "0.19",
                   "--epsilon", "1e-9", "--out", dir + "/a.json"}) == 3);
    CHECK(run_cli({"exact", "--n", "26", "--q", "4", "--beta", "0.1", "--out",
                   dir + "/b.json"}) == 5);
}

TEST_CASE("unwritable output maps to exit code 6") {
    CHECK(run_cli({"constants", "--q", "4", "--out",
                   "/nonexistent-sykgibbs-dir/out.json"}) == 6);
}

TEST_CASE("moments runs are byte-reproducible") {
    const std::string dir = oracle::fresh_dir("cli-moments");
    const std::string a = dir + "/a.csv", b = dir + "/b.csv";
    REQUIRE(run_cli({"moments", "--n", "10", "--q", "4", "--seed", "3", "--rmax", "8", "--out",
                     a}) == 0);
    REQUIRE(run_cli({"moments", "--n", "10", "--q", "4", "--seed", "3", "--rmax", "8", "--out",
                     b}) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).rfind("r,mu_r\n", 0) == 0);
    CHECK(csv_rows(a).size() == 9);
    CHECK(slurp(a + ".meta.json").find("\"moments\"") != std::string::npos);
}

TEST_CASE("moments --dense-verify stays within 1e-10 of the dense oracle") {
    const std::string dir = oracle::fresh_dir("cli-moments-dense");
    const std::string out = dir + "/m.csv";
    REQUIRE(run_cli({"moments", "--n", "10", "--q", "4", "--seed", "3", "--rmax", "10",
                     "--dense-verify", "--out", out}) == 0);
    const auto rows = csv_rows(out);
    REQUIRE(rows.size() == 11);
    for (const auto& row : rows) {
        REQUIRE(row.size() == 4);
        CHECK(std::strtod(row[3].c_str(), nullptr) <= 1e-10);
    }
}

TEST_CASE("hex-float CSV parses back to the identical doubles") {
    const std::string dir = oracle::fresh_dir("cli-hex");
    const std::string plain = dir + "/plain.csv", hex = dir + "/hex.csv";
    REQUIRE(run_cli({"moments", "--n", "10", "--q", "4", "--seed", "5", "--rmax", "8", "--out",
                     plain}) == 0);
    REQUIRE(run_cli({"moments", "--n", "10", "--q", "4", "--seed", "5", "--rmax", "8",
                     "--hex-floats", "--out", hex}) == 0);
    CHECK(slurp(hex).find("0x1") != std::string::npos);
    const auto prow = csv_rows(plain), hrow = csv_rows(hex);
    REQUIRE(prow.size() == hrow.size());
    for (std::size_t i = 0; i < prow.size(); ++i) {
        const double pv = std::strtod(prow[i][1].c_str(), nullptr);
        const double hv = std::strtod(hrow[i][1].c_str(), nullptr);
        CHECK(pv == hv); // %.17g and %a both round-trip exactly
    }
}

TEST_CASE("saved instances and observables reproduce the run that made them") {
    const std::string dir = oracle::fresh_dir("cli-roundtrip");
    const std::string m1 = dir + "/m1.csv", m2 = dir + "/m2.csv";
    REQUIRE(run_cli({"moments", "--n", "10", "--q", "4", "--seed", "7", "--save-instance",
                     dir + "/inst.txt", "--out", m1}) == 0);
    REQUIRE(run_cli({"moments", "--instance", dir + "/inst.txt", "--out", m2}) == 0);
    CHECK(slurp(m1) == slurp(m2));

    const Observable obs =
        Observable::from_indices(10, {{{0, 1}, 0.5}, {{2, 3, 4, 5}, -0.25}});
    save_observable(obs, dir + "/obs.txt");
    const std::string o1 = dir + "/o1.csv", o2 = dir + "/o2.csv";
    REQUIRE(run_cli({"moments", "--n", "10", "--q", "4", "--seed", "7", "--lambda", "0.3",
                     "--obs", "0.5*0,1;-0.25*2,3,4,5", "--out", o1}) == 0);
    REQUIRE(run_cli({"moments", "--n", "10", "--q", "4", "--seed", "7", "--lambda", "0.3",
                     "--obs-file", dir + "/obs.txt", "--out", o2}) == 0);
    CHECK(slurp(o1) == slurp(o2));
}

TEST_CASE("a config file section drives a subcommand") {
    const std::string dir = oracle::fresh_dir("cli-config");
    const std::string via_cfg = dir + "/via_config.csv", direct = dir + "/direct.csv";
    write_file(dir + "/run.ini", "[moments]\nn = 10\nq = 4\nseed = 3\nrmax = 6\nout = \"" +
                                     via_cfg + "\"\n");
    REQUIRE(run_cli({"--config", dir + "/run.ini", "moments"}) == 0);
    REQUIRE(run_cli({"moments", "--n", "10", "--q", "4", "--seed", "3", "--rmax", "6", "--out",
                     direct}) == 0);
    CHECK(slurp(via_cfg) == slurp(direct));

    // malformed config: exit 2, no data file written
    write_file(dir + "/bad.ini", "[moments\nn 10 ±±\n");
    const std::string never = dir + "/never.csv";
    CHECK(run_cli({"--config", dir + "/bad.ini", "moments", "--out", never}) == 2);
    CHECK(!std::filesystem::exists(never));
}

TEST_CASE("--dump-config prints the effective configuration without running") {
    const std::string dir = oracle::fresh_dir("cli-dump");
    const std::string out = dir + "/m.csv";
    CHECK(run_cli({"moments", "--n", "10", "--q", "4", "--out", out, "--dump-config"}) == 0);
    CHECK(!std::filesystem::exists(out));
}

TEST_CASE("fluctuations CSV carries one strictly positive deviation per pair") {
    const std::string dir = oracle::fresh_dir("cli-fluct");
    CHECK(run_cli({"fluctuations", "--n", "8", "--q", "4", "--pairs", "5", "--out",
                   dir + "/f.csv"}) == 2); // too few pairs
    const std::string out = dir + "/f10.csv";
    REQUIRE(run_cli({"fluctuations", "--n", "8", "--q", "4", "--seed", "11", "--beta", "0.2",
                     "--pairs", "10", "--out", out}) == 0);
    const auto rows = csv_rows(out);
    REQUIRE(rows.size() == 10);
    for (const auto& row : rows) {
        REQUIRE(row.size() == 4);
        CHECK(std::strtod(row[3].c_str(), nullptr) > 0.0);
    }
    // seeds follow the documented pairing rule
    CHECK(rows[0][1] == "11");
    CHECK(rows[0][2] == "12");
    CHECK(rows[9][1] == "29");
}

TEST_CASE("scan-zeros localizes the cosh zero and flags heavy observables") {
    const std::string dir = oracle::fresh_dir("cli-scan");
    const std::string out = dir + "/scan.csv", summary = dir + "/summary.json";
    const std::vector<std::string> args = {
        "scan-zeros", "--n", "8", "--q", "4", "--zero-couplings", "--obs", "1*0,1,2,3",
        "--lambda", "1", "--radius", "7", "--resolution", "21", "--out", out,
        "--summary-out", summary};
    REQUIRE(run_cli(args) == 0);
    const json j = slurp_json(summary);
    CHECK(j["min_abs"].get<double>() < 0.05);
    CHECK(std::abs(j["argmin_re"].get<double>()) <= 0.4);
    CHECK(std::abs(std::abs(j["argmin_im"].get<double>()) - 2.0 * M_PI) <= 0.4);
    CHECK(j["lambda_warning"].get<bool>()); // lambda Gamma = 1 over the ceiling

    // byte-reproducible rerun
    const std::string out2 = dir + "/scan2.csv";
    std::vector<std::string> args2 = args;
    args2[15] = out2;
    args2[17] = dir + "/summary2.json";
    REQUIRE(run_cli(args2) == 0);
    CHECK(slurp(out) == slurp(out2));
    CHECK(slurp(summary) == slurp(dir + "/summary2.json"));

    const auto rows = csv_rows(out);
    REQUIRE(!rows.empty());
    REQUIRE(rows[0].size() == 6);
    CHECK(slurp(out).rfind("re_beta,im_beta,re_z,im_z,abs_z,certified\n", 0) == 0);
}

TEST_CASE("annealed scan certifies a small disk through the CLI") {
    const std::string dir = oracle::fresh_dir("cli-scan-annealed");
    const std::string out = dir + "/scan.csv", summary = dir + "/summary.json";
    REQUIRE(run_cli({"scan-zeros", "--annealed", "--n", "8", "--q", "4", "--order", "6",
                     "--radius", "0.3", "--resolution", "11", "--out", out, "--summary-out",
                     summary}) == 0);
    const json j = slurp_json(summary);
    CHECK(j["all_certified"].get<bool>());
    CHECK(j["min_abs"].get<double>() > 0.9);
}

TEST_CASE("two-replica command: scope validation and echo ordering") {
    const std::string dir = oracle::fresh_dir("cli-two");
    CHECK(run_cli({"two-replica", "--n", "8", "--q", "4", "--l1", "2", "--l2", "2", "--scope",
                   "bogus", "--out", dir + "/x.json"}) == 2);
    const std::string all = dir + "/all.json", within = dir + "/within.json";
    REQUIRE(run_cli({"two-replica", "--n", "8", "--q", "4", "--l1", "2", "--l2", "2", "--out",
                     all}) == 0);
    REQUIRE(run_cli({"two-replica", "--n", "8", "--q", "4", "--l1", "2", "--l2", "2", "--scope",
                     "within", "--out", within}) == 0);
    const double v_all = slurp_json(all)["value"].get<double>();
    const double v_within = slurp_json(within)["value"].get<double>();
    CHECK(v_within < v_all);
    CHECK(v_all == Approx(coupling_variance(8, 4) * coupling_variance(8, 4) * 5040.0 / 256.0)
                       .epsilon(1e-12));
}

TEST_CASE("concentration command is deterministic for a fixed seed") {
    const std::string dir = oracle::fresh_dir("cli-conc");
    const std::string a = dir + "/a.json", b = dir + "/b.json";
    REQUIRE(run_cli({"concentration", "--n", "8", "--q", "4", "--seed", "5", "--beta-re", "0.1",
                     "--samples", "120", "--out", a}) == 0);
    REQUIRE(run_cli({"concentration", "--n", "8", "--q", "4", "--seed", "5", "--beta-re", "0.1",
                     "--samples", "120", "--out", b}) == 0);
    CHECK(slurp(a) == slurp(b));
    const json j = slurp_json(a);
    CHECK(j["samples"] == 120);
    CHECK(j["ratio"].get<double>() >= 0.0);
    CHECK(run_cli({"concentration", "--n", "8", "--q", "4", "--beta-re", "0.1", "--samples",
                   "10", "--out", dir + "/few.json"}) == 2);
}

TEST_CASE("bench writes its header even though timings vary") {
    const std::string dir = oracle::fresh_dir("cli-bench");
    const std::string out = dir + "/bench.csv";
    REQUIRE(run_cli({"bench", "--n", "10", "--q", "4", "--rmax", "6", "--out", out}) == 0);
    CHECK(slurp(out).rfind("kernel,n,q,param,wall_ms\n", 0) == 0);
    CHECK(csv_rows(out).size() >= 2);
}

TEST_CASE("relative outputs honor SYKGIBBS_OUT_DIR") {
    const std::string dir = oracle::fresh_dir("cli-outdir");
    REQUIRE(setenv("SYKGIBBS_OUT_DIR", dir.c_str(), 1) == 0);
    CHECK(run_cli({"constants", "--q", "4", "--out", "c.json"}) == 0);
    REQUIRE(unsetenv("SYKGIBBS_OUT_DIR") == 0);
    CHECK(std::filesystem::exists(dir + "/c.json"));
}
