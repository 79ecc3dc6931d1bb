#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = finslerlab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(FINSLERLAB_TEST_DATA) + "/" + name; }

}  // namespace

TEST_CASE("cli metric validate exit codes") {
  const Outcome klein = run({"metric", "validate", data("klein2.json"), "--samples", "100"});
  CHECK(klein.code == 0);
  CHECK(klein.doc()["passed"] == true);
  CHECK(klein.doc()["seed"] == 1);
  const Outcome randers = run({"metric", "validate", data("randers_oversized.json")});
  CHECK(randers.code == 2);
  CHECK(randers.doc()["violations"][0].get<std::string>().find("convexity violation") != std::string::npos);
  const Outcome malformed = run({"metric", "validate", data("malformed.json")});
  CHECK(malformed.code == 64);
  CHECK(malformed.err.find("parse error") != std::string::npos);
  CHECK(run({"metric", "validate"}).code == 64);
  CHECK(run({"frobnicate"}).code == 64);
  CHECK(run({"distance", data("klein2.json"), "--from", "0,0", "--to", "0.5"}).code == 64);
}

TEST_CASE("cli geodesic trace") {
  const Outcome line = run({"geodesic", "trace", data("euclid2.json"), "--x0", "0,0", "--y0", "3,4", "--length", "0.9",
                            "--step", "0.45"});
  CHECK(line.code == 0);
  std::istringstream in(line.out);
  std::string row;
  std::getline(in, row);
  CHECK(row == "# seed=1");
  std::getline(in, row);
  CHECK(row == "s,x1,x2,y1,y2,F_residual");
  int rows = 0;
  while (std::getline(in, row)) {
    std::vector<double> cols;
    std::stringstream ss(row);
    for (std::string cell; std::getline(ss, cell, ',');) cols.push_back(std::stod(cell));
    CHECK(std::abs(cols[1] - 0.6 * cols[0]) <= 1e-10);
    CHECK(std::abs(cols[2] - 0.8 * cols[0]) <= 1e-10);
    ++rows;
  }
  CHECK(rows == 3);

  const Outcome exit = run({"geodesic", "trace", data("funk2.json"), "--x0", "0,0", "--y0", "1,0", "--length", "-5"});
  CHECK(exit.code == 3);
  CHECK(exit.err.find("domain exit at arc length -0.69") != std::string::npos);
}

TEST_CASE("cli curvature report") {
  const Outcome flat = run({"curvature", "report", data("euclid2.json"), "--x", "0.1,0.2", "--y", "1,0"});
  CHECK(flat.code == 0);
  for (const auto& f : flat.doc()["flags"]) CHECK(std::abs(f["K"].get<double>()) <= 1e-12);
  const Outcome klein = run({"curvature", "report", data("klein2.json"), "--x", "0.1,0.2", "--y", "1,0", "--flag", "0,1",
                             "--flag", "1,1"});
  CHECK(klein.doc()["flags"].size() == 2);
  for (const auto& f : klein.doc()["flags"]) CHECK(std::abs(f["K"].get<double>() + 1.0) <= 1e-6);
  const Outcome funk = run({"curvature", "report", data("funk2.json"), "--x", "0.3,-0.2", "--y", "0.2,1"});
  for (const auto& f : funk.doc()["flags"]) CHECK(std::abs(f["K"].get<double>() + 0.25) <= 1e-6);
  CHECK(std::abs(funk.doc()["classification"]["ricci_factor"].get<double>() + 0.25) <= 1e-6);
}

TEST_CASE("cli einstein check") {
  CHECK(std::abs(run({"einstein", "check", data("klein2.json")}).doc()["c"].get<double>() - 1.0) <= 1e-4);
  CHECK(std::abs(run({"einstein", "check", data("klein3.json")}).doc()["c"].get<double>() - std::sqrt(2.0)) <= 1e-4);
  const json flat = run({"einstein", "check", data("euclid2.json")}).doc();
  CHECK(flat["is_einstein"] == true);
  CHECK(std::abs(flat["factor"].get<double>()) <= 1e-12);
  CHECK(flat["c"].is_null());
}

TEST_CASE("cli distance") {
  const json d = run({"distance", data("klein2.json"), "--from", "0,0", "--to", "0.5,0"}).doc();
  CHECK(std::abs(d["d_F"].get<double>() - 0.5493061) <= 1e-7);
  const json m = run({"distance", data("klein2.json"), "--from", "0,0", "--to", "0.5,0", "--pseudo"}).doc();
  CHECK(std::abs(m["d_M"].get<double>() - 1.0986123) <= 1e-7);
  const json z = run({"distance", data("klein2.json"), "--from", "0.2,0.1", "--to", "0.2,0.1", "--pseudo"}).doc();
  CHECK(z["d_F"].get<double>() == 0.0);
  CHECK(z["d_M"].get<double>() == 0.0);
  const Outcome nc = run({"distance", data("curved2.json"), "--from", "0,0", "--to", "0.3,0", "--pseudo"});
  CHECK(nc.code == 0);
  CHECK(nc.doc()["theoretical_available"] == false);
  CHECK(nc.err.find("theoretical value unavailable") != std::string::npos);
}

TEST_CASE("cli theorem1 verify") {
  const Outcome k1 = run({"theorem1", "verify", data("klein2.json"), "--pairs", "5"});
  CHECK(k1.code == 0);
  CHECK(k1.doc()["summary"]["max_discrepancy"].get<double>() <= 1e-4);
  CHECK(k1.doc()["summary"]["pair_count"] == 5);
  const Outcome k2 = run({"theorem1", "verify", data("klein2.json"), "--pairs", "3", "--funk-k", "2"});
  CHECK(std::abs(k2.doc()["summary"]["factor"].get<double>() - 1.0) <= 1e-8);
  const Outcome nc = run({"theorem1", "verify", data("curved2.json"), "--pairs", "3"});
  CHECK(nc.code == 4);
  CHECK(nc.err.find("theoretical value unavailable") != std::string::npos);
}

TEST_CASE("cli projective compare") {
  const json h = run({"projective", "compare", data("klein2.json"), data("klein2_scaled.json"), "--samples", "10"}).doc();
  CHECK(h["related"] == true);
  CHECK(h["homothetic"] == true);
  CHECK(std::abs(h["homothety_ratio"].get<double>() - 2.0) <= 1e-10);
  const json kf = run({"projective", "compare", data("klein2.json"), data("funk2.json"), "--samples", "10"}).doc();
  CHECK(kf["related"] == true);
  CHECK(kf["homothetic"] == false);
  const json kc = run({"projective", "compare", data("klein2.json"), data("curved2.json"), "--samples", "10"}).doc();
  CHECK(kc["related"] == false);
}

TEST_CASE("cli output is deterministic and honours --out and threads") {
  const std::vector<std::string> args{"--seed", "17", "einstein", "check", data("funk2.json"), "--samples", "10"};
  const Outcome a = run(args), b = run(args);
  CHECK(a.out == b.out);
  CHECK(a.doc()["seed"] == 17);

  const auto path = std::filesystem::temp_directory_path() / "finslerlab_cli_out.json";
  const Outcome written = run({"--out", path.string(), "distance", data("klein2.json"), "--from", "0,0", "--to", "0.5,0"});
  CHECK(written.code == 0);
  CHECK(written.out.empty());
  std::ifstream file(path);
  CHECK(std::abs(json::parse(file)["d_F"].get<double>() - 0.5493061) <= 1e-7);
  std::filesystem::remove(path);

  const std::vector<std::string> chains{"distance", data("klein2.json"), "--from", "0,0", "--to", "0.4,0.2",
                                        "--pseudo", "--random-chains", "8"};
  const Outcome serial = run(chains);
  setenv("FINSLERLAB_THREADS", "3", 1);
  const Outcome parallel = run(chains);
  unsetenv("FINSLERLAB_THREADS");
  CHECK(serial.out == parallel.out);
}
