#include <catch2/catch.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// End-to-end checks of the command-line harness; the binary path comes in
// through PANEL_CLI_PATH from the build.

namespace {

struct CsvFile {
  std::string schema;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

CsvFile parse_csv(const std::string& path) {
  CsvFile f;
  std::ifstream in(path);
  REQUIRE(in);
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line.rfind("# tripanel", 0) == 0);
  f.schema = line;
  REQUIRE(std::getline(in, line));
  f.header = split_csv(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split_csv(line);
    REQUIRE(row.size() == f.header.size());
    f.rows.push_back(std::move(row));
  }
  return f;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PANEL_CLI_PATH) + " " + args + " 2>/dev/null";
  return std::system(cmd.c_str());
}

}  // namespace

TEST_CASE("cli: influence line sweep row count and flags") {
  const std::string out = "cli_influence_test.csv";
  REQUIRE(run_cli("influence --zM 1 --line '-2,-2,-2 2,2,2' --samples 401 --out " + out) == 0);
  const CsvFile f = parse_csv(out);
  CHECK(f.schema == "# tripanel influence v1");
  REQUIRE(f.rows.size() == 401);
  int flagged = 0;
  for (const auto& row : f.rows) {
    REQUIRE(row.size() == 9);
    const double phi = std::stod(row[3]);
    REQUIRE(phi > 0.0);
    if (!row[8].empty()) ++flagged;
  }
  // The midpoint sample lands exactly on the right-angle corner and must be
  // the flagged fallback; every other point on this diagonal is generic.
  CHECK(flagged == 1);
  CHECK(f.rows[200][8].find("corner-limit") != std::string::npos);
  std::remove(out.c_str());
}

TEST_CASE("cli: influence grid") {
  const std::string out = "cli_grid_test.csv";
  REQUIRE(run_cli("influence --zM 10 --grid-plane XZ --samples 11 --out " + out) == 0);
  const CsvFile f = parse_csv(out);
  CHECK(f.rows.size() == 121);
  std::remove(out.c_str());
}

TEST_CASE("cli: validate thresholds") {
  const std::string out = "cli_validate_test.csv";
  REQUIRE(run_cli("validate --zM 10 --samples 160 --out " + out) == 0);
  const CsvFile f = parse_csv(out);
  CHECK(f.schema == "# tripanel validate v1");
  CHECK(f.rows.size() == 160);
  std::remove(out.c_str());
}

TEST_CASE("cli: plate sweep with corner and mesh outputs") {
  const std::string out = "cli_plate_test.csv";
  const std::string corner = "cli_corner_test.csv";
  const std::string mesh = "cli_mesh_test.csv";
  REQUIRE(run_cli("plate --n 2 4 --corner-window 0.72 --out " + out + " --corner-out " +
                  corner + " --mesh-out " + mesh) == 0);
  const CsvFile f = parse_csv(out);
  REQUIRE(f.rows.size() == 2);
  const double cap2 = std::stod(f.rows[0][2]);
  const double cap4 = std::stod(f.rows[1][2]);
  CHECK(cap2 < cap4);  // increasing in refinement
  CHECK(cap2 > 0.2);
  CHECK(cap4 < 0.4);
  const CsvFile fc = parse_csv(corner);
  CHECK(fc.rows.size() >= 4);
  const CsvFile fm = parse_csv(mesh);
  CHECK(fm.rows.size() == 32);
  std::remove(out.c_str());
  std::remove(corner.c_str());
  std::remove(mesh.c_str());
}

TEST_CASE("cli: policy file and far-field switch") {
  const std::string pol = "cli_policy_test.conf";
  {
    std::ofstream p(pol);
    p << "# test policy\nfar_field_threshold = 5\nfallback_tol = 1e-8\n";
  }
  const std::string out = "cli_ff_test.csv";
  REQUIRE(run_cli("--policy-file " + pol + " influence --zM 1 --line '30,30,30 40,40,40' --samples 3 --out " + out) == 0);
  const CsvFile f = parse_csv(out);
  REQUIRE(f.rows.size() == 3);
  for (const auto& row : f.rows) CHECK(row[7] == "far-field");
  std::remove(pol.c_str());
  std::remove(out.c_str());
}

TEST_CASE("cli: influence output is deterministic") {
  const std::string a = "cli_det_a.csv", b = "cli_det_b.csv";
  REQUIRE(run_cli("influence --zM 2 --line '0.1,0.2,0.3 3,2,1' --samples 64 --out " + a) == 0);
  REQUIRE(run_cli("influence --zM 2 --line '0.1,0.2,0.3 3,2,1' --samples 64 --out " + b) == 0);
  std::ifstream fa(a), fb(b);
  const std::string ca((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  const std::string cb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  CHECK(ca == cb);
  CHECK(!ca.empty());
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("cli: usage errors exit nonzero") {
  CHECK(run_cli("influence --zM -3") != 0);
  CHECK(run_cli("plate --n 9 3") != 0);
  CHECK(run_cli("nonsense") != 0);
}
