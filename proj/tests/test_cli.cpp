#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

namespace {

const std::string kCli = FRACFLOW_CLI_PATH;

std::string temp_path(const std::string& stem) {
  return std::string("cli-test-") + stem;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run(const std::string& args, const std::string& stdout_path) {
  const std::string cmd = kCli + " " + args + " > " + stdout_path + " 2> " +
                          stdout_path + ".err";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(tok);
  return out;
}

const char* kFlatScenario = R"(
[scenario]
name = flat
alpha = 1.0

[chart]
n = 1
m = 1
axis0 = 0 1 8
axis1 = 0 1 8

[metric]
preset = flat

[flow]
step = 0.001
steps = 20

[output]
format = csv
)";

}  // namespace

TEST_CASE("flow run writes a deterministic diagnostics table") {
  const std::string cfg = temp_path("flat.cfg");
  const std::string out1 = temp_path("flat1.csv");
  const std::string out2 = temp_path("flat2.csv");
  write_file(cfg, kFlatScenario);

  REQUIRE(run("run --config " + cfg + " --out " + out1, temp_path("run1.log")) == 0);
  REQUIRE(run("run --config " + cfg + " --out " + out2, temp_path("run2.log")) == 0);

  const std::string text = read_file(out1);
  CHECK(text == read_file(out2));  // byte-identical reruns

  const auto lines = split_lines(text);
  REQUIRE(lines.size() == 22);  // header + initial row + 20 steps
  const auto header = split_csv(lines[0]);
  REQUIRE(header.size() == 14);
  CHECK(header[0] == "step");
  CHECK(header[1] == "chi");
  CHECK(header[2] == "F");
  CHECK(header[8] == "mu_mass");
  CHECK(header.back() == "sigma");

  // a flat start stays flat: the energy column is numerically zero
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto row = split_csv(lines[k]);
    REQUIRE(row.size() == 14);
    CHECK(std::stoul(row[0]) == k - 1);
    CHECK(std::abs(std::stod(row[2])) < 1e-10);
    CHECK(std::abs(std::stod(row[9]) - 1.0) < 1e-10);   // smallest metric eigenvalue
    CHECK(std::abs(std::stod(row[10]) - 1.0) < 1e-10);  // largest metric eigenvalue
  }
}

TEST_CASE("json-lines output carries one record per step") {
  const std::string cfg = temp_path("flatjson.cfg");
  std::string text = kFlatScenario;
  const auto pos = text.find("format = csv");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 12, "format = json-lines");
  write_file(cfg, text);

  const std::string out = temp_path("flat.jsonl");
  REQUIRE(run("run --config " + cfg + " --out " + out, temp_path("runjson.log")) == 0);
  const auto lines = split_lines(read_file(out));
  REQUIRE(lines.size() == 21);  // initial row + 20 steps, no header in json-lines
  for (const auto& line : lines) {
    CHECK(line.front() == '{');
    CHECK(line.back() == '}');
    CHECK(line.find("\"chi\"") != std::string::npos);
    CHECK(line.find("\"mu_mass\"") != std::string::npos);
  }
}

TEST_CASE("malformed configuration exits with status one") {
  const std::string cfg = temp_path("bad.cfg");
  write_file(cfg, "[scenario]\nalpha = 1.5\n[chart]\nn = 1\nm = 1\n"
                  "axis0 = 0 1 8\naxis1 = 0 1 8\n");
  const std::string log = temp_path("bad.log");
  CHECK(run("run --config " + cfg, log) == 1);
  const std::string err = read_file(log + ".err");
  CHECK(err.find("alpha") != std::string::npos);

  CHECK(run("run --config no-such-file.cfg", temp_path("missing.log")) == 1);
}

TEST_CASE("derivative table: constant preset is annihilated to rounding") {
  const std::string out = temp_path("caputo-const.csv");
  REQUIRE(run("caputo --preset constant --alpha 0.5 --count 257", out) == 0);
  const auto lines = split_lines(read_file(out));
  REQUIRE(lines.size() == 258);
  CHECK(split_csv(lines[0])[0] == "x");
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto row = split_csv(lines[k]);
    REQUIRE(row.size() == 4);
    CHECK(std::stod(row[3]) < 1e-14);  // abs_error column
  }
}

TEST_CASE("derivative table: power preset matches its closed form") {
  const std::string out = temp_path("caputo-power.csv");
  REQUIRE(run("caputo --preset power --beta 2 --alpha 0.5 --count 1025", out) == 0);
  const auto lines = split_lines(read_file(out));
  double rel = 0.0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto row = split_csv(lines[k]);
    const double x = std::stod(row[0]);
    if (x < 0.05) continue;
    rel = std::max(rel, std::stod(row[3]) / std::abs(std::stod(row[2])));
  }
  CHECK(rel < 1e-3);
}

TEST_CASE("derivative table: classical order refines at second order") {
  auto worst = [&](int count) {
    const std::string out = temp_path("caputo-sin-" + std::to_string(count) + ".csv");
    REQUIRE(run("caputo --preset sin --alpha 1 --count " + std::to_string(count), out) == 0);
    const auto lines = split_lines(read_file(out));
    double w = 0.0;
    for (std::size_t k = 1; k < lines.size(); ++k)
      w = std::max(w, std::stod(split_csv(lines[k])[3]));
    return w;
  };
  const double e1 = worst(129), e2 = worst(257);
  CHECK(e1 / e2 > 3.0);  // halving the spacing cuts the error near fourfold
}

TEST_CASE("derivative table rejects bad arguments with status one") {
  CHECK(run("caputo --preset cubic --alpha 0.5 --count 64", temp_path("capbad1.log")) == 1);
  const std::string log = temp_path("capbad2.log");
  CHECK(run("caputo --preset constant --alpha 0.5 --count 2", log) == 1);
  CHECK(read_file(log + ".err").find("grid too small") != std::string::npos);
}

TEST_CASE("unknown subcommands fail") {
  CHECK(run("definitely-not-a-command", temp_path("unknown.log")) != 0);
}
