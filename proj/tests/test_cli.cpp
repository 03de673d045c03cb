#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ambitalk/cli.hpp"
#include "support.hpp"

using namespace ambitalk;
using namespace ambitalk::cli;
using testing::near;

namespace {

using Row = std::map<std::string, std::string>;

std::vector<std::string> split(const std::string &line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<Row> read_csv(const std::string &text) {
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  const auto header = split(line);
  std::vector<Row> rows;
  while (std::getline(is, line)) {
    const auto fields = split(line);
    Row r;
    for (std::size_t i = 0; i < header.size() && i < fields.size(); ++i) r[header[i]] = fields[i];
    rows.push_back(r);
  }
  return rows;
}

double num(const Row &r, const std::string &key) { return std::stod(r.at(key)); }

const std::string kExample = R"({
  "state": {"lo": -0.5, "hi": 0.5},
  "words": {"names": ["L", "R"]},
  "ambiguity": {"p_lo": 0.3333333333333333, "p_hi": 0.3333333333333333}
})";

std::string run_solve(const RunConfig &cfg) {
  std::ostringstream os;
  REQUIRE(cmd_solve(cfg, os) == kOk);
  return os.str();
}

} // namespace

TEST_CASE("config parsing") {
  const RunConfig cfg = parse_config(kExample);
  CHECK(cfg.spec.word_count() == 2);
  CHECK(cfg.spec.words.name(1) == "R");
  CHECK(cfg.spec.ambiguity.full_simplex());

  auto message = [](const std::string &text) {
    try {
      parse_config(text);
    } catch (const ConfigError &e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(R"({"state": {"lo": 0, "hi": 1, "mid": 0.5}, "words": {"count": 2},
                    "ambiguity": {"p_lo": 0.1, "p_hi": 0.2}})")
            .find("/state/mid") != std::string::npos);
  CHECK(message(R"({"state": {"lo": 0, "hi": 1}, "words": {"count": 2},
                    "ambiguity": {"p_lo": 0.1, "p_hi": 0.2}, "solver": {"tolerance": -1e-9}})")
            .find("/solver/tolerance") != std::string::npos);
  CHECK(message(R"({"state": {"lo": 0, "hi": 1}, "words": {"count": 2},
                    "ambiguity": {"p_lo": 0.3, "p_hi": 0.2}})")
            .find("/ambiguity") != std::string::npos);
  CHECK(message(R"({"state": {"lo": 0, "hi": 1}, "words": {"count": 2},
                    "ambiguity": {"p_lo": 0.1, "p_hi": 0.2, "g_set": {"finite": [[0.5, 0.2]]}}})")
            .find("/ambiguity") != std::string::npos);
  CHECK(message(R"({"state": {"lo": 0, "hi": 1}, "words": {"count": 2}})").find("/ambiguity") !=
        std::string::npos);
  CHECK_FALSE(message("{not json").empty());

  const RunConfig finite = parse_config(R"({
    "state": {"lo": 0, "hi": 2},
    "prior": {"piecewise": {"breakpoints": [0, 1, 2], "values": [1, 3]}},
    "words": {"count": 3},
    "ambiguity": {"p_lo": 0.1, "p_hi": 0.2, "g_set": {"finite": [[0.2, 0.3, 0.5]]}},
    "solver": {"restarts": 3, "seed": 9, "tolerance": 1e-11, "max_iter": 500},
    "output": {"format": "jsonl", "path": "x.jsonl"}
  })");
  CHECK_FALSE(finite.spec.ambiguity.full_simplex());
  CHECK(finite.search.restarts == 3);
  CHECK(finite.search.seed == 9);
  CHECK(finite.format == Format::Jsonl);
  CHECK(*finite.out_path == "x.jsonl");
}

TEST_CASE("solve reproduces symmetric game") {
  const auto rows = read_csv(run_solve(parse_config(kExample)));
  REQUIRE(rows.size() == 2);
  const Row &r = rows[1];
  CHECK(r.at("name") == "R");
  CHECK(near(num(r, "action_exante"), 1.0 / 6.0, 1e-9));
  CHECK(near(num(r, "action_interim"), 0.125, 1e-9));
  CHECK(r.at("regular") == "true");
  CHECK(r.at("interim_is_equilibrium") == "true");
  CHECK(near(num(r, "babbling_loss"), 1.0 / 12.0, 1e-12));
}

TEST_CASE("solve with pure noise babbles") {
  const auto rows = read_csv(run_solve(symmetric_config(1.0)));
  for (const Row &r : rows) {
    CHECK(near(num(r, "exante_loss"), 1.0 / 12.0, 1e-12));
    CHECK(num(r, "action_exante") == 0.0);
  }
}

TEST_CASE("solve with three words") {
  RunConfig cfg = parse_config(R"({
    "state": {"lo": -0.5, "hi": 0.5},
    "words": {"count": 3},
    "ambiguity": {"p_lo": 0.2, "p_hi": 0.2}
  })");
  cfg.format = Format::Jsonl;
  const std::string out = run_solve(cfg);
  const auto first = out.substr(0, out.find('\n'));
  CHECK(first.find("\"type\":\"summary\"") != std::string::npos);
  const auto rows = read_csv("h\n" + out);
  CHECK(rows.size() == 4);

  cfg.format = Format::Csv;
  const auto csv = read_csv(run_solve(cfg));
  REQUIRE(csv.size() == 3);
  const std::string cuts = csv[0].at("cutpoints");
  const auto semi = cuts.find(';');
  REQUIRE(semi != std::string::npos);
  CHECK(std::stod(cuts.substr(0, semi)) < std::stod(cuts.substr(semi + 1)));
}

TEST_CASE("sweep") {
  const RunConfig cfg = symmetric_config(0.0);
  SweepOptions opts;
  opts.steps = 21;
  std::ostringstream serial;
  REQUIRE(cmd_sweep(cfg, opts, serial) == kOk);
  opts.jobs = 4;
  std::ostringstream parallel;
  REQUIRE(cmd_sweep(cfg, opts, parallel) == kOk);
  CHECK(serial.str() == parallel.str());

  const auto rows = read_csv(serial.str());
  REQUIRE(rows.size() == 21);
  CHECK(serial.str().substr(0, serial.str().find('\n')) ==
        "p,exante_L,exante_R,interim_L,interim_R,exante_loss,babbling_loss,as_if_p");
  for (const char *col : {"exante_L", "interim_L"}) CHECK(near(num(rows[0], col), -0.25, 1e-6));
  for (const char *col : {"exante_R", "interim_R"}) CHECK(near(num(rows[0], col), 0.25, 1e-6));
  for (const char *col : {"exante_L", "exante_R", "interim_L", "interim_R"})
    CHECK(num(rows[20], col) == 0.0);
  CHECK(near(num(rows[6], "p"), 0.3, 1e-12));
  CHECK(near(num(rows[6], "as_if_p"), 0.4615, 1e-3));

  // A single point agrees with solve at that p.
  SweepOptions one;
  one.from = one.to = 0.3;
  one.steps = 1;
  std::ostringstream single;
  REQUIRE(cmd_sweep(cfg, one, single) == kOk);
  const auto point = read_csv(single.str()).at(0);
  const auto solved = read_csv(run_solve(symmetric_config(0.3)));
  CHECK(point.at("exante_R") == solved[1].at("action_exante"));
  CHECK(point.at("interim_L") == solved[0].at("action_interim"));
  CHECK(point.at("exante_loss") == solved[0].at("exante_loss"));

  SweepOptions bad;
  bad.steps = 0;
  std::ostringstream sink;
  CHECK_THROWS_AS(cmd_sweep(cfg, bad, sink), ConfigError);
}

TEST_CASE("output is deterministic") {
  RunConfig cfg = parse_config(R"({
    "state": {"lo": 0, "hi": 1},
    "prior": {"piecewise": {"breakpoints": [0, 0.4, 1], "values": [2, 1]}},
    "words": {"count": 3},
    "ambiguity": {"p_lo": 0.1, "p_hi": 0.3, "g_set": {"finite": [[0.6, 0.2, 0.2], [0.1, 0.3, 0.6]]}},
    "solver": {"seed": 5}
  })");
  CHECK(run_solve(cfg) == run_solve(cfg));
}

TEST_CASE("channel command") {
  std::ostringstream os;
  ChannelOptions opts;
  opts.m = 2;
  opts.q = 0.3;
  const auto dir = std::filesystem::temp_directory_path() / "ambitalk_channel_test";
  std::filesystem::remove_all(dir);
  opts.export_dir = dir.string();
  REQUIRE(cmd_channel(opts, os) == kOk);
  CHECK(os.str().find("representable: yes") != std::string::npos);
  CHECK(os.str().find("unique: yes") != std::string::npos);
  CHECK(os.str().find("witness p: 0.45 0.45 0.45") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "shannon.csv"));
  CHECK(std::filesystem::exists(dir / "noisy_talk.csv"));
  std::filesystem::remove_all(dir);

  std::ostringstream no;
  REQUIRE(cmd_channel({.m = 1, .n = 2, .q = 0.2, .export_dir = std::nullopt}, no) == kOk);
  CHECK(no.str().find("representable: no") != std::string::npos);
  CHECK(no.str().find("counterexample: v=00 w=01 w'=11") != std::string::npos);

  std::ostringstream clean;
  REQUIRE(cmd_channel({.m = 1, .n = 1, .q = 0.0, .export_dir = std::nullopt}, clean) == kOk);
  CHECK(clean.str().find("degenerate q") != std::string::npos);

  std::ostringstream err;
  CHECK(guarded([] {
          std::ostringstream sink;
          return cmd_channel({.m = 0, .n = 1, .q = 0.1, .export_dir = std::nullopt}, sink);
        },
                err) == kConfigError);
}

TEST_CASE("verify command") {
  std::ostringstream os;
  VerifyOptions opts;
  opts.instances = 5;
  CHECK(cmd_verify(symmetric_config(1.0 / 3.0), opts, os) == kOk);
  const auto rows = read_csv(os.str());
  CHECK(rows.size() == 7);
  for (const Row &r : rows) CHECK(r.at("passed") == "true");

  std::ostringstream err;
  const int code = guarded(
      [] {
        const auto cfg = parse_config(R"({"state": {"lo": -0.5, "hi": 0.5}, "words": {"count": 2},
                                          "ambiguity": {"p_lo": 0.2, "p_hi": 0.2},
                                          "solver": {"tolerance": -1}})");
        std::ostringstream sink;
        return cmd_verify(cfg, {}, sink);
      },
      err);
  CHECK(code == kConfigError);
}

TEST_CASE("exit codes") {
  std::ostringstream err;
  CHECK(guarded([] { return kOk; }, err) == kOk);
  CHECK(guarded([]() -> int { throw NonConvergence("stuck", 3, 0.1); }, err) == kNonConvergence);
  CHECK(guarded([]() -> int { throw InvalidSpec("bad"); }, err) == kConfigError);
  CHECK(guarded([]() -> int { throw EfficiencyAssertionFailed("no"); }, err) == kSuiteFailure);
}
