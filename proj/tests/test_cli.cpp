// Copyright 2026 The hydrotwin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <sstream>

#include "commands.hpp"
#include "doctest.h"
#include "hydrotwin/dataset.hpp"
#include "hydrotwin/hydronet.hpp"
#include "hydrotwin/keyvalue.hpp"

using namespace hydrotwin;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

TEST_CASE("simulate") {
  const auto stopped = run({"simulate", "--u1", "0", "--u2", "50"});
  CHECK(stopped.code == 0);
  CHECK(stopped.out == "p1=3.000000\np2=3.000000\np3=3.000000\np4=3.000000\nfl=0.000000\n");

  const auto r = run({"simulate", "--u1", "54", "--u2", "100"});
  CHECK(r.code == 0);
  const auto y = simulate({54, 100}, ComponentVector{}, LoopConfig{});
  CHECK(r.out == "p1=" + fixed6(y.p1) + "\np2=" + fixed6(y.p2) + "\np3=" + fixed6(y.p3) +
                     "\np4=" + fixed6(y.p4) + "\nfl=" + fixed6(y.fl) + "\n");

  const auto over = run({"simulate", "--u1", "150", "--u2", "50"});
  CHECK(over.code == 2);
  CHECK(over.err.find("range") != std::string::npos);

  CHECK(run({"simulate", "--u1", "50"}).code == 2);
  CHECK(run({"simulate", "--u1", "50", "--u2", "50", "--theta", "hmt=-3"}).code == 2);
  CHECK(run({"simulate", "--u1", "50", "--u2", "50", "--theta", "nope=3"}).code == 2);
  const auto shifted = run({"simulate", "--u1", "0", "--u2", "50", "--theta", "p_tank=3.5"});
  CHECK(shifted.out.find("p1=3.500000") == 0);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("gen, train, eval and rerun") {
  TempDir dir("hydrotwin_cli_test");
  write_text_file(dir / "plan.cfg",
                  "u1_grid = 50,70,90\nu2_grid = 20,60,100\nmultipliers = 0.6,0.8,1.2,1.4\n");
  write_text_file(dir / "loop.cfg", LoopConfig{}.to_text() + ComponentVector{}.to_text());

  const auto gen = run({"gen", "--plan", dir / "plan.cfg", "--out", dir / "db.csv", "--config",
                        dir / "loop.cfg", "--seed", "3"});
  REQUIRE(gen.code == 0);
  CHECK(load_records(dir / "db.csv").size() == 3 * 3 * 24);
  CHECK(fs::exists(dir / "db.csv.manifest"));

  const auto train = run({"train", "--data", dir / "db.csv", "--out-dir", dir / "models",
                          "--seed", "2", "--train-fraction", "0.75"});
  REQUIRE(train.code == 0);
  for (const char* f : {"tree.model", "svr_1.model", "svr_5.model", "twin.cfg", "holdout.csv",
                        "train.csv", "manifest.txt"}) {
    CHECK(fs::exists(dir.path / "models" / f));
  }

  const auto eval = run({"eval", "--data", dir / "models/holdout.csv", "--models",
                         dir / "models", "--out-dir", dir / "eval"});
  REQUIRE(eval.code == 0);
  CHECK(eval.out.find("confusion matrix (rows: classification, columns: truth)") !=
        std::string::npos);
  CHECK(eval.out.find("   class\\truth     theta1     theta2     theta3     theta4   theta5&6") !=
        std::string::npos);
  CHECK(eval.out.find("overall accuracy = ") != std::string::npos);
  CHECK(fs::exists(dir.path / "eval" / "confusion.csv"));

  // Rerunning a manifest regenerates byte-identical artifacts.
  const auto before_db = read_text_file(dir / "db.csv");
  const auto before_tree = read_text_file(dir / "models/tree.model");
  const auto before_svr = read_text_file(dir / "models/svr_5.model");
  fs::remove(dir / "db.csv");
  fs::remove_all(dir.path / "models");
  CHECK(run({"rerun", dir / "db.csv.manifest"}).code == 0);
  CHECK(read_text_file(dir / "db.csv") == before_db);
  fs::copy_file(dir / "db.csv", dir / "db_copy.csv");
  write_text_file(dir / "train.manifest", "arg = train\narg = --data\narg = " + dir / "db.csv" +
                                              "\narg = --out-dir\narg = " + dir / "models" +
                                              "\narg = --seed\narg = 2\narg = --train-fraction\n"
                                              "arg = 0.75\n");
  CHECK(run({"rerun", dir / "train.manifest"}).code == 0);
  CHECK(read_text_file(dir / "models/tree.model") == before_tree);
  CHECK(read_text_file(dir / "models/svr_5.model") == before_svr);

  // Scenario: trace and metrics land in the output directory.
  write_text_file(dir / "scenario.cfg",
                  "steps = 8\ncontrol = 0,70,60\nevent = 3,3,x1.4\n");
  const auto sc = run({"scenario", "--spec", dir / "scenario.cfg", "--models", dir / "models",
                       "--out-dir", dir / "sc"});
  CHECK(sc.code == 0);
  CHECK(fs::exists(dir.path / "sc" / "trace.csv"));
  CHECK(fs::exists(dir.path / "sc" / "metrics.txt"));
  CHECK(fs::exists(dir.path / "sc" / "manifest.txt"));

  write_text_file(dir / "overlap.cfg",
                  "steps = 8\ncontrol = 0,70,60\nevent = 2,1,x1.0001\nevent = 3,3,x1.4\n");
  CHECK(run({"scenario", "--spec", dir / "overlap.cfg", "--models", dir / "models", "--out-dir",
             dir / "sc2"})
            .code == 3);

  const auto camp = run({"campaign", "--models", dir / "models", "--events", "5", "--out",
                         dir / "campaign.csv"});
  CHECK(camp.code == 0);
  CHECK(fs::exists(dir / "campaign.csv"));
}

TEST_CASE("exit codes for bad inputs") {
  TempDir dir("hydrotwin_cli_err_test");
  CHECK(run({"gen", "--plan", dir / "missing.cfg", "--out", dir / "x.csv"}).code == 2);
  write_text_file(dir / "bad.cfg", "u1_grid = 1,2,oops\n");
  CHECK(run({"gen", "--plan", dir / "bad.cfg", "--out", dir / "x.csv"}).code == 2);
  write_text_file(dir / "empty.cfg", "u1_grid = 50\nu2_grid = 50\nparameters = 1\nmultipliers.loss1 = 0.5\n");
  CHECK(run({"gen", "--plan", dir / "empty.cfg", "--out", dir / "no/such/dir/x.csv"}).code == 4);
  write_text_file(dir / "data.csv", "not,a,dataset\n");
  CHECK(run({"train", "--data", dir / "data.csv", "--out-dir", dir / "m"}).code == 2);
  fs::create_directories(dir.path / "nomodels");
  write_text_file(dir / "holdout.csv", std::string(kDatasetHeader) + "\n");
  CHECK(run({"eval", "--data", dir / "holdout.csv", "--models", dir / "nomodels"}).code == 4);
}
