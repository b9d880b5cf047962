/*
 * Copyright 2026 The HybridML Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "hybridml/cli.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

namespace hybridml::cli {
namespace {

const std::string kSchema = std::string(HYBRIDML_SOURCE_DIR) + "/configs/insurance_schema.json";

int run(const std::string& args) {
  const std::string cmd = std::string(HYBRIDML_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

bool same_tree(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::set<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(a)) names.insert(e.path().filename().string());
  for (const auto& e : std::filesystem::directory_iterator(b)) names.insert(e.path().filename().string());
  for (const auto& n : names) {
    if (!std::filesystem::exists(a / n) || !std::filesystem::exists(b / n)) return false;
    if (testing_util::slurp((a / n).string()) != testing_util::slurp((b / n).string())) return false;
  }
  return !names.empty();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    data_ = dir_.write("insurance.csv", testing_util::insurance_csv(testing_util::insurance_like(300, 17)));
  }

  // A small, fast configuration over the insurance-like table.
  std::string config(const std::string& extra, const std::string& out) const {
    std::string j = "{\"input\": \"" + data_ + "\", \"schema\": \"" + kSchema +
                    "\", \"target\": \"TravelInsurance\", \"engineer\": true, \"seed\": 11, \"k\": 3, \"n_trials\": 1,"
                    " \"search_space\": {\"rf\": {\"n_trees\": 20}, \"xgb-like\": {\"n_trees\": 20},"
                    " \"lgbm-like\": {\"n_trees\": 20}, \"cat-like\": {\"n_trees\": 20}, \"gbm-like\": {\"n_trees\": 20}},"
                    " \"output_dir\": \"" + dir_.file(out) + "\"";
    if (!extra.empty()) j += ", " + extra;
    return dir_.write(out + ".json", j + "}");
  }

  testing_util::TempDir dir_{"cli"};
  std::string data_;
};

TEST_F(Cli, EngineerWrites35Columns) {
  const std::string args = "engineer --input " + data_ + " --schema " + kSchema +
                           " --target TravelInsurance --seed 3 -o ";
  ASSERT_EQ(run(args + dir_.file("e1")), kExitOk);
  const auto csv_text = testing_util::slurp(dir_.file("e1/engineered.csv"));
  const auto header = first_line(csv_text);
  EXPECT_EQ(std::count(header.begin(), header.end(), ',') + 1, 35);
  EXPECT_EQ(count_lines(csv_text), 301u);
  const auto report = Json::parse(testing_util::slurp(dir_.file("e1/engineer_report.json")));
  EXPECT_EQ(report["n_columns"], 35);
  EXPECT_EQ(report["ingest"]["rows_read"], 300);
  EXPECT_EQ(report["ingest"]["rows_rejected"], 0);
  EXPECT_TRUE(report.contains("recipe"));

  ASSERT_EQ(run(args + dir_.file("e2")), kExitOk);
  EXPECT_TRUE(same_tree(dir_.file("e1"), dir_.file("e2")));
}

TEST_F(Cli, EngineerCountsMalformedRow) {
  auto text = testing_util::slurp(data_);
  const auto second = text.find('\n', text.find('\n') + 1) + 1;
  text.insert(second, "999,abc,Government Sector,Yes,500000,3,0,No,No,1\n");
  const auto bad = dir_.write("bad.csv", text);
  ASSERT_EQ(run("engineer --input " + bad + " --schema " + kSchema + " --target TravelInsurance --seed 3 -o " +
                dir_.file("eb")),
            kExitOk);
  const auto report = Json::parse(testing_util::slurp(dir_.file("eb/engineer_report.json")));
  EXPECT_EQ(report["ingest"]["rows_read"], 301);
  EXPECT_EQ(report["ingest"]["rows_rejected"], 1);
  EXPECT_EQ(report["ingest"]["rejected"][0]["line"], 3);
}

TEST_F(Cli, ExitCodes) {
  // No seed anywhere.
  EXPECT_EQ(run("engineer --input " + data_ + " --schema " + kSchema + " --target TravelInsurance -o " +
                dir_.file("x")),
            kExitConfig);
  EXPECT_EQ(run("matrix -c " + dir_.file("missing.json")), kExitConfig);
  EXPECT_EQ(run("matrix -c " + config("\"learners\": [\"svm\"]", "x1")), kExitConfig);
  EXPECT_EQ(run("matrix -c " + config("\"colour\": 1", "x2")), kExitConfig);
  EXPECT_EQ(run("simulate --seed 1 --ps 3"), kExitConfig);
  EXPECT_EQ(run("bogus"), kExitConfig);
  // Schema column absent from the file.
  const auto schema = dir_.write("schema.json", "{\"Age\": \"numeric\", \"Height\": \"numeric\"}");
  EXPECT_EQ(run("engineer --input " + data_ + " --schema " + schema + " --target Age --seed 1 -o " + dir_.file("x3")),
            kExitData);
  EXPECT_EQ(run("report " + dir_.file("nothing_here")), kExitData);
}

TEST_F(Cli, MatrixDefaultEmits23Records) {
  ASSERT_EQ(run("matrix -c " + config("", "m")), kExitOk);
  const auto jsonl = testing_util::slurp(dir_.file("m/records.jsonl"));
  ASSERT_EQ(count_lines(jsonl), 23u);
  std::istringstream lines(jsonl);
  std::string line;
  while (std::getline(lines, line)) {
    const auto r = Json::parse(line);
    EXPECT_TRUE(r["error"].is_null()) << r["model_id"];
    EXPECT_FALSE(r["metrics"]["auc"].is_null());
    EXPECT_TRUE(r["audit"]["passed"].get<bool>());
    EXPECT_TRUE(r["audit"]["features_fitted_on_train"].get<bool>());
  }
  EXPECT_EQ(count_lines(testing_util::slurp(dir_.file("m/records.csv"))), 24u);
  EXPECT_EQ(first_line(testing_util::slurp(dir_.file("m/roc.csv"))), "model_id,threshold,fpr,tpr");

  // One row per record in the report.
  const auto out = dir_.file("report.txt");
  ASSERT_EQ(std::system((std::string(HYBRIDML_CLI_PATH) + " report " + dir_.file("m") + " >" + out + " 2>/dev/null").c_str()), 0);
  const auto report = testing_util::slurp(out);
  EXPECT_NE(report.find("gbm-like:elasticnet"), std::string::npos);
  EXPECT_EQ(report, testing_util::slurp(dir_.file("m/report.txt")));
}

TEST_F(Cli, RestrictedMatrixHasOneHybrid) {
  ASSERT_EQ(run("matrix -c " + config("", "r") + " --selection lasso --learners cat-like"), kExitOk);
  std::istringstream lines(testing_util::slurp(dir_.file("r/records.jsonl")));
  std::string line;
  std::vector<std::string> ids;
  while (std::getline(lines, line)) ids.push_back(Json::parse(line)["model_id"]);
  EXPECT_EQ(ids, (std::vector<std::string>{"lasso", "cat-like:full", "cat-like:lasso"}));

  ASSERT_EQ(run("matrix -c " + config("\"pure\": [], \"full\": false", "r1") + " --selection lasso --learners cat-like"),
            kExitOk);
  EXPECT_EQ(count_lines(testing_util::slurp(dir_.file("r1/records.jsonl"))), 1u);
}

TEST_F(Cli, MatrixIsReproducibleAcrossWorkers) {
  const auto cfg = config("\"learners\": [\"rf\", \"lgbm-like\"], \"curves\": [{\"ranking\": \"lasso\", \"model\": \"rf\"}]",
                          "d");
  ASSERT_EQ(run("matrix -c " + cfg + " -o " + dir_.file("d1") + " --workers 1"), kExitOk);
  ASSERT_EQ(run("matrix -c " + cfg + " -o " + dir_.file("d2") + " --workers 1"), kExitOk);
  ASSERT_EQ(run("matrix -c " + cfg + " -o " + dir_.file("d8") + " --workers 8"), kExitOk);
  EXPECT_TRUE(same_tree(dir_.file("d1"), dir_.file("d2")));
  EXPECT_TRUE(same_tree(dir_.file("d1"), dir_.file("d8")));
  EXPECT_TRUE(std::filesystem::exists(dir_.file("d1/auc_by_nvars.csv")));
}

TEST_F(Cli, FailedRecordsGiveModelExit) {
  // A single-point lambda grid empties the lasso selection.
  ASSERT_EQ(run("matrix -c " + config("\"n_lambda\": 1, \"selection\": [\"lasso\"], \"learners\": [\"rf\"]", "f")),
            kExitModel);
  const auto jsonl = testing_util::slurp(dir_.file("f/records.jsonl"));
  EXPECT_EQ(count_lines(jsonl), 3u);
  EXPECT_NE(jsonl.find("every coefficient is zero"), std::string::npos);
}

TEST_F(Cli, SimulateGridAndReport) {
  const std::string args = "simulate --seed 4 --ns 80,120 --ps 5 --replicates 2 --n-trials 0 --k 3 -o ";
  ASSERT_EQ(run(args + dir_.file("s1")), kExitOk);
  ASSERT_EQ(run(args + dir_.file("s8") + " --workers 8"), kExitOk);
  EXPECT_TRUE(same_tree(dir_.file("s1"), dir_.file("s8")));
  const auto rows = testing_util::slurp(dir_.file("s1/sim_records.csv"));
  EXPECT_EQ(count_lines(rows), 23u * 2 * 2 + 1);
  const auto summary = Json::parse(testing_util::slurp(dir_.file("s1/sim_summary.json")));
  const auto& overall = summary["overall"];
  ASSERT_EQ(overall.size(), 23u);
  for (std::size_t i = 1; i < overall.size(); ++i) {
    EXPECT_LE(overall[i - 1]["mean"].get<double>(), overall[i]["mean"].get<double>());
  }
  ASSERT_EQ(run("report " + dir_.file("s1")), kExitOk);
  const auto table = testing_util::slurp(dir_.file("s1/rmse_summary.csv"));
  EXPECT_EQ(first_line(table), "n,p,model_id,mean_rmse,std_rmse,count");
  EXPECT_EQ(count_lines(table), 1u + 2 * 23);
}

TEST_F(Cli, OutputDirFromEnvironment) {
  const auto cfg = config("\"selection\": [\"lasso\"], \"learners\": [\"rf\"], \"full\": false", "envcfg");
  const std::string cmd = "HYBRIDML_OUTPUT_DIR=" + dir_.file("from_env") + " " + HYBRIDML_CLI_PATH + " matrix -c " +
                          cfg + " >/dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(std::filesystem::exists(dir_.file("from_env/records.jsonl")));
  EXPECT_FALSE(std::filesystem::exists(dir_.file("envcfg")));
}

TEST(Config, ParsesAndResolvesPaths) {
  const auto c = parse_config(Json::parse(R"({"input": "data/x.csv", "seed": 7, "selection": ["lasso", "ridge"],
      "learners": ["rf"], "simulation": {"ns": [50], "replicates": 3}})"),
                              "/base");
  EXPECT_EQ(*c.input, "/base/data/x.csv");
  EXPECT_EQ(*c.seed, 7u);
  EXPECT_EQ(c.selection.size(), 2u);
  EXPECT_EQ(c.matrix_spec().n_records(), 2u + 1 + 2);
  EXPECT_EQ(c.grid.ns, std::vector<std::size_t>{50});
  EXPECT_EQ(c.grid.replicates, 3u);
  EXPECT_THROW(parse_config(Json::parse(R"({"simulation": {"m": 1}})")), ConfigError);
  EXPECT_THROW(parse_config(Json::parse(R"({"k": "five"})")), ConfigError);
  EXPECT_THROW(parse_config(Json::parse(R"({"selection": ["pca"]})")), ConfigError);
}

TEST(Config, FlagsOverrideEnvironmentOverrideFile) {
  auto c = parse_config(Json::parse(R"({"seed": 1, "output_dir": "/file"})"));
  ::setenv(kOutputDirEnv, "/env", 1);
  Overrides o;
  o.seed = 2;
  apply(o, c);
  EXPECT_EQ(c.output_dir, "/env");
  EXPECT_EQ(*c.seed, 2u);
  o.output_dir = "/flag";
  apply(o, c);
  EXPECT_EQ(c.output_dir, "/flag");
  ::unsetenv(kOutputDirEnv);
}

TEST(Config, SeedIsRequired) {
  RunConfig c;
  EXPECT_THROW(c.validate(Command::kSimulate), ConfigError);
  c.seed = 0;
  EXPECT_NO_THROW(c.validate(Command::kSimulate));
}

}  // namespace
}  // namespace hybridml::cli
