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

#ifndef HYBRIDML_TESTS_TEST_UTIL_HPP_
#define HYBRIDML_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hybridml/dataframe.hpp"
#include "hybridml/random.hpp"

namespace testing_util {

// Fresh directory under the system temp dir, removed by the destructor.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("hybridml_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(file(name), std::ios::binary) << content;
    return file(name);
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Synthetic table with the raw insurance schema. Purchase odds rise with
// income, travel history and family size.
inline hybridml::Dataset insurance_like(std::size_t n, std::uint64_t seed) {
  hybridml::Rng rng(seed);
  std::vector<std::vector<double>> cols(8, std::vector<double>(n));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double age = static_cast<double>(rng.uniform_int(25, 35));
    const double income = 50000.0 * static_cast<double>(rng.uniform_int(6, 36));
    const double family = static_cast<double>(rng.uniform_int(2, 9));
    const double graduate = rng.uniform() < 0.85;
    const double employment = rng.uniform() < 0.7;
    const double chronic = rng.uniform() < 0.28;
    const double flyer = rng.uniform() < 0.2;
    const double abroad = rng.uniform() < 0.19;
    const double eta = -4.0 + 2.2e-6 * income + 1.8 * abroad + 0.8 * flyer + 0.2 * family + 0.05 * (age - 30);
    cols[0][i] = age;
    cols[1][i] = income;
    cols[2][i] = family;
    cols[3][i] = graduate;
    cols[4][i] = employment;
    cols[5][i] = chronic;
    cols[6][i] = flyer;
    cols[7][i] = abroad;
    y[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
  }
  return hybridml::Dataset({"Age", "AnnualIncome", "FamilyMembers", "GraduateOrNot", "Employment.Type",
                            "ChronicDiseases", "FrequentFlyer", "EverTravelledAbroad"},
                           std::move(cols), hybridml::Target{"TravelInsurance", std::move(y)});
}

// The same rows in the layout of the public insurance CSV: a leading index
// column, textual employment type and Yes/No flags.
inline std::string insurance_csv(const hybridml::Dataset& d) {
  std::ostringstream out;
  out << ",Age,Employment Type,GraduateOrNot,AnnualIncome,FamilyMembers,ChronicDiseases,FrequentFlyer,"
         "EverTravelledAbroad,TravelInsurance\n";
  auto yes = [](double v) { return v != 0.0 ? "Yes" : "No"; };
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    out << i << ',' << d.column("Age")[i] << ','
        << (d.column("Employment.Type")[i] != 0.0 ? "Private Sector/Self Employed" : "Government Sector") << ','
        << yes(d.column("GraduateOrNot")[i]) << ',' << static_cast<long long>(d.column("AnnualIncome")[i]) << ','
        << d.column("FamilyMembers")[i] << ',' << d.column("ChronicDiseases")[i] << ','
        << yes(d.column("FrequentFlyer")[i]) << ',' << yes(d.column("EverTravelledAbroad")[i]) << ','
        << d.y()[i] << '\n';
  }
  return out.str();
}

}  // namespace testing_util

#endif  // HYBRIDML_TESTS_TEST_UTIL_HPP_
