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

#include "hybridml/csv.hpp"

#include <gtest/gtest.h>

namespace hybridml::csv {
namespace {

TEST(Csv, ParsesQuotedFieldsAndCrlf) {
  const auto records = parse("a,b,c\r\n1,\"x, y\",\"say \"\"hi\"\"\"\r\n\r\n2,,3\n");
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[1].fields[1], "x, y");
  EXPECT_EQ(records[1].fields[2], "say \"hi\"");
  EXPECT_EQ(records[2].fields[1], "");
  EXPECT_EQ(records[2].line, 4u);
}

TEST(Csv, MultilineFieldAndBom) {
  const auto records = parse("\xEF\xBB\xBFh1,h2\n\"line1\nline2\",5");
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].fields[0], "h1");
  EXPECT_EQ(records[1].fields[0], "line1\nline2");
}

TEST(Csv, ParseDouble) {
  EXPECT_EQ(parse_double("1.5"), 1.5);
  EXPECT_EQ(parse_double(" -2 "), -2.0);
  EXPECT_EQ(parse_double("+3"), 3.0);
  EXPECT_FALSE(parse_double("abc"));
  EXPECT_FALSE(parse_double("1.5x"));
  EXPECT_FALSE(parse_double(""));
  EXPECT_FALSE(parse_double("inf"));
}

TEST(Csv, FormatDoubleRoundTrips) {
  for (double v : {0.0, 0.1, 1.0 / 3.0, -1e-300, 123456789.0, 2.5e17}) {
    EXPECT_EQ(*parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(3.0), "3");
}

TEST(Csv, QuoteOnlyWhenNeeded) {
  EXPECT_EQ(quote("plain"), "plain");
  EXPECT_EQ(quote("a,b"), "\"a,b\"");
  EXPECT_EQ(quote("q\""), "\"q\"\"\"");
}

}  // namespace
}  // namespace hybridml::csv
