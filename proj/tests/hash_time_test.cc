// Copyright 2026 The DCO Authors.
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

#include <set>

#include <gtest/gtest.h>

#include "dco/error.h"
#include "dco/hash.h"
#include "dco/time_util.h"

namespace dco {
namespace {

// FIPS 180-2 test vectors.
TEST(Sha256Test, KnownVectors) {
  EXPECT_EQ(Sha256Hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Sha256Hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(Sha256Hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"),
            "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST(Sha256Test, DiffersOnAnyByte) {
  std::string base = "def add(a, b):\n    return a + b\n";
  std::set<std::string> seen = {Sha256Hex(base)};
  for (std::size_t i = 0; i < base.size(); ++i) {
    std::string flipped = base;
    flipped[i] = static_cast<char>(flipped[i] ^ 1);
    EXPECT_TRUE(seen.insert(Sha256Hex(flipped)).second) << i;
  }
}

TEST(Sha256Test, IsHex64) {
  EXPECT_TRUE(IsHex64(Sha256Hex("x")));
  EXPECT_FALSE(IsHex64("abc"));
  EXPECT_FALSE(IsHex64(std::string(64, 'G')));
  EXPECT_FALSE(IsHex64(std::string(64, 'A')));  // lowercase only
}

TEST(TimeTest, FormatsUtcMilliseconds) {
  EXPECT_EQ(FormatIso8601(0), "1970-01-01T00:00:00.000Z");
  EXPECT_EQ(FormatIso8601(1792416240123), "2026-10-19T13:24:00.123Z");
}

TEST(TimeTest, RoundTrips) {
  for (TimestampMs t : {TimestampMs{0}, TimestampMs{1}, TimestampMs{999}, TimestampMs{86'400'000},
                        TimestampMs{1792416240123}, NowMs()}) {
    auto parsed = ParseIso8601(FormatIso8601(t));
    ASSERT_TRUE(parsed) << t;
    EXPECT_EQ(*parsed, t);
  }
  EXPECT_FALSE(ParseIso8601("yesterday"));
  EXPECT_FALSE(ParseIso8601("2026-10-19 13:24:00"));
}

TEST(ErrorTest, CarriesCodeDetailAndLine) {
  Error e(ErrorCode::kParseError, "bad token", 7);
  EXPECT_EQ(e.code(), ErrorCode::kParseError);
  EXPECT_EQ(e.detail(), "bad token");
  EXPECT_EQ(e.line(), 7);
  EXPECT_NE(std::string(e.what()).find("ParseError"), std::string::npos);
  EXPECT_EQ(ErrorCodeName(ErrorCode::kUnknownDirective), "UnknownDirective");
}

}  // namespace
}  // namespace dco
