// Copyright (c) 2026 The affectdialog Authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "affectdialog/text.hpp"
#include "test_util.hpp"

using namespace affectdialog;
using Words = std::vector<std::string>;

TEST_CASE("tokenization") {
  CHECK(normalize_and_tokenize("Hello, World!") == Words{"hello", ",", "world", "!"});
  CHECK(normalize_and_tokenize("  don't\tstop ") == Words{"don", "'", "t", "stop"});
  CHECK(normalize_and_tokenize("caf\xc3\xa9 ok") == Words{"caf", "ok"});
  CHECK(normalize_and_tokenize("").empty());
  CHECK(join_tokens(Words{"a", "b"}) == "a b");
}

TEST_CASE("specials occupy the first ids") {
  const Vocabulary v;
  CHECK(v.size() == 4);
  CHECK(v.word(Vocabulary::kPad) == "<pad>");
  CHECK(v.word(Vocabulary::kSos) == "<sos>");
  CHECK(v.word(Vocabulary::kEos) == "<eos>");
  CHECK(v.word(Vocabulary::kOov) == "<oov>");
  CHECK_THROWS_AS(Vocabulary(Words{"a", "a"}), std::invalid_argument);
  CHECK_THROWS_AS(Vocabulary(Words{"<eos>"}), std::invalid_argument);
}

TEST_CASE("build orders by frequency then alphabetically and caps the size") {
  const Vocabulary v = Vocabulary::build({{"b", "a", "c"}, {"c", "b"}, {"c", "d"}}, 3);
  CHECK(v.size() == 7);
  CHECK(v.find("c") == 4);
  CHECK(v.find("b") == 5);
  CHECK(v.find("a") == 6);
  CHECK(v.find("d") == -1);
}

TEST_CASE("mapping: exact, fuzzy, OOV") {
  const Vocabulary v(Words{"wonderful", "extraordinary", "cat"});
  CHECK(v.map_token("cat") == v.find("cat"));
  CHECK(v.map_token("extraordinarx") == v.find("extraordinary"));  // 12/13
  CHECK(v.map_token("wonderfull") == Vocabulary::kOov);  // 9/10 is not enough
  CHECK(v.map_token("wonderfal") == Vocabulary::kOov);
  CHECK(v.map_token("dog") == Vocabulary::kOov);
}

TEST_CASE("encode/decode") {
  const Vocabulary v(Words{"hi", "there"});
  const auto ids = v.encode(Words{"hi", "zzz", "there"});
  CHECK(ids == std::vector<TokenId>{4, Vocabulary::kOov, 5});
  const std::vector<TokenId> with_specials{Vocabulary::kSos, 4, Vocabulary::kOov, 5,
                                           Vocabulary::kEos, Vocabulary::kPad};
  CHECK(v.decode(with_specials) == Words{"hi", "<oov>", "there"});
  CHECK_THROWS(v.word(99));
}

TEST_CASE("save/load round trip") {
  testutil::TempDir dir("vocab");
  const Vocabulary v(Words{"alpha", "beta", "gamma"});
  v.save(dir.path() / "v.txt");
  const Vocabulary w = Vocabulary::load(dir.path() / "v.txt");
  CHECK(w.words() == v.words());
}
