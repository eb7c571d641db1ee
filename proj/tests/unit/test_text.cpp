// Copyright 2026 The Puda Authors
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

#include <doctest.h>

#include "puda/crypto.hpp"
#include "puda/pipeline.hpp"
#include "puda/text.hpp"

using namespace puda;

TEST_SUITE("text") {
  TEST_CASE("normalization") {
    CHECK(text::normalize_key("  Gro\xc3\x9f ") == "gro\xc3\x9f");  // simple folding keeps sharp s
    CHECK(text::normalize_key("ONSEN") == "onsen");
    CHECK(text::nfc("e\xcc\x81") == "\xc3\xa9");
    CHECK(text::normalize_label(" Hotels & Accommodations\t") == "Hotels & Accommodations");
    CHECK(text::trim("\xe3\x80\x80x\xe3\x80\x80") == "x");  // ideographic space
  }

  TEST_CASE("case folding is locale independent") {
    // Turkish dotted capital I folds the same way everywhere.
    CHECK(text::fold_case("I") == "i");
    CHECK(text::fold_case("\xc3\x89T\xc3\x89") == "\xc3\xa9t\xc3\xa9");
  }

  TEST_CASE("letter tokens") {
    auto tokens = text::letter_tokens("Golf, golf! 温泉 x2 don't");
    std::vector<std::string> expected = {"golf", "golf", "温泉", "x", "don", "t"};
    CHECK(tokens == expected);
  }

  TEST_CASE("word and code point counts") {
    CHECK(text::word_count("  one two\tthree\n") == 3);
    CHECK(text::word_count("") == 0);
    CHECK(text::codepoint_count("温泉") == 2);
    CHECK(text::collapse_whitespace("  a \n\t b  ") == "a b");
  }

  TEST_CASE("invalid UTF-8 is replaced, not rejected") {
    CHECK_FALSE(text::is_valid_utf8("\xff"));
    auto fixed = text::nfc("a\xffz");
    CHECK(text::is_valid_utf8(fixed));
    CHECK(fixed == "a\xef\xbf\xbdz");
  }

  TEST_CASE("visible text extraction") {
    CHECK(extract_text("<p>Hello <b>world</b></p>") == "Hello world");
    CHECK(extract_text("<script>x=1</script>Visible") == "Visible");
    CHECK(extract_text("A&amp;B") == "A&B");
    CHECK(extract_text("<head><title>T</title></head><body>Body</body>") == "Body");
    CHECK(extract_text("<style>p{}</style><!-- hidden --><p>a&lt;b &#x6E29;&#27849;</p>") ==
          "a<b 温泉");
    CHECK(extract_text("<p>unclosed <b>tags") == "unclosed tags");
    CHECK(extract_text("<<>>") .find('<') != std::string::npos);
    CHECK(extract_text("") == "");
  }

  TEST_CASE("digests and encodings") {
    // Known vectors.
    CHECK(crypto::sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(crypto::crc32("123456789") == 0xCBF43926u);
    CHECK(crypto::base64url_encode("\xfb\xff") == "-_8");
    CHECK(crypto::base64url_decode("-_8") == std::string("\xfb\xff"));
    CHECK_FALSE(crypto::base64url_decode("a+b/"));
    // RFC 7636 appendix B.
    CHECK(crypto::pkce_challenge("dBjftJeZ4CVP-mB92K27uhbUJU1p1r_wW1gFWFOEjXk") ==
          "E9Melhoa2OwvFrEMTJguCHaoeK1t8URWbuGJSstw-cM");
  }

  TEST_CASE("ed25519 keys") {
    auto key = crypto::Ed25519Key::generate();
    auto sig = key.sign("message");
    CHECK(key.verify("message", sig));
    CHECK_FALSE(key.verify("messagf", sig));
    auto pub = crypto::Ed25519Key::from_public_raw(key.public_raw());
    CHECK_FALSE(pub.has_private());
    CHECK(pub.verify("message", sig));
    CHECK(pub.thumbprint() == key.thumbprint());
    auto reloaded = crypto::Ed25519Key::from_private_pem(key.private_pem());
    CHECK(reloaded.public_raw() == key.public_raw());
  }
}
