#include "qkd3/tritcrypt.hpp"

#include <gtest/gtest.h>

#include <set>

#include "../support/generators.hpp"
#include "qkd3/errors.hpp"

using namespace qkd3;
using qkd3::testing::Gen;

namespace {

constexpr const char* kMessage = "THE RESULT IS FORTY TWO";
constexpr const char* kCode =
    "201 021 011 222 122 011 200 202 102 201 222 022 200 222 012 112 122 201 220 222 201 211 112";
constexpr const char* kKey =
    "022 001 122 110 002 100 222 201 212 222 122 212 001 221 212 002 201 121 210 212 222 122 222";
constexpr const char* kCipher =
    "220 022 100 002 121 111 122 100 011 120 011 201 201 110 221 111 020 022 100 101 120 000 001";

const std::string kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ ";

}  // namespace

TEST(Codec, SingleCharacters) {
  EXPECT_EQ(encode("T").str(), "201");
  EXPECT_EQ(encode("A").str(), "000");
  EXPECT_EQ(encode(" ").str(), "222");
  EXPECT_EQ(decode(TritString::parse("220")), "Y");
  EXPECT_EQ(decode(TritString::parse("201")), "T");
}

TEST(Codec, MessageCode) {
  EXPECT_EQ(encode(kMessage), TritString::parse(kCode));
  EXPECT_EQ(encode(kMessage).str(3), kCode);
}

TEST(Codec, LowercaseFolds) { EXPECT_EQ(encode("the result"), encode("THE RESULT")); }

TEST(Codec, Errors) {
  EXPECT_THROW(encode("HELLO!"), ValidationError);
  EXPECT_THROW(encode("Ä"), ValidationError);
  EXPECT_THROW(decode(TritString{0, 1}), ValidationError);
}

TEST(Codec, InjectiveOverAlphabet) {
  std::set<std::string> seen;
  for (char c : kAlphabet) seen.insert(encode(std::string(1, c)).str());
  EXPECT_EQ(seen.size(), 27u);
  EXPECT_EQ(decode(encode(kAlphabet)), kAlphabet);
}

TEST(Cipher, TableColumns) {
  EXPECT_EQ(encrypt(TritString::parse("201"), TritString::parse("022")).str(), "220");
  EXPECT_EQ(encrypt(TritString::parse("021"), TritString::parse("001")).str(), "022");
  EXPECT_EQ(decrypt(TritString::parse("220"), TritString::parse("022")).str(), "201");
  const auto c = TritString::parse("120012");
  EXPECT_EQ(encrypt(c, TritString::parse("000000")), c);
  EXPECT_EQ(decrypt(c, c).str(), "000000");
}

TEST(Cipher, FullMessage) {
  const auto cipher = encrypt(encode(kMessage), TritString::parse(kKey));
  EXPECT_EQ(cipher, TritString::parse(kCipher));
  EXPECT_EQ(decode(decrypt(cipher, TritString::parse(kKey))), kMessage);
}

TEST(Cipher, LengthMismatch) {
  EXPECT_THROW(encrypt(TritString{0, 1, 2}, TritString{0, 1}), ValidationError);
  EXPECT_THROW(decrypt(TritString{0, 1, 2}, TritString{0, 1, 2, 0}), ValidationError);
}

TEST(Cipher, RoundTripRandomMessages) {
  Gen g(31);
  for (int i = 0; i < 10000; ++i) {
    std::string text(1 + g.index(40), ' ');
    for (auto& c : text) c = kAlphabet[g.index(27)];
    const auto code = encode(text);
    const auto key = g.trits(code.size());
    ASSERT_EQ(decode(decrypt(encrypt(code, key), key)), text);
  }
}

TEST(Cipher, EachKeyTritGivesDistinctCipher) {
  for (int c = 0; c < 3; ++c) {
    std::set<int> out;
    for (int k = 0; k < 3; ++k) out.insert(encrypt(TritString{c}, TritString{k})[0]);
    EXPECT_EQ(out.size(), 3u);
  }
}

TEST(Cipher, UniformKeysGiveUniformCipher) {
  Gen g(32);
  const auto code = TritString::parse(std::string(30000, '1'));
  const auto cipher = encrypt(code, g.trits(code.size()));
  std::array<double, 3> counts{};
  for (std::size_t i = 0; i < cipher.size(); ++i) counts[cipher[i]] += 1.0;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - 10000.0) * (c - 10000.0) / 10000.0;
  EXPECT_LT(chi2, qkd3::testing::kChiSquare999[2]);
}
