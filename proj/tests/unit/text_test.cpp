#include "narravine/common/text.hpp"

#include <gtest/gtest.h>

#include "narravine/common/hash.hpp"

namespace narravine::text {
namespace {

TEST(TextTest, CountsWordsIgnoringBarePunctuation) {
  EXPECT_EQ(count_words("A grey smiling koala"), 4);
  EXPECT_EQ(count_words("  Once upon a time -- there was a castle!  "), 8);
  EXPECT_EQ(count_words(""), 0);
  EXPECT_EQ(count_words("... !!"), 0);
}

TEST(TextTest, TruncateKeepsOriginalSpelling) {
  EXPECT_EQ(truncate_words("One, two, three four.", 2), "One, two,");
  EXPECT_EQ(truncate_words("short text", 10), "short text");
  EXPECT_EQ(count_words(truncate_words("a b c d e f g h i j k l m n o", 10)), 10);
}

TEST(TextTest, WholeWordMatching) {
  EXPECT_TRUE(contains_word("A shiny Sticker here", "sticker"));
  EXPECT_TRUE(contains_word("two stickers", "sticker"));
  EXPECT_TRUE(contains_word("a sticker-like thing", "sticker"));
  EXPECT_TRUE(contains_word("\"Sticker.\"", "sticker"));
  EXPECT_FALSE(contains_word("a stick figure", "sticker"));
  EXPECT_FALSE(contains_word("cartoonish", "cartoon"));
}

TEST(TextTest, RemoveWordsDropsMatchingTokens) {
  std::vector<std::string> bad{"sticker", "cartoon"};
  EXPECT_EQ(remove_words("A cartoon koala on a sticker.", bad), "A koala on a");
}

TEST(HashTest, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(base64_encode("hello"), "aGVsbG8=");
}

}  // namespace
}  // namespace narravine::text
