#include <gtest/gtest.h>

#include "sctree/extract.hpp"

using namespace sctree;

TEST(DefinesMain, Variants) {
  EXPECT_TRUE(defines_main("def main():\n    return 1"));
  EXPECT_TRUE(defines_main("import math\n\ndef  main (a, b):\n    pass"));
  EXPECT_TRUE(defines_main("class X:\n    def main(self): pass"));
  EXPECT_FALSE(defines_main("def mainly(): pass"));
  EXPECT_FALSE(defines_main("def helper(): return main()"));
  EXPECT_FALSE(defines_main("# main(x)\nprint(1)"));
  EXPECT_FALSE(defines_main("define main()"));
  EXPECT_FALSE(defines_main(""));
}

TEST(Extract, ProgrammingPicksLastFencedBlockWithMain) {
  const std::string raw =
      "First attempt:\n```python\ndef main(x):\n    return x\n```\n"
      "Helper only:\n```python\ndef helper():\n    return 2\n```\n"
      "Final:\n```python\ndef main(x):\n    return x + 1\n```\nDone.";
  EXPECT_EQ(extract_content(raw, TaskKind::programming), "def main(x):\n    return x + 1");
}

TEST(Extract, ProgrammingUnfencedAndMissing) {
  EXPECT_EQ(extract_content("\n  def main():\n    return 1\n\n", TaskKind::programming), "def main():\n    return 1");
  EXPECT_EQ(extract_content("```python\ndef helper(): pass\n```", TaskKind::programming), std::nullopt);
  EXPECT_EQ(extract_content("sorry", TaskKind::programming), std::nullopt);
  EXPECT_EQ(extract_content("", TaskKind::programming), std::nullopt);
}

TEST(Extract, UnterminatedFence) {
  EXPECT_EQ(extract_content("```python\ndef main():\n    return 3\n", TaskKind::programming),
            "def main():\n    return 3");
}

TEST(Extract, TranslationPlainAndFenced) {
  EXPECT_EQ(extract_content("  Bonjour le monde.  \n", TaskKind::translation), "Bonjour le monde.");
  EXPECT_EQ(extract_content("```\nHola mundo.\n```", TaskKind::translation), "Hola mundo.");
  EXPECT_EQ(extract_content("~~~text\nZeile eins\nZeile zwei\n~~~", TaskKind::translation), "Zeile eins\nZeile zwei");
  EXPECT_EQ(extract_content("```\n\n```", TaskKind::translation), std::nullopt);
  EXPECT_EQ(extract_content(" \t\n", TaskKind::translation), std::nullopt);
  EXPECT_EQ(extract_content("```python\ndef main():\n    return \"x\"\n```\nnotes", TaskKind::translation),
            "def main():\n    return \"x\"");
}

TEST(Extract, Idempotent) {
  const std::vector<std::string> samples = {
      "```python\ndef main(n):\n    return n\n```",
      "text before\n```\ndef main(): return 1\n```\nafter",
      "plain paragraph\nwith two lines  ",
      "```\nfenced paragraph\n```\ntrailing words",
      "  def main():\n      return [1, 2]\n",
      "~~~\nx\n~~~\n```\ny\n```",
  };
  for (const auto kind : {TaskKind::translation, TaskKind::programming}) {
    for (const auto& s : samples) {
      const auto once = extract_content(s, kind);
      if (!once) continue;
      EXPECT_EQ(extract_content(*once, kind), once) << s;
    }
  }
}
