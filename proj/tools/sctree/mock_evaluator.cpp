#include "mock_evaluator.hpp"

#include <random>
#include <regex>

#include "sctree/errors.hpp"

namespace sctree::cli {

namespace {

constexpr const char* kSubjects[] = {"The city council", "A regional bank", "The research team", "Local farmers",
                                     "The national museum", "A group of engineers", "The transport authority",
                                     "Several hospitals", "The football club", "A small bakery"};
constexpr const char* kVerbs[] = {"announced", "postponed", "approved", "reviewed", "celebrated", "questioned",
                                  "completed", "expanded", "funded", "criticised"};
constexpr const char* kObjects[] = {"a new bridge across the river", "the annual harvest festival",
                                    "plans for cheaper public housing", "a study on coastal erosion",
                                    "the restoration of an old library", "a programme for young apprentices",
                                    "the opening of a night train", "stricter rules on river pollution",
                                    "an exhibition of medieval maps", "the merger of two schools"};
constexpr const char* kTails[] = {"after months of debate", "despite heavy rain on Monday",
                                  "to the surprise of many residents", "with support from the regional government",
                                  "following complaints from shop owners", "ahead of the winter season",
                                  "according to officials on Tuesday", "as prices continued to rise",
                                  "in a brief statement to reporters", "while protesters gathered outside"};

template <std::size_t N>
const char* pick(std::mt19937_64& rng, const char* const (&options)[N]) {
  return options[rng() % N];
}

std::string fenced(const std::string& yaml) { return "```yaml\n" + yaml + "```\n"; }

std::string indent(const std::string& code, const std::string& prefix) {
  std::string out;
  std::size_t start = 0;
  while (start < code.size()) {
    const auto end = code.find('\n', start);
    const auto line = code.substr(start, end == std::string::npos ? std::string::npos : end - start);
    out += prefix + line + "\n";
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

std::string sentence_input(std::mt19937_64& rng) {
  constexpr const char* words[] = {"tree", "path", "node", "a", "consistency", "model", "is", "on", "translation",
                                   "of", "score", "benchmark", "we", "round", "trip", "code"};
  std::string s;
  const auto count = 3 + rng() % 9;
  for (std::size_t i = 0; i < count; ++i) {
    if (i) s += ' ';
    s += pick(rng, words);
  }
  return s;
}

std::string int_list(std::mt19937_64& rng, std::size_t max_len) {
  std::string s = "[";
  const auto len = rng() % (max_len + 1);
  for (std::size_t i = 0; i < len; ++i) {
    if (i) s += ", ";
    s += std::to_string(static_cast<int>(rng() % 41) - 20);
  }
  return s + "]";
}

}  // namespace

std::string mock_translation_root(std::size_t index) {
  std::mt19937_64 rng(0x5eedULL + index);
  std::string paragraph;
  for (int s = 0; s < 4; ++s) {
    if (s) paragraph += ' ';
    paragraph += std::string(pick(rng, kSubjects)) + " " + pick(rng, kVerbs) + " " + pick(rng, kObjects) + " " +
                 pick(rng, kTails) + ".";
  }
  paragraph += " Story " + std::to_string(index + 1) + " ends here.";
  const std::string code = "def main():\n    return " + quote(paragraph);
  return fenced("code: |\n" + indent(code, "  "));
}

std::string mock_programming_root(std::size_t index) {
  std::mt19937_64 rng(0xc0deULL + index);
  const auto k = std::to_string(2 + index / 5);
  std::string problem, code, inputs;
  std::vector<std::string> cases;
  switch (index % 5) {
    case 0:
      problem = "Given n, return the sum of the first n positive multiples of " + k + ".";
      code = "def main(n):\n    total = 0\n    for i in range(1, n + 1):\n        total += i * " + k + "\n    return total";
      for (int j = 0; j < 20; ++j) cases.push_back("[" + std::to_string(j * 3 + static_cast<int>(index)) + "]");
      break;
    case 1:
      problem = "Count the words in a sentence that are longer than " + k + " characters.";
      code = "def main(sentence):\n    return len([w for w in sentence.split() if len(w) > " + k + "])";
      for (int j = 0; j < 20; ++j) cases.push_back("[" + quote(sentence_input(rng)) + "]");
      break;
    case 2:
      problem = "Rotate a list of integers to the left by " + k + " positions.";
      code = "def main(xs):\n    if not xs:\n        return []\n    k = " + k +
             " % len(xs)\n    return xs[k:] + xs[:k]";
      for (int j = 0; j < 20; ++j) cases.push_back("[" + int_list(rng, 9) + "]");
      break;
    case 3:
      problem = "Return, in ascending order, the distinct values x of a list such that x + " + k +
                " also occurs in the list.";
      code = "def main(xs):\n    seen = set(xs)\n    return sorted(x for x in seen if x + " + k + " in seen)";
      for (int j = 0; j < 20; ++j) cases.push_back("[" + int_list(rng, 12) + "]");
      break;
    default:
      problem = "Return the n-th Fibonacci number modulo " + std::to_string(1000 + index) + ".";
      code = "def main(n):\n    a, b = 0, 1\n    for _ in range(n):\n        a, b = b, (a + b) % " +
             std::to_string(1000 + index) + "\n    return a";
      for (int j = 0; j < 20; ++j) cases.push_back("[" + std::to_string(j * 7) + "]");
      break;
  }
  inputs = "[";
  for (std::size_t i = 0; i < cases.size(); ++i) inputs += (i ? ", " : "") + cases[i];
  inputs += "]";
  return fenced("problem: " + quote(problem) + "\ncode: |\n" + indent(code, "  ") + "inputs: " + inputs + "\n");
}

std::string MockEvaluator::chat(std::string_view, std::string_view user_text) {
  const std::string user(user_text);
  if (user.find("ISO 639-1") != std::string::npos) return fenced("- fr\n- es\n- de\n");
  static const std::regex item(R"(This is item (\d+) of (\d+))");
  std::smatch m;
  if (!std::regex_search(user, m, item)) throw ProtocolError("mock evaluator: unrecognised request");
  const std::size_t index = std::stoul(m[1].str()) - 1;
  return kind_ == TaskKind::translation ? mock_translation_root(index) : mock_programming_root(index);
}

}  // namespace sctree::cli
