#include "sctree/bench.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "sctree/diagnostics.hpp"
#include "sctree/errors.hpp"
#include "sctree/exec.hpp"
#include "sctree/extract.hpp"
#include "sctree/gateway.hpp"
#include "sctree/parallel.hpp"
#include "sctree/text.hpp"

namespace sctree {

using nlohmann::json;

MetaPrompt MetaPrompt::default_for(TaskKind kind) {
  if (kind == TaskKind::translation) {
    return {kind,
            "Write a 400 word, complicated English paragraph that might appear on a news website.\n"
            "Please do this in a function way, e.g. provide a function called \"main\" that returns the "
            "content as a string."};
  }
  return {kind,
          "Write a LeetCode-Hard style problem. The problem must be super hard, even a graduate student in "
          "computer science will struggle to solve it.\n"
          "Do not attempt to generate long, nested dicts. But it will require a very long and complicated "
          "solution.\n"
          "The execution time should be very short. However, it does not need to be super long. It can be "
          "shorter, but it must be really hard.\n"
          "Please do this in a functional way, e.g., provide a function called \"main\" that returns the "
          "intended answer."};
}

// ---------------------------------------------------------------------------------------------
// Validation

void BenchmarkFile::validate() const {
  if (evaluator_model.empty()) throw ParseError("evaluator", "evaluator model must be named");
  if (pairs.empty()) throw ParseError("pairs", "at least one operation pair is required");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto field = "pairs[" + std::to_string(i) + "]";
    if (pairs[i].forward_prompt.empty()) throw ParseError(field + ".forward", "empty prompt");
    if (pairs[i].inverse_prompt.empty()) throw ParseError(field + ".inverse", "empty prompt");
    if (!labels.insert(pairs[i].label).second) throw ParseError(field + ".label", "duplicate label '" + pairs[i].label + "'");
  }
  if (roots.empty()) throw ParseError("roots", "at least one root is required");
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const auto field = "roots[" + std::to_string(i) + "]";
    const auto& root = roots[i];
    if (root.content.empty()) throw ParseError(field + ".code", "empty content");
    if (task_kind == TaskKind::translation) {
      if (!root.inputs.empty()) throw ParseError(field + ".inputs", "translation roots take no inputs");
      if (!root.problem.empty()) throw ParseError(field + ".problem", "translation roots have no problem statement");
    } else {
      if (root.inputs.size() != kProgrammingInputCount) {
        throw ParseError(field + ".inputs", "expected " + std::to_string(kProgrammingInputCount) + " inputs, found " +
                                                std::to_string(root.inputs.size()));
      }
      for (std::size_t j = 0; j < root.inputs.size(); ++j) {
        if (!root.inputs[j].args.is_array()) {
          throw ParseError(field + ".inputs[" + std::to_string(j) + "]", "expected an argument list");
        }
      }
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (roots[j].content == root.content) {
        throw ParseError(field + ".code", "duplicates roots[" + std::to_string(j) + "]");
      }
    }
  }
}

// ---------------------------------------------------------------------------------------------
// YAML

namespace {

void emit_text(YAML::Emitter& out, const std::string& s) { out << YAML::DoubleQuoted << s; }

void emit_value(YAML::Emitter& out, const json& value) {
  switch (value.type()) {
    case json::value_t::null: out << YAML::Null; break;
    case json::value_t::boolean: out << (value.get<bool>() ? "true" : "false"); break;
    case json::value_t::number_integer: out << value.get<std::int64_t>(); break;
    case json::value_t::number_unsigned: out << value.get<std::uint64_t>(); break;
    case json::value_t::number_float: {
      auto s = text::shortest_double(value.get<double>());
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      out << s;
      break;
    }
    case json::value_t::string: emit_text(out, value.get<std::string>()); break;
    case json::value_t::array:
      out << YAML::Flow << YAML::BeginSeq;
      for (const auto& item : value) emit_value(out, item);
      out << YAML::EndSeq;
      break;
    case json::value_t::object:
      out << YAML::Flow << YAML::BeginMap;
      for (const auto& [key, item] : value.items()) {
        out << YAML::Key;
        emit_text(out, key);
        out << YAML::Value;
        emit_value(out, item);
      }
      out << YAML::EndMap;
      break;
    default: throw ConfigError("test input holds a value that cannot be written to YAML");
  }
}

json scalar_to_json(const YAML::Node& node, const std::string& field) {
  const auto& s = node.Scalar();
  if (node.Tag() == "!") return s;  // quoted scalar
  if (s.empty() || s == "~" || s == "null" || s == "Null" || s == "NULL") return nullptr;
  if (s == "true" || s == "True" || s == "TRUE") return true;
  if (s == "false" || s == "False" || s == "FALSE") return false;
  std::int64_t integer = 0;
  if (const auto r = std::from_chars(s.data(), s.data() + s.size(), integer); r.ec == std::errc() && r.ptr == s.data() + s.size()) {
    return integer;
  }
  double real = 0.0;
  if (const auto r = std::from_chars(s.data(), s.data() + s.size(), real); r.ec == std::errc() && r.ptr == s.data() + s.size()) {
    if (!std::isfinite(real)) throw ParseError(field, "non-finite number");
    return real;
  }
  return s;
}

json yaml_to_json(const YAML::Node& node, const std::string& field) {
  switch (node.Type()) {
    case YAML::NodeType::Null: return nullptr;
    case YAML::NodeType::Scalar: return scalar_to_json(node, field);
    case YAML::NodeType::Sequence: {
      json out = json::array();
      for (std::size_t i = 0; i < node.size(); ++i) out.push_back(yaml_to_json(node[i], field + "[" + std::to_string(i) + "]"));
      return out;
    }
    case YAML::NodeType::Map: {
      json out = json::object();
      for (const auto& kv : node) {
        if (!kv.first.IsScalar()) throw ParseError(field, "mapping keys must be scalars");
        out[kv.first.Scalar()] = yaml_to_json(kv.second, field + "." + kv.first.Scalar());
      }
      return out;
    }
    case YAML::NodeType::Undefined: break;
  }
  throw ParseError(field, "undefined value");
}

void expect_keys(const YAML::Node& node, const std::string& field, std::initializer_list<std::string_view> required,
                 std::initializer_list<std::string_view> optional) {
  if (!node.IsMap()) throw ParseError(field.empty() ? "document" : field, "expected a mapping");
  const auto join = [&](std::string_view key) { return field.empty() ? std::string(key) : field + "." + std::string(key); };
  for (const auto key : required) {
    if (!node[std::string(key)]) throw ParseError(join(key), "missing field");
  }
  for (const auto& kv : node) {
    const auto key = kv.first.Scalar();
    const bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                       std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) throw ParseError(join(key), "unknown field");
  }
}

std::string text_field(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) throw ParseError(field, "expected a string");
  return node.Scalar();
}

TestInputs inputs_field(const YAML::Node& node, const std::string& field) {
  if (node.IsNull()) return {};
  if (!node.IsSequence()) throw ParseError(field, "expected a list of argument lists");
  TestInputs inputs;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const auto item_field = field + "[" + std::to_string(i) + "]";
    if (!node[i].IsSequence()) throw ParseError(item_field, "expected an argument list");
    inputs.push_back({yaml_to_json(node[i], item_field)});
  }
  return inputs;
}

}  // namespace

std::string benchmark_to_yaml(const BenchmarkFile& file) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "task" << YAML::Value << std::string(to_string(file.task_kind));
  out << YAML::Key << "evaluator" << YAML::Value;
  emit_text(out, file.evaluator_model);
  out << YAML::Key << "pairs" << YAML::Value << YAML::BeginSeq;
  for (const auto& pair : file.pairs) {
    out << YAML::BeginMap;
    out << YAML::Key << "label" << YAML::Value;
    emit_text(out, pair.label);
    out << YAML::Key << "forward" << YAML::Value;
    emit_text(out, pair.forward_prompt);
    out << YAML::Key << "inverse" << YAML::Value;
    emit_text(out, pair.inverse_prompt);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "roots" << YAML::Value << YAML::BeginSeq;
  for (const auto& root : file.roots) {
    out << YAML::BeginMap;
    if (file.task_kind == TaskKind::programming) {
      out << YAML::Key << "problem" << YAML::Value;
      emit_text(out, root.problem);
    }
    out << YAML::Key << "code" << YAML::Value;
    emit_text(out, root.content);
    if (file.task_kind == TaskKind::programming) {
      out << YAML::Key << "inputs" << YAML::Value << YAML::BeginSeq;
      for (const auto& input : root.inputs) emit_value(out, input.args);
      out << YAML::EndSeq;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  if (!out.good()) throw ConfigError(std::string("YAML emitter: ") + out.GetLastError());
  return std::string(out.c_str()) + "\n";
}

BenchmarkFile benchmark_from_yaml(std::string_view text_in) {
  YAML::Node doc;
  try {
    doc = YAML::Load(std::string(text_in));
  } catch (const YAML::Exception& e) {
    throw ParseError("document", std::string("invalid YAML: ") + e.what());
  }
  try {
    expect_keys(doc, "", {"task", "evaluator", "pairs", "roots"}, {});
    BenchmarkFile file;
    try {
      file.task_kind = parse_task_kind(text_field(doc["task"], "task"));
    } catch (const ConfigError& e) {
      throw ParseError("task", e.what());
    }
    file.evaluator_model = text_field(doc["evaluator"], "evaluator");

    const auto pairs = doc["pairs"];
    if (!pairs.IsSequence()) throw ParseError("pairs", "expected a list");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto field = "pairs[" + std::to_string(i) + "]";
      expect_keys(pairs[i], field, {"label", "forward", "inverse"}, {});
      file.pairs.push_back({text_field(pairs[i]["forward"], field + ".forward"),
                            text_field(pairs[i]["inverse"], field + ".inverse"),
                            text_field(pairs[i]["label"], field + ".label")});
    }

    const auto roots = doc["roots"];
    if (!roots.IsSequence()) throw ParseError("roots", "expected a list");
    for (std::size_t i = 0; i < roots.size(); ++i) {
      const auto field = "roots[" + std::to_string(i) + "]";
      RootSpec root;
      if (file.task_kind == TaskKind::programming) {
        expect_keys(roots[i], field, {"problem", "code", "inputs"}, {});
        root.problem = text_field(roots[i]["problem"], field + ".problem");
        root.inputs = inputs_field(roots[i]["inputs"], field + ".inputs");
      } else {
        expect_keys(roots[i], field, {"code"}, {"inputs"});
        if (roots[i]["inputs"]) root.inputs = inputs_field(roots[i]["inputs"], field + ".inputs");
      }
      root.content = text_field(roots[i]["code"], field + ".code");
      file.roots.push_back(std::move(root));
    }
    file.validate();
    return file;
  } catch (const YAML::Exception& e) {
    throw ParseError("document", e.what());
  }
}

void save_benchmark(const BenchmarkFile& file, const std::filesystem::path& path) {
  file.validate();
  const auto yaml = benchmark_to_yaml(file);
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  auto temp = path;
  temp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + temp.string() + "'");
    out << yaml;
    if (!out.flush()) throw ConfigError("cannot write '" + temp.string() + "'");
  }
  std::filesystem::rename(temp, path);
}

BenchmarkFile load_benchmark(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open benchmark '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return benchmark_from_yaml(buffer.str());
}

std::vector<std::string> smoke_check(const BenchmarkFile& file, const ExecHarness& harness,
                                     std::chrono::milliseconds timeout) {
  std::vector<std::string> failures;
  for (std::size_t i = 0; i < file.roots.size(); ++i) {
    const auto& root = file.roots[i];
    const auto transcript = harness.execute(root.content, make_cases(root.inputs, timeout), file.task_kind);
    for (std::size_t c = 0; c < transcript.per_case.size(); ++c) {
      const auto& outcome = transcript.per_case[c];
      if (outcome.status != CaseStatus::ok) {
        failures.push_back("roots[" + std::to_string(i) + "] case " + std::to_string(c) + ": " +
                           std::string(to_string(outcome.status)) + (outcome.detail.empty() ? "" : " (" + outcome.detail + ")"));
      }
    }
  }
  return failures;
}

// ---------------------------------------------------------------------------------------------
// Operation pairs

std::string language_name(std::string_view code) {
  static const std::pair<std::string_view, std::string_view> kNames[] = {
      {"ar", "Arabic"},  {"cs", "Czech"},     {"de", "German"},     {"en", "English"}, {"es", "Spanish"},
      {"fr", "French"},  {"hi", "Hindi"},     {"is", "Icelandic"},  {"it", "Italian"}, {"ja", "Japanese"},
      {"ko", "Korean"},  {"nl", "Dutch"},     {"pl", "Polish"},     {"pt", "Portuguese"}, {"ru", "Russian"},
      {"sv", "Swedish"}, {"tr", "Turkish"},   {"uk", "Ukrainian"},  {"zh", "Chinese"},
  };
  for (const auto& [c, name] : kNames) {
    if (c == code) return std::string(name);
  }
  return std::string(code);
}

namespace {

std::string translation_prompt(std::string_view from, std::string_view to) {
  return "The user message is either a paragraph of " + language_name(from) +
         " text or Python code defining a function called \"main\" that returns such a paragraph as a string. "
         "Translate the natural-language text from " + language_name(from) + " into " + language_name(to) +
         ". Keep everything else unchanged. If the input is code, reply with only the complete code in a "
         "```python fenced block; otherwise reply with only the translated paragraph.";
}

constexpr std::string_view kCodeReply =
    " Do not change the behaviour of main for any input, keep its name and signature, and reply with only the "
    "complete code in a ```python fenced block.";

OperationPair code_pair(std::string label, std::string_view forward, std::string_view inverse) {
  return {std::string(forward) + std::string(kCodeReply), std::string(inverse) + std::string(kCodeReply),
          std::move(label)};
}

}  // namespace

OperationPair translation_pair(std::string_view source, std::string_view target) {
  return {translation_prompt(source, target), translation_prompt(target, source),
          std::string(source) + "→" + std::string(target) + "→" + std::string(source)};
}

std::vector<OperationPair> default_operation_pairs(TaskKind kind) {
  if (kind == TaskKind::translation) {
    return {translation_pair("en", "fr"), translation_pair("en", "es"), translation_pair("en", "de")};
  }
  return {
      code_pair("iterative→recursive→iterative",
                "Rewrite the Python code so that its loops are expressed with recursion wherever possible.",
                "Rewrite the Python code so that its recursion is expressed with iterative loops wherever possible."),
      code_pair("add-logging→remove-logging",
                "Add logging functionality to the Python code: use the logging module to log each major step "
                "at DEBUG level. Logging must not write to standard output.",
                "Remove all logging functionality from the Python code, including the logging import."),
      code_pair("extract-helpers→inline-helpers",
                "Refactor the Python code by extracting its logical steps into separate helper functions.",
                "Refactor the Python code by inlining every helper function into main."),
  };
}

std::vector<OperationPair> propose_operation_pairs(TaskKind kind, ChatClient& evaluator, Diagnostics* diagnostics) {
  if (kind == TaskKind::programming) return default_operation_pairs(kind);
  const auto fallback = [&](const std::string& why) {
    if (diagnostics) diagnostics->record("bench", "language proposal rejected, using defaults: " + why);
    return default_operation_pairs(kind);
  };
  std::string reply;
  try {
    reply = evaluator.chat("You design machine translation benchmarks.",
                           "Name three languages other than English to round-trip translate English news "
                           "paragraphs through. Reply with only a YAML list of three ISO 639-1 codes.");
  } catch (const Error& e) {
    return fallback(e.what());
  }
  try {
    auto body = extract_content(reply, TaskKind::translation).value_or("");
    const auto node = YAML::Load(body);
    if (!node.IsSequence() || node.size() != 3) return fallback("expected a list of three codes");
    std::vector<OperationPair> pairs;
    std::set<std::string> seen;
    for (const auto& item : node) {
      if (!item.IsScalar()) return fallback("non-scalar language code");
      std::string code = item.Scalar();
      std::transform(code.begin(), code.end(), code.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      const bool letters = code.size() == 2 && std::all_of(code.begin(), code.end(), [](char c) { return c >= 'a' && c <= 'z'; });
      if (!letters || code == "en" || !seen.insert(code).second) return fallback("bad language code '" + code + "'");
      pairs.push_back(translation_pair("en", code));
    }
    return pairs;
  } catch (const YAML::Exception& e) {
    return fallback(e.what());
  }
}

// ---------------------------------------------------------------------------------------------
// Root generation

namespace {

constexpr std::string_view kGeneratorSystem = "You generate evaluation benchmarks for language models.";

std::string format_instructions(TaskKind kind) {
  if (kind == TaskKind::translation) {
    return "Reply with only YAML inside a ```yaml fenced block, containing a single key \"code\" whose value is "
           "the complete Python source of the function main, written as a literal block scalar (code: |).";
  }
  return "Reply with only YAML inside a ```yaml fenced block with exactly these keys: \"problem\" (the problem "
         "statement), \"code\" (complete Python source defining main that solves the problem, as a literal block "
         "scalar), and \"inputs\" (a list of exactly " + std::to_string(kProgrammingInputCount) +
         " test inputs, each a list of the positional arguments for main, using only numbers, strings, booleans, "
         "null, lists and string-keyed mappings). Every input must run in well under 2 seconds.";
}

std::string root_request(const MetaPrompt& meta, std::size_t index, std::size_t total, int attempt) {
  std::string prompt = meta.text + "\n\n" + format_instructions(meta.task_kind) + "\n\nThis is item " +
                       std::to_string(index + 1) + " of " + std::to_string(total) +
                       "; choose a topic different from the other items.";
  if (attempt > 1) prompt += " (Attempt " + std::to_string(attempt) + ": the previous answer was unusable.)";
  return prompt;
}

std::string yaml_body(std::string_view reply) {
  // Prefer a fenced block; fall back to the whole reply.
  std::istringstream in{std::string(reply)};
  std::string line, body;
  bool inside = false, found = false;
  while (std::getline(in, line)) {
    const auto t = text::trim(line);
    if (t.starts_with("```")) {
      if (inside) {
        found = true;
        break;
      }
      inside = true;
      continue;
    }
    if (inside) body += line + "\n";
  }
  return found || inside ? body : std::string(reply);
}

}  // namespace

RootSpec parse_root_reply(std::string_view reply, TaskKind kind) {
  YAML::Node node;
  try {
    node = YAML::Load(yaml_body(reply));
  } catch (const YAML::Exception&) {
    node = YAML::Node();
  }
  RootSpec root;
  if (!node.IsMap() || !node["code"]) {
    if (kind == TaskKind::translation) {
      const auto content = extract_content(reply, kind);
      if (content && defines_main(*content)) {
        root.content = *content;
        return root;
      }
    }
    if (!node.IsMap()) throw ParseError("reply", "expected a YAML mapping");
  }
  if (!node["code"] || !node["code"].IsScalar()) throw ParseError("reply.code", "missing code");
  const auto content = extract_content(node["code"].Scalar(), kind);
  if (!content || !defines_main(*content)) throw ParseError("reply.code", "code does not define main");
  root.content = *content;
  if (kind == TaskKind::programming) {
    if (!node["problem"] || !node["problem"].IsScalar()) throw ParseError("reply.problem", "missing problem");
    root.problem = std::string(text::trim(node["problem"].Scalar()));
    if (!node["inputs"]) throw ParseError("reply.inputs", "missing inputs");
    root.inputs = inputs_field(node["inputs"], "reply.inputs");
    if (root.inputs.size() != kProgrammingInputCount) {
      throw ParseError("reply.inputs", "expected " + std::to_string(kProgrammingInputCount) + " inputs, found " +
                                           std::to_string(root.inputs.size()));
    }
  }
  return root;
}

std::vector<RootSpec> generate_roots(const MetaPrompt& meta, ChatClient& evaluator, const ExecHarness& harness,
                                     const GenerationOptions& options, Diagnostics* diagnostics) {
  if (options.root_count < 1) throw ConfigError("root count must be >= 1");
  if (options.max_attempts < 1) throw ConfigError("max attempts must be >= 1");
  const std::size_t total = options.root_count;
  std::vector<std::optional<RootSpec>> accepted(total);
  std::vector<std::vector<std::string>> failures(total);

  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < total; ++i) {
      if (!accepted[i]) pending.push_back(i);
    }
    if (pending.empty()) break;

    std::vector<std::optional<std::string>> replies(pending.size());
    parallel_for(pending.size(), options.max_parallel, [&](std::size_t p) {
      try {
        replies[p] = evaluator.chat(kGeneratorSystem, root_request(meta, pending[p], total, attempt));
      } catch (const Error& e) {
        failures[pending[p]].push_back(std::string("attempt ") + std::to_string(attempt) + ": " + e.what());
      }
    });

    for (std::size_t p = 0; p < pending.size(); ++p) {
      const std::size_t i = pending[p];
      if (!replies[p]) continue;
      const auto fail = [&](const std::string& why) {
        failures[i].push_back("attempt " + std::to_string(attempt) + ": " + why);
        if (diagnostics) diagnostics->record("bench", "root " + std::to_string(i) + " " + failures[i].back());
      };
      RootSpec root;
      try {
        root = parse_root_reply(*replies[p], meta.task_kind);
      } catch (const ParseError& e) {
        fail(e.what());
        continue;
      }
      const bool duplicate = std::any_of(accepted.begin(), accepted.end(), [&](const auto& other) {
        return other && other->content == root.content;
      });
      if (duplicate) {
        fail("duplicates another root");
        continue;
      }
      const auto transcript = harness.execute(root.content, make_cases(root.inputs, options.case_timeout), meta.task_kind);
      const auto bad = std::find_if(transcript.per_case.begin(), transcript.per_case.end(),
                                    [](const CaseOutcome& o) { return o.status != CaseStatus::ok; });
      if (bad != transcript.per_case.end()) {
        fail("smoke execution failed on case " + std::to_string(bad - transcript.per_case.begin()) + " (" +
             std::string(to_string(bad->status)) + ")");
        continue;
      }
      accepted[i] = std::move(root);
    }
  }

  std::string report;
  std::vector<RootSpec> roots;
  for (std::size_t i = 0; i < total; ++i) {
    if (accepted[i]) {
      roots.push_back(std::move(*accepted[i]));
      continue;
    }
    report += "\n  root " + std::to_string(i) + ":";
    for (const auto& f : failures[i]) report += " [" + f + "]";
  }
  if (!report.empty()) throw BenchmarkGenerationError("benchmark generation failed for:" + report);
  return roots;
}

}  // namespace sctree
