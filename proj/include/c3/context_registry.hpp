// Copyright 2026 The C3 Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Readability contexts: the prepared context profile, seed corpora, regexes
// and gazetteers, plus loading of user-defined context documents.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "c3/builtin_registry_data.hpp"
#include "c3/error.hpp"
#include "c3/text.hpp"

namespace c3 {

enum class TypeGroup { kString, kNumber };

enum class JudgeMethod { kLlmRegex, kLlmNer, kRegex, kRuleRegex };

inline std::string_view to_string(TypeGroup g) {
  return g == TypeGroup::kString ? "STRING" : "NUMBER";
}

inline std::string_view to_string(JudgeMethod m) {
  switch (m) {
    case JudgeMethod::kLlmRegex: return "LLM_REGEX";
    case JudgeMethod::kLlmNer: return "LLM_NER";
    case JudgeMethod::kRegex: return "REGEX";
    case JudgeMethod::kRuleRegex: return "RULE_REGEX";
  }
  return "?";
}

inline TypeGroup parse_type_group(std::string_view s) {
  if (s == "STRING") return TypeGroup::kString;
  if (s == "NUMBER") return TypeGroup::kNumber;
  throw Error(ErrorKind::kInvalidArgument, "unknown type group '" + std::string(s) + "'");
}

inline JudgeMethod parse_judge_method(std::string_view s) {
  if (s == "LLM_REGEX") return JudgeMethod::kLlmRegex;
  if (s == "LLM_NER") return JudgeMethod::kLlmNer;
  if (s == "REGEX") return JudgeMethod::kRegex;
  if (s == "RULE_REGEX") return JudgeMethod::kRuleRegex;
  throw Error(ErrorKind::kInvalidArgument, "unknown judge method '" + std::string(s) + "'");
}

struct ReadabilityContext {
  std::string name;
  TypeGroup group = TypeGroup::kString;
  std::string category;
  JudgeMethod judge_method = JudgeMethod::kLlmNer;
  std::vector<std::string> examples;
  std::vector<std::string> seeds;
  std::optional<std::string> regex;
  // LOCATION and TIME: catch-alls for their category.
  bool generic = false;

  // Compiled form of `regex`; filled by the registry loader.
  std::shared_ptr<const std::regex> compiled;

  bool matches(std::string_view value) const {
    if (!compiled) {
      throw Error(ErrorKind::kPrecondition, "context " + name + " carries no regex");
    }
    return std::regex_match(value.begin(), value.end(), *compiled);
  }

  friend bool operator==(const ReadabilityContext& a, const ReadabilityContext& b) {
    return a.name == b.name && a.group == b.group && a.category == b.category &&
           a.judge_method == b.judge_method && a.examples == b.examples &&
           a.seeds == b.seeds && a.regex == b.regex && a.generic == b.generic;
  }
};

struct CategoryShot {
  std::string question;
  std::string answer;
  friend bool operator==(const CategoryShot&, const CategoryShot&) = default;
};

struct Category {
  std::string name;
  std::optional<CategoryShot> shot;
  friend bool operator==(const Category&, const Category&) = default;
};

// Names whose format rule is procedural and therefore need no regex.
inline bool has_procedural_rule(std::string_view name) {
  return name == "LONGNUMBER" || name == "FIXEDLENGTH";
}

inline bool is_valid_context_name(std::string_view name) {
  if (name.empty() || !text::is_upper(name.front())) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return text::is_upper(c) || text::is_digit(c) || c == '_';
  });
}

class ContextRegistry {
 public:
  const std::vector<ReadabilityContext>& contexts() const { return contexts_; }
  const std::vector<Category>& categories() const { return categories_; }
  const std::map<std::string, std::vector<std::string>>& gazetteers() const {
    return gazetteers_;
  }
  int fixed_length_width() const { return fixed_length_width_; }

  const ReadabilityContext* find(std::string_view name) const {
    for (const auto& c : contexts_)
      if (c.name == name) return &c;
    return nullptr;
  }

  const ReadabilityContext& lookup(std::string_view name) const {
    if (const auto* c = find(name)) return *c;
    throw Error(ErrorKind::kNotFound, "unknown context '" + std::string(name) + "'");
  }

  std::vector<const ReadabilityContext*> contexts_in(TypeGroup group) const {
    std::vector<const ReadabilityContext*> out;
    for (const auto& c : contexts_)
      if (c.group == group) out.push_back(&c);
    return out;
  }

  // Categories owning at least one context of `group`, in registry order.
  std::vector<const Category*> categories_for(TypeGroup group) const {
    std::vector<const Category*> out;
    for (const auto& cat : categories_) {
      bool used = std::any_of(contexts_.begin(), contexts_.end(), [&](const auto& c) {
        return c.group == group && c.category == cat.name;
      });
      if (used) out.push_back(&cat);
    }
    return out;
  }

  std::vector<const ReadabilityContext*> contexts_of_category(std::string_view category) const {
    std::vector<const ReadabilityContext*> out;
    for (const auto& c : contexts_)
      if (c.category == category) out.push_back(&c);
    return out;
  }

  friend bool operator==(const ContextRegistry& a, const ContextRegistry& b) {
    return a.contexts_ == b.contexts_ && a.categories_ == b.categories_ &&
           a.gazetteers_ == b.gazetteers_ && a.fixed_length_width_ == b.fixed_length_width_;
  }

 private:
  friend class RegistryBuilder;

  std::vector<ReadabilityContext> contexts_;
  std::vector<Category> categories_;
  std::map<std::string, std::vector<std::string>> gazetteers_;
  int fixed_length_width_ = 4;
};

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                                     std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorKind::kParse,
                std::string(where) + ": missing required field '" + key + "'");
  }
  return *it;
}

inline std::vector<std::string> string_list(const nlohmann::json& j, std::string_view where) {
  if (!j.is_array()) throw Error(ErrorKind::kParse, std::string(where) + ": expected array");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string())
      throw Error(ErrorKind::kParse, std::string(where) + ": expected array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace detail

inline ReadabilityContext context_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kParse, "context entry must be an object");
  ReadabilityContext c;
  c.name = detail::require(j, "name", "context").get<std::string>();
  const std::string where = "context " + c.name;
  if (!is_valid_context_name(c.name))
    throw Error(ErrorKind::kInvalidArgument, where + ": name must match [A-Z][A-Z0-9_]*");
  c.group = parse_type_group(detail::require(j, "group", where).get<std::string>());
  c.category = j.value("category", std::string("User Defined"));
  if (auto it = j.find("judge_method"); it != j.end()) {
    c.judge_method = parse_judge_method(it->get<std::string>());
  } else {
    c.judge_method = c.group == TypeGroup::kString ? JudgeMethod::kLlmNer : JudgeMethod::kRegex;
  }
  if (auto it = j.find("examples"); it != j.end()) c.examples = detail::string_list(*it, where);
  if (auto it = j.find("seeds"); it != j.end()) c.seeds = detail::string_list(*it, where);
  if (auto it = j.find("regex"); it != j.end() && !it->is_null()) {
    c.regex = it->get<std::string>();
  }
  c.generic = j.value("generic", false);
  return c;
}

inline nlohmann::json context_to_json(const ReadabilityContext& c) {
  nlohmann::json j;
  j["name"] = c.name;
  j["group"] = to_string(c.group);
  j["category"] = c.category;
  j["judge_method"] = to_string(c.judge_method);
  j["examples"] = c.examples;
  j["seeds"] = c.seeds;
  if (c.regex) j["regex"] = *c.regex;
  if (c.generic) j["generic"] = true;
  return j;
}

// Accumulates a registry from one or more documents. The first document is
// trusted (the built-in profile); later ones are user extensions and are
// validated strictly.
class RegistryBuilder {
 public:
  void merge(const nlohmann::json& doc, bool builtin) {
    if (!doc.is_object()) throw Error(ErrorKind::kParse, "registry document must be a JSON object");

    if (auto it = doc.find("categories"); it != doc.end()) {
      if (!it->is_array()) throw Error(ErrorKind::kParse, "'categories' must be an array");
      for (const auto& cj : *it) add_category(category_from_json(cj));
    }

    if (auto it = doc.find("contexts"); it != doc.end()) {
      if (!it->is_array()) throw Error(ErrorKind::kParse, "'contexts' must be an array");
      std::set<std::string> seen_here;
      for (const auto& cj : *it) {
        ReadabilityContext c = context_from_json(cj);
        if (!seen_here.insert(c.name).second) {
          throw Error(ErrorKind::kDuplicate, "duplicate context name '" + c.name + "'");
        }
        add_context(std::move(c), builtin);
      }
    }

    if (auto it = doc.find("gazetteers"); it != doc.end()) {
      if (!it->is_object()) throw Error(ErrorKind::kParse, "'gazetteers' must be an object");
      for (const auto& [label, terms] : it->items()) {
        auto& dst = reg_.gazetteers_[label];
        std::set<std::string> have;
        for (const auto& t : dst) have.insert(text::lower(t));
        for (auto& t : detail::string_list(terms, "gazetteer " + label)) {
          if (have.insert(text::lower(t)).second) dst.push_back(std::move(t));
        }
      }
    }

    if (auto it = doc.find("fixed_length_width"); it != doc.end()) {
      int w = it->get<int>();
      if (w < 1) throw Error(ErrorKind::kInvalidArgument, "fixed_length_width must be >= 1");
      reg_.fixed_length_width_ = w;
    }
  }

  ContextRegistry build() && { return std::move(reg_); }

 private:
  static Category category_from_json(const nlohmann::json& j) {
    Category cat;
    cat.name = detail::require(j, "name", "category").get<std::string>();
    if (auto it = j.find("shot"); it != j.end() && !it->is_null()) {
      CategoryShot shot;
      shot.question = detail::require(*it, "question", "category " + cat.name).get<std::string>();
      shot.answer = detail::require(*it, "answer", "category " + cat.name).get<std::string>();
      cat.shot = std::move(shot);
    }
    return cat;
  }

  void add_category(Category cat) {
    for (auto& existing : reg_.categories_) {
      if (existing.name != cat.name) continue;
      if (existing == cat) return;
      if (!existing.shot && cat.shot) {
        existing.shot = std::move(cat.shot);
        return;
      }
      if (!cat.shot) return;
      throw Error(ErrorKind::kDuplicate, "conflicting definition of category '" + cat.name + "'");
    }
    reg_.categories_.push_back(std::move(cat));
  }

  void add_context(ReadabilityContext c, bool builtin) {
    validate(c, builtin);
    if (c.regex) {
      try {
        c.compiled = std::make_shared<const std::regex>(*c.regex, std::regex::ECMAScript);
      } catch (const std::regex_error& e) {
        throw Error(ErrorKind::kInvalidArgument,
                    "context " + c.name + ": regex does not compile: " + e.what());
      }
    }
    if (const auto* existing = reg_.find(c.name)) {
      // Re-stating an existing context verbatim (e.g. reloading a serialized
      // registry) is a no-op; any other redefinition is rejected.
      if (*existing == c) return;
      throw Error(ErrorKind::kDuplicate, "duplicate context name '" + c.name + "'");
    }
    bool known_category = std::any_of(reg_.categories_.begin(), reg_.categories_.end(),
                                      [&](const Category& k) { return k.name == c.category; });
    if (!known_category) reg_.categories_.push_back(Category{c.category, std::nullopt});
    reg_.contexts_.push_back(std::move(c));
  }

  static void validate(ReadabilityContext& c, bool builtin) {
    const std::string where = "context " + c.name;
    if (c.examples.empty()) throw Error(ErrorKind::kInvalidArgument, where + ": missing examples");
    bool string_method =
        c.judge_method == JudgeMethod::kLlmRegex || c.judge_method == JudgeMethod::kLlmNer;
    if (c.group == TypeGroup::kString && !string_method) {
      throw Error(ErrorKind::kInvalidArgument, where + ": STRING contexts are judged by LLM_REGEX or LLM_NER");
    }
    if (c.group == TypeGroup::kNumber && string_method) {
      throw Error(ErrorKind::kInvalidArgument, where + ": NUMBER contexts are judged by REGEX or RULE_REGEX");
    }
    bool needs_regex = c.judge_method != JudgeMethod::kLlmNer && !has_procedural_rule(c.name);
    if (needs_regex && (!c.regex || c.regex->empty())) {
      throw Error(ErrorKind::kInvalidArgument, where + ": judge method " +
                                                   std::string(to_string(c.judge_method)) +
                                                   " requires a regex");
    }
    if (c.generic && c.regex) {
      throw Error(ErrorKind::kInvalidArgument, where + ": generic contexts carry no regex");
    }
    if (!builtin && c.group == TypeGroup::kString && c.seeds.empty()) c.seeds = c.examples;
  }

  ContextRegistry reg_;
};

inline const nlohmann::json& builtin_registry_document() {
  static const nlohmann::json doc = nlohmann::json::parse(detail::kBuiltinRegistryJson);
  return doc;
}

inline ContextRegistry builtin_registry() {
  RegistryBuilder b;
  b.merge(builtin_registry_document(), /*builtin=*/true);
  return std::move(b).build();
}

// Built-ins first, then the user's document merged on top.
inline ContextRegistry load_registry(const nlohmann::json& document) {
  RegistryBuilder b;
  b.merge(builtin_registry_document(), /*builtin=*/true);
  if (!document.is_null()) b.merge(document, /*builtin=*/false);
  return std::move(b).build();
}

inline ContextRegistry load_registry(std::string_view document_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("malformed registry document: ") + e.what());
  }
  return load_registry(doc);
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParse, path.string() + ": malformed JSON: " + e.what());
  }
}

inline ContextRegistry load_registry_file(const std::filesystem::path& path) {
  return load_registry(read_json_file(path));
}

inline nlohmann::json to_document(const ContextRegistry& reg) {
  nlohmann::json doc;
  doc["contexts"] = nlohmann::json::array();
  for (const auto& c : reg.contexts()) doc["contexts"].push_back(context_to_json(c));
  doc["categories"] = nlohmann::json::array();
  for (const auto& cat : reg.categories()) {
    nlohmann::json cj{{"name", cat.name}};
    if (cat.shot) cj["shot"] = {{"question", cat.shot->question}, {"answer", cat.shot->answer}};
    doc["categories"].push_back(std::move(cj));
  }
  doc["gazetteers"] = nlohmann::json::object();
  for (const auto& [label, terms] : reg.gazetteers()) doc["gazetteers"][label] = terms;
  doc["fixed_length_width"] = reg.fixed_length_width();
  return doc;
}

inline const std::vector<std::string>& get_seeds(const ReadabilityContext& c) {
  if (c.group != TypeGroup::kString) {
    throw Error(ErrorKind::kPrecondition, "context " + c.name + " is a NUMBER context; seeds exist only for STRING contexts");
  }
  if (c.seeds.empty()) throw Error(ErrorKind::kPrecondition, "context " + c.name + " has no seeds");
  return c.seeds;
}

}  // namespace c3
