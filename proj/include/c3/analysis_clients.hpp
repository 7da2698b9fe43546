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

// Clients for the two analysis backends: a chat-completions LLM with an
// on-disk response cache, and named-entity recognition (annotation server
// or offline gazetteer).

#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <semaphore>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <vector>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "c3/context_registry.hpp"
#include "c3/error.hpp"
#include "c3/text.hpp"

namespace c3 {

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::kIo, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

// ---- chat-completions client ----------------------------------------------

enum class Role { kSystem, kUser, kAssistant };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "?";
}

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;
  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  std::string model_id = "gpt-4-turbo";
  int max_response_tokens = 20;
  std::optional<double> temperature;  // unset: the backend's default
};

inline void validate(const ChatRequest& request) {
  if (request.messages.empty() || request.messages.front().role != Role::kSystem) {
    throw Error(ErrorKind::kPrecondition, "chat request must start with a SYSTEM message");
  }
  for (std::size_t i = 0; i < request.messages.size(); ++i) {
    if (i > 0 && request.messages[i].role == Role::kSystem) {
      throw Error(ErrorKind::kPrecondition, "chat request has more than one SYSTEM message");
    }
    if (request.messages[i].content.empty()) {
      throw Error(ErrorKind::kPrecondition, "chat message " + std::to_string(i) + " has empty content");
    }
  }
  if (request.max_response_tokens < 1) {
    throw Error(ErrorKind::kPrecondition, "max_response_tokens must be positive");
  }
}

// Wire body with whitespace-normalized contents; nlohmann::json objects keep
// keys sorted, so dump() is a canonical form.
inline nlohmann::json canonical_json(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", text::normalize_whitespace(m.content)}});
  }
  nlohmann::json body{{"model", request.model_id}, {"messages", messages}, {"max_tokens", request.max_response_tokens}};
  if (request.temperature) body["temperature"] = *request.temperature;
  return body;
}

inline std::string cache_key(const ChatRequest& request) { return sha256_hex(canonical_json(request).dump()); }

// One JSON file per key holding the canonical request and the response text.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }

  std::optional<std::string> get(const std::string& key, const nlohmann::json& canonical) const {
    std::ifstream in(dir_ / (key + ".json"), std::ios::binary);
    if (!in) return std::nullopt;
    try {
      nlohmann::json entry = nlohmann::json::parse(in);
      if (entry.at("request") != canonical) return std::nullopt;
      return entry.at("response").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;
    }
  }

  void put(const std::string& key, const nlohmann::json& canonical, const std::string& response) const {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::kIo, "cannot create cache directory " + dir_.string() + ": " + ec.message());
    std::ostringstream suffix;
    suffix << ".tmp." << std::this_thread::get_id() << "." << std::random_device{}();
    std::filesystem::path tmp = dir_ / (key + suffix.str());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
      out << nlohmann::json{{"request", canonical}, {"response", response}}.dump(2) << "\n";
      if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, dir_ / (key + ".json"), ec);
    if (ec) {
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorKind::kIo, "cannot publish cache entry " + key);
    }
  }

 private:
  std::filesystem::path dir_;
};

struct LlmConfig {
  std::string endpoint;  // full URL of the chat-completions resource
  std::string api_key;
  std::optional<std::filesystem::path> cache_dir;
  int max_in_flight = 4;
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{120};

  // Endpoint and key from C3_LLM_ENDPOINT / C3_LLM_KEY.
  static LlmConfig from_env() {
    LlmConfig c;
    if (const char* e = std::getenv("C3_LLM_ENDPOINT")) c.endpoint = e;
    if (const char* k = std::getenv("C3_LLM_KEY")) c.api_key = k;
    return c;
  }
};

namespace detail {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline SplitUrl split_url(const std::string& url) {
  static const std::regex kUrl(R"(^(https?://[^/?#]+)([/?#].*)?$)", std::regex::ECMAScript | std::regex::icase);
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) {
    throw Error(ErrorKind::kInvalidArgument, "malformed endpoint URL '" + url + "'");
  }
  std::string path = m[2].matched ? m[2].str() : "/";
  return {m[1].str(), path};
}

inline std::string excerpt(std::string_view body) {
  constexpr std::size_t kMax = 200;
  return body.size() <= kMax ? std::string(body) : std::string(body.substr(0, kMax)) + "...";
}

}  // namespace detail

class LlmClient {
 public:
  explicit LlmClient(LlmConfig config)
      : config_(std::move(config)), in_flight_(std::max(1, config_.max_in_flight)) {
    if (config_.cache_dir) cache_.emplace(*config_.cache_dir);
  }

  LlmClient(const LlmClient&) = delete;
  LlmClient& operator=(const LlmClient&) = delete;

  const LlmConfig& config() const { return config_; }

  // First completion's text; cache hits do no network I/O.
  std::string complete(const ChatRequest& request) {
    validate(request);
    const nlohmann::json canonical = canonical_json(request);
    const std::string key = sha256_hex(canonical.dump());
    if (cache_) {
      if (auto hit = cache_->get(key, canonical)) {
        cache_hits_.fetch_add(1);
        return *hit;
      }
    }
    if (config_.endpoint.empty() || config_.api_key.empty()) {
      throw Error(ErrorKind::kMissingCredential,
                  "LLM cache miss for request " + key.substr(0, 12) +
                      " and no backend configured (set C3_LLM_ENDPOINT and C3_LLM_KEY)");
    }
    std::string response = send(canonical);
    if (cache_) cache_->put(key, canonical, response);
    return response;
  }

  int cache_hits() const { return cache_hits_.load(); }
  int network_calls() const { return network_calls_.load(); }

 private:
  std::string send(const nlohmann::json& body) {
    detail::SplitUrl url = detail::split_url(config_.endpoint);
    const std::string payload = body.dump();
    auto backoff = config_.initial_backoff;
    for (int attempt = 0;; ++attempt) {
      std::string failure;
      ErrorKind kind = ErrorKind::kNetwork;
      {
        in_flight_.acquire();
        struct Release {
          std::counting_semaphore<>& s;
          ~Release() { s.release(); }
        } release{in_flight_};
        network_calls_.fetch_add(1);
        httplib::Client cli(url.origin);
        cli.set_connection_timeout(config_.timeout);
        cli.set_read_timeout(config_.timeout);
        cli.set_write_timeout(config_.timeout);
        httplib::Headers headers{{"Authorization", "Bearer " + config_.api_key}};
        auto res = cli.Post(url.path, headers, payload, "application/json");
        if (!res) {
          failure = "LLM request to " + url.origin + " failed: " + httplib::to_string(res.error());
        } else if (res->status == 429 || res->status >= 500) {
          kind = ErrorKind::kHttpStatus;
          failure = "LLM backend returned HTTP " + std::to_string(res->status) + ": " + detail::excerpt(res->body);
        } else if (res->status != 200) {
          throw Error(ErrorKind::kHttpStatus,
                      "LLM backend returned HTTP " + std::to_string(res->status) + ": " + detail::excerpt(res->body));
        } else {
          return parse_completion(res->body);
        }
      }
      if (attempt >= config_.max_retries) throw Error(kind, failure);
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }

  static std::string parse_completion(const std::string& body) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error&) {
      throw Error(ErrorKind::kResponseParse, "LLM response is not JSON: " + detail::excerpt(body));
    }
    try {
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorKind::kResponseParse,
                  "LLM response lacks choices[0].message.content: " + detail::excerpt(body));
    }
  }

  LlmConfig config_;
  std::optional<ResponseCache> cache_;
  std::counting_semaphore<> in_flight_;
  std::atomic<int> cache_hits_{0};
  std::atomic<int> network_calls_{0};
};

// ---- named-entity recognition ---------------------------------------------

enum class NerBackend { kServer, kGazetteer };

inline NerBackend parse_ner_backend(std::string_view s) {
  std::string l = text::lower(s);
  if (l == "server") return NerBackend::kServer;
  if (l == "gazetteer") return NerBackend::kGazetteer;
  throw Error(ErrorKind::kInvalidArgument, "unknown NER backend '" + std::string(s) + "'");
}

struct NerAnnotation {
  std::string span_text;
  std::string label;
  friend bool operator==(const NerAnnotation&, const NerAnnotation&) = default;
};

// Labels NER can assign: STRING contexts outside the Cyberspace category.
inline std::set<std::string> ner_labels(const ContextRegistry& registry) {
  std::set<std::string> out;
  for (const auto* c : registry.contexts_in(TypeGroup::kString))
    if (c->category != "Cyberspace") out.insert(c->name);
  return out;
}

// Reads one term per line from every `<LABEL>.txt` file in `dir`.
inline std::map<std::string, std::vector<std::string>> load_gazetteer_dir(const std::filesystem::path& dir) {
  std::map<std::string, std::vector<std::string>> out;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::string line;
    auto& terms = out[text::upper(entry.path().stem().string())];
    while (std::getline(in, line)) {
      std::string_view t = text::trim(line);
      if (!t.empty()) terms.emplace_back(t);
    }
  }
  if (ec) throw Error(ErrorKind::kIo, "cannot read gazetteer directory " + dir.string() + ": " + ec.message());
  return out;
}

namespace detail {

inline const std::unordered_set<std::string>& ner_stopwords() {
  static const std::unordered_set<std::string> s = {"of", "the", "and", "de", "la", "le", "on",
                                                    "at", "in", "for", "a", "an", "per"};
  return s;
}

// Qualifiers programmers prefix to placeholder values ("testUser").
inline const std::unordered_set<std::string>& placeholder_qualifiers() {
  static const std::unordered_set<std::string> s = {"test", "sample", "example", "dummy", "mock",
                                                    "fake", "my",     "default", "new",   "some",
                                                    "valid", "other", "another"};
  return s;
}

inline constexpr std::string_view kNumToken = "<num>";

inline bool is_dropped_punct(char c) {
  return std::string_view(".,!?;'\"()[]-/_:").find(c) != std::string_view::npos;
}

inline bool is_word_char(char c) { return text::is_alpha(c) || text::is_high(c); }

// Lowercased tokens: camelCase-split words, numbers as <num>, symbols kept.
inline std::vector<std::string> ner_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (is_word_char(c)) {
      std::size_t j = i + 1;
      while (j < s.size() && is_word_char(s[j])) {
        bool lower_to_upper = text::is_lower(s[j - 1]) && text::is_upper(s[j]);
        bool acronym_end = text::is_upper(s[j - 1]) && text::is_upper(s[j]) && j + 1 < s.size() &&
                           text::is_lower(s[j + 1]);
        if (lower_to_upper || acronym_end) break;
        ++j;
      }
      out.push_back(text::lower(s.substr(i, j - i)));
      i = j;
    } else if (text::is_digit(c)) {
      std::size_t j = i + 1;
      while (j < s.size() && (text::is_digit(s[j]) || ((s[j] == '.' || s[j] == ',' || s[j] == ':') &&
                                                      j + 1 < s.size() && text::is_digit(s[j + 1])))) {
        ++j;
      }
      out.emplace_back(kNumToken);
      i = j;
    } else if (text::is_space(c) || is_dropped_punct(c)) {
      ++i;
    } else {
      out.emplace_back(1, c);
      ++i;
    }
  }
  return out;
}

}  // namespace detail

// Deterministic offline NER. A text gets label L when its trimmed, lowercased
// form is a term of L, or when every remaining token (after dropping
// stopwords and placeholder qualifiers) belongs to L's token vocabulary.
class Gazetteer {
 public:
  Gazetteer() = default;
  explicit Gazetteer(const std::map<std::string, std::vector<std::string>>& terms) {
    for (const auto& [label, list] : terms) add_terms(label, list);
  }

  void add_terms(const std::string& label, const std::vector<std::string>& terms) {
    auto& entry = labels_[label];
    for (const auto& t : terms) {
      std::string key = text::lower(text::trim(t));
      if (key.empty()) continue;
      entry.terms.insert(key);
      for (auto& tok : detail::ner_tokens(key)) {
        if (detail::ner_stopwords().count(tok)) continue;
        if (tok.size() == 1 && detail::is_word_char(tok[0])) continue;
        entry.tokens.insert(std::move(tok));
      }
    }
  }

  bool has_label(const std::string& label) const { return labels_.count(label) > 0; }

  std::vector<NerAnnotation> annotate(std::string_view value) const {
    std::string span(text::trim(value));
    std::string key = text::lower(span);
    std::vector<NerAnnotation> out;
    if (key.empty()) return out;
    std::set<std::string> found;
    for (const auto& [label, entry] : labels_)
      if (entry.terms.count(key)) found.insert(label);

    static const std::regex kDate(R"(^(\d{4}-\d{1,2}-\d{1,2}|\d{1,2}/\d{1,2}/\d{2,4})$)");
    static const std::regex kTime(R"(^\d{1,2}:\d{2}(:\d{2})?\s*([aApP][mM])?$)");
    bool pattern = false;
    if (std::regex_match(key, kDate)) {
      found.insert("DATE");
      pattern = true;
    } else if (std::regex_match(key, kTime)) {
      found.insert("TIME");
      pattern = true;
    }

    std::vector<std::string> tokens;
    for (auto& t : detail::ner_tokens(span))
      if (!detail::ner_stopwords().count(t)) tokens.push_back(std::move(t));
    bool has_other = std::any_of(tokens.begin(), tokens.end(), [](const std::string& t) {
      return !detail::placeholder_qualifiers().count(t);
    });
    if (has_other) {
      tokens.erase(std::remove_if(tokens.begin(), tokens.end(),
                                  [](const std::string& t) { return detail::placeholder_qualifiers().count(t) > 0; }),
                   tokens.end());
    }
    bool numeric_only = !tokens.empty() && std::all_of(tokens.begin(), tokens.end(), [](const std::string& t) {
      return t == detail::kNumToken;
    });
    if (numeric_only && !pattern) {
      found.insert("CARDINAL");
    } else if (!tokens.empty() && !numeric_only) {
      for (const auto& [label, entry] : labels_) {
        bool all = std::all_of(tokens.begin(), tokens.end(),
                               [&](const std::string& t) { return entry.tokens.count(t) > 0; });
        if (all) found.insert(label);
      }
    }
    for (const auto& label : found) out.push_back({span, label});
    return out;
  }

 private:
  struct Entry {
    std::unordered_set<std::string> terms;
    std::unordered_set<std::string> tokens;
  };
  std::map<std::string, Entry> labels_;
};

// Maps the annotation server's label set onto the registry's NER contexts.
inline std::string map_server_label(std::string_view label) {
  if (label == "SET") return "TIMESET";
  if (label == "NUMBER") return "CARDINAL";
  if (label == "NATIONALITY" || label == "RELIGION") return "NORP";
  if (label == "STATE_OR_PROVINCE") return "GPE";
  return std::string(label);
}

// Minimal percent-encoding for the properties query parameter.
inline std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (text::is_alnum(static_cast<char>(c)) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

class NerClient {
 public:
  NerClient(const ContextRegistry& registry, NerBackend backend, std::string server_url = {})
      : backend_(backend), server_url_(std::move(server_url)), labels_(ner_labels(registry)),
        gazetteer_(registry.gazetteers()) {
    if (backend_ == NerBackend::kServer && server_url_.empty()) {
      if (const char* e = std::getenv("C3_NER_ENDPOINT")) server_url_ = e;
    }
  }

  NerBackend backend() const { return backend_; }
  Gazetteer& gazetteer() { return gazetteer_; }

  std::vector<NerAnnotation> annotate(std::string_view value) const {
    if (backend_ == NerBackend::kGazetteer) return gazetteer_.annotate(value);
    return annotate_with_server(value);
  }

 private:
  std::vector<NerAnnotation> annotate_with_server(std::string_view value) const {
    if (server_url_.empty()) {
      throw Error(ErrorKind::kPrecondition, "NER server backend needs an endpoint (--ner-url or C3_NER_ENDPOINT)");
    }
    detail::SplitUrl url = detail::split_url(server_url_);
    std::string path = url.path;
    if (path.find('?') == std::string::npos) {
      path += "?properties=" + url_encode(R"({"annotators":"ner","outputFormat":"json"})");
    }
    httplib::Client cli(url.origin);
    cli.set_read_timeout(std::chrono::seconds(60));
    auto res = cli.Post(path, std::string(value), "text/plain; charset=utf-8");
    if (!res) {
      throw Error(ErrorKind::kNetwork, "NER server " + url.origin + " unreachable: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw Error(ErrorKind::kHttpStatus,
                  "NER server returned HTTP " + std::to_string(res->status) + ": " + detail::excerpt(res->body));
    }
    std::vector<NerAnnotation> out;
    try {
      auto j = nlohmann::json::parse(res->body);
      for (const auto& sentence : j.at("sentences")) {
        auto mentions = sentence.find("entitymentions");
        if (mentions == sentence.end()) continue;
        for (const auto& m : *mentions) {
          std::string label = map_server_label(m.at("ner").get<std::string>());
          if (!labels_.count(label)) continue;
          out.push_back({m.at("text").get<std::string>(), label});
        }
      }
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorKind::kResponseParse, "malformed NER server response: " + detail::excerpt(res->body));
    }
    return out;
  }

  NerBackend backend_;
  std::string server_url_;
  std::set<std::string> labels_;
  Gazetteer gazetteer_;
};

}  // namespace c3
