#pragma once

// Requires cpp-httplib and nlohmann/json. Define CPPHTTPLIB_OPENSSL_SUPPORT
// (and link OpenSSL) before including to reach https endpoints.

#include <chrono>
#include <cstdlib>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "clausekit/logic/translator.hpp"

namespace clausekit::logic {

inline constexpr const char* kTranslatorKeyEnv = "CLAUSEKIT_TRANSLATOR_KEY";

struct HttpTranslatorConfig {
  /// Full URL, e.g. `https://host:8443/v1/translate`.
  std::string endpoint;
  std::string model = "o1-mini";
  /// Name of the environment variable carrying the bearer credential.
  std::string api_key_env = kTranslatorKeyEnv;
  std::chrono::seconds timeout{30};
};

/// JSON-over-HTTP translator.
///   request:  {"sentence", "session_id", "instruction_template", "model"}
///   response: {"expression": "...", "glossary": {"P": "phrase", ...}}
class HttpTranslator final : public TranslatorClient {
 public:
  explicit HttpTranslator(HttpTranslatorConfig cfg) : cfg_(std::move(cfg)) {
    auto scheme_end = cfg_.endpoint.find("://");
    if (scheme_end == std::string::npos) throw std::invalid_argument("translator endpoint needs a scheme: " + cfg_.endpoint);
    auto path_start = cfg_.endpoint.find('/', scheme_end + 3);
    base_ = cfg_.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : cfg_.endpoint.substr(path_start);
  }

  TranslationResponse translate(const TranslationRequest& request) override {
    using Code = TranslatorError::Code;
    const char* key = std::getenv(cfg_.api_key_env.c_str());

    httplib::Client client(base_);
    client.set_connection_timeout(cfg_.timeout);
    client.set_read_timeout(cfg_.timeout);
    client.set_write_timeout(cfg_.timeout);
    httplib::Headers headers;
    if (key != nullptr && *key != '\0') headers.emplace("Authorization", std::string("Bearer ") + key);

    nlohmann::json body{{"sentence", request.sentence},
                        {"session_id", request.session_id},
                        {"instruction_template", request.instruction_template},
                        {"model", cfg_.model}};
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) throw TranslatorError(Code::TranslatorUnavailable, "translator request failed: " + httplib::to_string(res.error()));
    if (res->status == 401 || res->status == 403)
      throw TranslatorError(Code::TranslatorUnavailable, "translator rejected credentials (HTTP " + std::to_string(res->status) + ")",
                            res->body);
    if (res->status != 200)
      throw TranslatorError(Code::TranslatorUnavailable, "translator returned HTTP " + std::to_string(res->status), res->body);

    try {
      auto j = nlohmann::json::parse(res->body);
      TranslationResponse out;
      out.expression = j.at("expression").get<std::string>();
      if (j.contains("glossary"))
        for (const auto& [atom, phrase] : j.at("glossary").items()) out.glossary[atom] = phrase.get<std::string>();
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw TranslatorError(Code::MalformedTranslation, std::string("malformed translator reply: ") + e.what(), res->body);
    }
  }

 private:
  HttpTranslatorConfig cfg_;
  std::string base_;
  std::string path_;
};

}  // namespace clausekit::logic
