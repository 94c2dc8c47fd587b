#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qx/labels.hpp"
#include "qx/rules.hpp"
#include "qx/tokenize.hpp"
#include "qx/types.hpp"

namespace qx {

// ---------------------------------------------------------------------------
// Wire protocol
//
//   POST <endpoint>/v1/tag   Content-Type: application/json
//   request:  {"id":"<string>","tokens":["<t1>",...]}
//   response: {"id":"<string>","tags":["O","B-Question",...]}
//   non-2xx:  {"error":"<message>"}
// ---------------------------------------------------------------------------

inline constexpr std::string_view kTagPath = "/v1/tag";

struct TagRequest {
  std::string id;
  std::vector<std::string> tokens;
  bool operator==(const TagRequest&) const = default;
};

struct TagResponse {
  std::string id;
  std::vector<std::string> tags;
  bool operator==(const TagResponse&) const = default;
};

std::string serialize_request(const TagRequest& request);
/// Throws ParseError on anything that is not a request object.
TagRequest parse_request(std::string_view body);
std::string serialize_response(const TagResponse& response);
/// Throws ParseError on anything that is not a response object.
TagResponse parse_response(std::string_view body);
std::string serialize_error(std::string_view message);

/// Checks the response against its request: echoed id, one tag per token,
/// every tag a valid BioTag. Throws MalformedResponse naming `endpoint`.
TagSequence validate_response(const TagRequest& request,
                              const TagResponse& response,
                              const std::string& endpoint);

// ---------------------------------------------------------------------------
// Long-input chunking
// ---------------------------------------------------------------------------

/// Windows of at most max_len subtokens; consecutive windows overlap by
/// `stride` positions. Requires 0 < stride < max_len.
std::vector<SubtokenRange> chunk_windows(std::size_t n_subtokens,
                                         std::size_t max_len,
                                         std::size_t stride);

/// Window contents for `subtokens` (convenience wrapper over chunk_windows).
std::vector<std::vector<Token>> chunk_long_input(
    const std::vector<Token>& subtokens, std::size_t max_len,
    std::size_t stride);

/// Each position takes its tag from the window in which it lies farthest
/// from a window edge, where the distance is min(p - begin, end - p); ties go
/// to the earlier window.
TagSequence merge_windows(const std::vector<SubtokenRange>& windows,
                          const std::vector<TagSequence>& window_tags,
                          std::size_t n_subtokens);

// ---------------------------------------------------------------------------
// Taggers
// ---------------------------------------------------------------------------

struct RuleTagger {
  RuleSet rules;
};

struct RemoteTagger {
  /// Base URL, e.g. "http://127.0.0.1:8080". "/v1/tag" is appended unless the
  /// URL already ends with it.
  std::string endpoint;
  std::chrono::milliseconds timeout{5000};
  std::shared_ptr<const Vocabulary> vocab;
  std::size_t max_len = 512;
  std::size_t stride = 128;
  /// Upper bound on concurrent requests issued by tag_documents.
  std::size_t max_in_flight = 4;

  /// Throws ContractViolation on a non-positive timeout, missing vocabulary
  /// or bad chunking parameters.
  void validate() const;
};

/// Test double: returns stored word-level tags by document id.
struct OracleTagger {
  std::map<std::string, TagSequence, std::less<>> table;
};

using Tagger = std::variant<RuleTagger, RemoteTagger, OracleTagger>;

/// A document to tag: its id (used by the oracle and as the request id) and
/// raw text.
struct Document {
  std::string id;
  std::string text;
};

/// Word-level tags for `words` (the word tokens of `doc.text`).
/// Oracle lookups fail with ContractViolation when the id is unknown or the
/// stored length differs from the word count.
TagSequence tag(const Tagger& tagger, const Document& doc,
                const std::vector<Token>& words);

/// word_tokenize -> tag -> decode_spans, with span text attached.
std::vector<QuestionSpan> extract(const Tagger& tagger, const Document& doc,
                                  RepairPolicy policy);

/// Runs extract over many documents; remote taggers keep up to
/// max_in_flight requests outstanding. Output order follows `docs`. The
/// first failure is rethrown after in-flight work finishes.
std::vector<std::vector<QuestionSpan>> extract_many(
    const Tagger& tagger, const std::vector<Document>& docs,
    RepairPolicy policy);

/// Sends one request (one retry on transport failure or timeout, none on a
/// malformed response) and returns subtoken-level tags.
TagSequence remote_tag_subtokens(const RemoteTagger& remote,
                                 const TagRequest& request);

}  // namespace qx
