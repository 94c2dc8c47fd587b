#include <doctest.h>

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "qx/error.hpp"
#include "qx/labels.hpp"
#include "qx/tagger.hpp"
#include "stub_server.hpp"
#include "test_util.hpp"

using namespace qx;
using namespace std::chrono_literals;
using qx::testing::StubServer;

namespace {

void reply(httplib::Response& res, const std::string& body, int status = 200) {
  res.status = status;
  res.set_content(body, "application/json");
}

// Tags every token O and echoes the id.
void all_outside(const httplib::Request& req, httplib::Response& res) {
  const auto r = parse_request(req.body);
  reply(res, serialize_response({r.id, std::vector<std::string>(r.tokens.size(), "O")}));
}

std::shared_ptr<const Vocabulary> vocab() {
  static const auto v =
      std::make_shared<const Vocabulary>(Vocabulary::load(testing::test_data("vocab.txt")));
  return v;
}

RemoteTagger remote_for(const StubServer& server) {
  RemoteTagger r;
  r.endpoint = server.url();
  r.vocab = vocab();
  r.timeout = 2000ms;
  return r;
}

template <class E>
E capture(const std::function<void()>& f) {
  try {
    f();
  } catch (const E& e) {
    return e;
  }
  FAIL("expected exception was not thrown");
  throw;  // unreachable
}

}  // namespace

TEST_CASE("wire format") {
  CHECK(serialize_request({"doc", {"What", "is", "force", "##?"}}) ==
        R"({"id":"doc","tokens":["What","is","force","##?"]})");
  CHECK(serialize_response({"doc", {"B-Question", "I-Question", "O"}}) ==
        R"({"id":"doc","tags":["B-Question","I-Question","O"]})");
  CHECK(serialize_error("model not loaded") == R"({"error":"model not loaded"})");
  CHECK(serialize_request({"q\"\u00e9", {"\n"}}) == "{\"id\":\"q\\\"\u00e9\",\"tokens\":[\"\\n\"]}");

  const TagRequest req{"a", {"x", "y"}};
  CHECK(parse_request(serialize_request(req)) == req);
  CHECK(parse_request(R"({"tokens":["x","y"],"extra":1,"id":"a"})") == req);
  CHECK_THROWS_AS(parse_request("[]"), ParseError);
  CHECK_THROWS_AS(parse_request(R"({"id":"a","tokens":[1]})"), ParseError);
  CHECK_THROWS_AS(parse_response(R"({"id":"a"})"), ParseError);
  CHECK_THROWS_AS(parse_response("not json"), ParseError);
}

TEST_CASE("validate_response") {
  const TagRequest req{"r1", {"a", "b"}};
  CHECK(validate_response(req, {"r1", {"B-Question", "I-Question"}}, "e").tags ==
        std::vector<BioTag>{BioTag::B, BioTag::I});
  const auto e = capture<MalformedResponse>(
      [&] { validate_response(req, {"r1", {"O"}}, "http://h"); });
  CHECK(e.endpoint() == "http://h");
  CHECK(e.request_id() == "r1");
  CHECK(std::string(e.what()).find("2 tokens") != std::string::npos);
  CHECK_THROWS_AS(validate_response(req, {"r2", {"O", "O"}}, "e"), MalformedResponse);
  CHECK_THROWS_AS(validate_response(req, {"r1", {"O", "B"}}, "e"), MalformedResponse);
}

TEST_CASE("request body is exactly the serialized request") {
  StubServer server(all_outside);
  const auto r = remote_for(server);
  const auto spans = extract(r, {"doc", "What is force?"}, RepairPolicy::strict);
  CHECK(spans.empty());
  REQUIRE(server.hits() == 1);
  CHECK(server.bodies()[0] == R"({"id":"doc","tokens":["What","is","force","##?"]})");
  CHECK(server.content_types()[0] == "application/json");

  SUBCASE("endpoint may already name the route") {
    auto r2 = r;
    r2.endpoint = server.url() + "/v1/tag";
    CHECK(remote_tag_subtokens(r2, {"x", {"a"}}).tags == std::vector<BioTag>{BioTag::O});
  }
}

TEST_CASE("malformed responses are rejected without retry") {
  struct Case {
    const char* name;
    std::function<std::string(const TagRequest&)> body;
  };
  const std::vector<Case> cases = {
      {"length mismatch",
       [](const TagRequest& r) {
         return serialize_response({r.id, std::vector<std::string>(r.tokens.size() + 1, "O")});
       }},
      {"unknown tag",
       [](const TagRequest& r) {
         std::vector<std::string> tags(r.tokens.size(), "O");
         tags.back() = "B-Answer";
         return serialize_response({r.id, tags});
       }},
      {"id mismatch",
       [](const TagRequest& r) {
         return serialize_response({r.id + "x", std::vector<std::string>(r.tokens.size(), "O")});
       }},
      {"not json", [](const TagRequest&) { return std::string("<html>"); }},
  };
  for (const auto& c : cases) {
    CAPTURE(c.name);
    StubServer server([&](const httplib::Request& req, httplib::Response& res) {
      reply(res, c.body(parse_request(req.body)));
    });
    const auto e = capture<MalformedResponse>(
        [&] { extract(remote_for(server), {"doc7", "What is force?"}, RepairPolicy::strict); });
    CHECK(e.request_id() == "doc7");
    CHECK(e.endpoint() == server.url());
    CHECK(server.hits() == 1);
  }
}

TEST_CASE("non-2xx status surfaces the server message") {
  StubServer server([](const httplib::Request&, httplib::Response& res) {
    reply(res, serialize_error("model not loaded"), 500);
  });
  const auto e = capture<RemoteStatusError>(
      [&] { remote_tag_subtokens(remote_for(server), {"r", {"a"}}); });
  CHECK(e.status() == 500);
  CHECK(std::string(e.what()).find("model not loaded") != std::string::npos);
  CHECK(server.hits() == 1);
}

TEST_CASE("timeouts are retried once, then reported") {
  StubServer server([](const httplib::Request& req, httplib::Response& res) {
    std::this_thread::sleep_for(600ms);
    all_outside(req, res);
  });
  auto r = remote_for(server);
  r.timeout = 150ms;
  const auto started = std::chrono::steady_clock::now();
  const auto e = capture<TimeoutError>([&] { remote_tag_subtokens(r, {"slow", {"a"}}); });
  CHECK(e.request_id() == "slow");
  CHECK(std::chrono::steady_clock::now() - started < 600ms);
  // Wait for both server handlers to register.
  for (int i = 0; i < 50 && server.hits() < 2; ++i) std::this_thread::sleep_for(10ms);
  CHECK(server.hits() == 2);
}

TEST_CASE("a single timeout is absorbed by the retry") {
  std::atomic<int> calls{0};
  StubServer server([&](const httplib::Request& req, httplib::Response& res) {
    if (calls++ == 0) std::this_thread::sleep_for(500ms);
    all_outside(req, res);
  });
  auto r = remote_for(server);
  r.timeout = 150ms;
  CHECK(remote_tag_subtokens(r, {"x", {"a", "b"}}).size() == 2);
  CHECK(calls == 2);
}

TEST_CASE("unreachable server is a transport error") {
  int port = 0;
  {
    StubServer gone(all_outside);
    port = gone.port();
  }
  RemoteTagger r;
  r.endpoint = "http://127.0.0.1:" + std::to_string(port);
  r.vocab = vocab();
  r.timeout = 500ms;
  const auto e = capture<TransportError>([&] { remote_tag_subtokens(r, {"down", {"a"}}); });
  CHECK(e.request_id() == "down");
  CHECK(e.endpoint() == r.endpoint);
}

TEST_CASE("remote pipeline equals the oracle pipeline, with chunking and concurrency") {
  // Documents carry random word-level gold tags. The server answers each
  // window with the projection of those tags onto the window's subtokens;
  // extract must then reproduce exactly what the oracle tagger gives.
  std::mt19937_64 rng(31);
  const std::vector<std::string> pool = {"What", "is", "force?", "Define", "work.", "Find",
                                         "the", "velocity", "Q.No.", "5", "xyzzy", "(a)"};
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1), n_dist(0, 40);

  RemoteTagger proto;
  proto.vocab = vocab();
  proto.max_len = 8;
  proto.stride = 3;
  proto.max_in_flight = 3;

  std::vector<Document> docs;
  OracleTagger oracle;
  std::map<std::string, TagSequence> subtoken_tags;
  for (int d = 0; d < 24; ++d) {
    Document doc{"doc-" + std::to_string(d), {}};
    const std::size_t n = n_dist(rng);
    for (std::size_t k = 0; k < n; ++k) doc.text += (k ? " " : "") + pool[pick(rng)];
    const auto tok = tokenize_full(doc.text, *proto.vocab);
    const auto word_tags = encode_tags(testing::random_spans(rng, tok.words.size()), tok.words.size());
    oracle.table.emplace(doc.id, word_tags);
    subtoken_tags[doc.id] = project_tags(word_tags, tok.alignment);
    docs.push_back(std::move(doc));
  }

  std::mutex mu;
  std::map<std::string, std::vector<std::string>> requests;
  StubServer server([&](const httplib::Request& req, httplib::Response& res) {
    const auto r = parse_request(req.body);
    const auto hash = r.id.find('#');
    const std::string doc = r.id.substr(0, hash);
    const auto& global = subtoken_tags.at(doc);
    std::size_t begin = 0;
    if (hash != std::string::npos) {
      const auto k = std::stoul(r.id.substr(hash + 1));
      begin = chunk_windows(global.size(), proto.max_len, proto.stride).at(k).begin;
    }
    std::vector<std::string> tags;
    for (std::size_t i = 0; i < r.tokens.size(); ++i) {
      tags.emplace_back(to_string(global.tags.at(begin + i)));
    }
    {
      std::lock_guard lock(mu);
      requests[r.id] = r.tokens;
    }
    std::this_thread::sleep_for(20ms);
    reply(res, serialize_response({r.id, tags}));
  });

  auto remote = proto;
  remote.endpoint = server.url();
  const auto got = extract_many(remote, docs, RepairPolicy::strict);
  const auto want = extract_many(oracle, docs, RepairPolicy::strict);
  CHECK(got == want);

  CHECK(server.max_in_flight() <= 3);
  CHECK(server.max_in_flight() >= 2);
  bool chunked = false;
  for (const auto& [id, tokens] : requests) {
    CHECK(tokens.size() <= proto.max_len);
    chunked = chunked || id.find('#') != std::string::npos;
  }
  CHECK(chunked);
}
