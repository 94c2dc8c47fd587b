// Client side of the /v1/tag protocol.

#include <chrono>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "qx/error.hpp"
#include "qx/tagger.hpp"

namespace qx {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string dump(const ordered_json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

nlohmann::json parse_object(std::string_view body, const char* what) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw ParseError(0, std::string(what) + ": invalid JSON");
  if (!j.is_object()) throw ParseError(0, std::string(what) + ": expected an object");
  return j;
}

std::vector<std::string> string_array(const nlohmann::json& j, const char* key,
                                      const char* what) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    throw ParseError(0, std::string(what) + ": missing \"" + key + "\" array");
  }
  std::vector<std::string> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw ParseError(0, std::string(what) + ": \"" + key +
                              "\" must contain only strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string string_field(const nlohmann::json& j, const char* key,
                         const char* what) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw ParseError(0, std::string(what) + ": missing string \"" + key + "\"");
  }
  return it->get<std::string>();
}

struct Url {
  std::string scheme_host_port;
  std::string path;
};

Url split_endpoint(const std::string& endpoint) {
  const auto scheme_end = endpoint.find("://");
  const std::size_t authority = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto slash = endpoint.find('/', authority);
  Url url;
  url.scheme_host_port = endpoint.substr(0, slash);
  std::string path = slash == std::string::npos ? "" : endpoint.substr(slash);
  while (!path.empty() && path.back() == '/') path.pop_back();
  if (path.size() < kTagPath.size() ||
      path.compare(path.size() - kTagPath.size(), kTagPath.size(), kTagPath) != 0) {
    path += kTagPath;
  }
  url.path = std::move(path);
  return url;
}

enum class Failure { none, transport, timeout };

}  // namespace

std::string serialize_request(const TagRequest& request) {
  ordered_json j;
  j["id"] = request.id;
  j["tokens"] = request.tokens;
  return dump(j);
}

TagRequest parse_request(std::string_view body) {
  const auto j = parse_object(body, "tag request");
  return {string_field(j, "id", "tag request"),
          string_array(j, "tokens", "tag request")};
}

std::string serialize_response(const TagResponse& response) {
  ordered_json j;
  j["id"] = response.id;
  j["tags"] = response.tags;
  return dump(j);
}

TagResponse parse_response(std::string_view body) {
  const auto j = parse_object(body, "tag response");
  return {string_field(j, "id", "tag response"),
          string_array(j, "tags", "tag response")};
}

std::string serialize_error(std::string_view message) {
  ordered_json j;
  j["error"] = std::string(message);
  return dump(j);
}

TagSequence validate_response(const TagRequest& request,
                              const TagResponse& response,
                              const std::string& endpoint) {
  if (response.id != request.id) {
    throw MalformedResponse(endpoint, request.id,
                            endpoint + ": response id \"" + response.id +
                                "\" does not echo request id \"" + request.id + "\"");
  }
  if (response.tags.size() != request.tokens.size()) {
    throw MalformedResponse(endpoint, request.id,
                            endpoint + ": request " + request.id + " sent " +
                                std::to_string(request.tokens.size()) +
                                " tokens but received " +
                                std::to_string(response.tags.size()) + " tags");
  }
  TagSequence out{{}, TagLevel::subtoken};
  out.tags.reserve(response.tags.size());
  for (std::size_t i = 0; i < response.tags.size(); ++i) {
    auto tag = parse_bio_tag(response.tags[i]);
    if (!tag) {
      throw MalformedResponse(endpoint, request.id,
                              endpoint + ": request " + request.id + " tag " +
                                  std::to_string(i) + " \"" + response.tags[i] +
                                  "\" is not a BIO tag");
    }
    out.tags.push_back(*tag);
  }
  return out;
}

TagSequence remote_tag_subtokens(const RemoteTagger& remote,
                                 const TagRequest& request) {
  if (remote.timeout.count() <= 0) {
    throw ContractViolation("remote timeout must be > 0 ms");
  }
  const Url url = split_endpoint(remote.endpoint);
  const std::string body = serialize_request(request);
  const auto timeout = remote.timeout;

  httplib::Result result{nullptr, httplib::Error::Unknown};
  Failure failure = Failure::none;
  for (int attempt = 0; attempt < 2; ++attempt) {
    httplib::Client client(url.scheme_host_port);
    if (!client.is_valid()) {
      throw TransportError(remote.endpoint, request.id,
                           remote.endpoint + ": unsupported endpoint URL");
    }
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    const auto started = std::chrono::steady_clock::now();
    result = client.Post(url.path, body, "application/json");
    if (result) {
      failure = Failure::none;
      break;
    }
    const auto elapsed = std::chrono::steady_clock::now() - started;
    const bool timed_out = result.error() == httplib::Error::ConnectionTimeout ||
                           (result.error() == httplib::Error::Read && elapsed >= timeout);
    failure = timed_out ? Failure::timeout : Failure::transport;
  }

  if (failure == Failure::timeout) {
    throw TimeoutError(remote.endpoint, request.id,
                       remote.endpoint + ": request " + request.id +
                           " timed out after " + std::to_string(timeout.count()) +
                           " ms");
  }
  if (failure == Failure::transport) {
    throw TransportError(remote.endpoint, request.id,
                         remote.endpoint + ": request " + request.id +
                             " failed: " + httplib::to_string(result.error()));
  }

  const int status = result->status;
  if (status < 200 || status >= 300) {
    std::string message = result->body;
    try {
      message = string_field(parse_object(result->body, "error body"), "error",
                             "error body");
    } catch (const ParseError&) {
    }
    throw RemoteStatusError(remote.endpoint, request.id, status,
                            remote.endpoint + ": request " + request.id +
                                " returned HTTP " + std::to_string(status) +
                                ": " + message);
  }

  TagResponse response;
  try {
    response = parse_response(result->body);
  } catch (const ParseError& e) {
    throw MalformedResponse(remote.endpoint, request.id,
                            remote.endpoint + ": request " + request.id + ": " +
                                e.what());
  }
  return validate_response(request, response, remote.endpoint);
}

}  // namespace qx
