#pragma once

// Only the CLI includes this; it pulls in OpenSSL.
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <string>

#include "lelma/llm/providers.hpp"

namespace lelma::llm {

class HttplibTransport : public Transport {
 public:
  HttpResponse post(const HttpRequest& req) override {
    auto scheme_end = req.url.find("://");
    if (scheme_end == std::string::npos) throw TransportFailure("not an absolute URL: " + req.url);
    auto path_start = req.url.find('/', scheme_end + 3);
    std::string origin = req.url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : req.url.substr(path_start);

    httplib::Client client(origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(req.timeout).count();
    client.set_connection_timeout(secs);
    client.set_read_timeout(secs);
    client.set_write_timeout(secs);

    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto& [k, v] : req.headers) {
      if (k == "Content-Type")
        content_type = v;
      else
        headers.emplace(k, v);
    }
    auto res = client.Post(path, headers, req.body, content_type);
    if (!res) throw TransportFailure(httplib::to_string(res.error()));
    return {res->status, res->body};
  }
};

}  // namespace lelma::llm
