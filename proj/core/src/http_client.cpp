#include "earshot/http_client.hpp"

#include <cmath>

#include "earshot/error.hpp"
#include "httplib.h"

namespace earshot {
namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(Errc::kServiceUnreachable, "malformed service URL '" + url + "'");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http") {
    throw Error(Errc::kServiceUnreachable,
                "unsupported URL scheme '" + scheme + "' (only http:// is supported)");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpReply http_post(const std::string& url, const std::string& body,
                    const std::string& content_type, double timeout_seconds,
                    const std::vector<std::pair<std::string, std::string>>& headers) {
  const auto parsed = split_url(url);
  httplib::Client client(parsed.origin);
  const auto secs = static_cast<time_t>(std::floor(timeout_seconds));
  const auto usecs = static_cast<time_t>((timeout_seconds - std::floor(timeout_seconds)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);
  auto res = client.Post(parsed.path, hdrs, body, content_type);
  if (!res) {
    throw Error(Errc::kServiceUnreachable,
                "POST " + url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(Errc::kServiceUnreachable,
                "POST " + url + " returned HTTP " + std::to_string(res->status));
  }
  return {res->status, res->body};
}

}  // namespace earshot
