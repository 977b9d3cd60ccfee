#pragma once

#include <string>
#include <utility>
#include <vector>

namespace earshot {

struct HttpReply {
  int status = 0;
  std::string body;
};

/// Blocking HTTP POST. `url` is `http://host[:port][/path]`.
/// Throws Error(kServiceUnreachable) on connection failure, timeout, or non-2xx status.
HttpReply http_post(const std::string& url, const std::string& body,
                    const std::string& content_type, double timeout_seconds,
                    const std::vector<std::pair<std::string, std::string>>& headers = {});

}  // namespace earshot
