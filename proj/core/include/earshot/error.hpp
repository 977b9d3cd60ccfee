#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace earshot {

enum class Errc {
  // scene-core
  kFieldCount,
  kNumberParse,
  kRangeViolation,
  kEmptyScene,
  // segmenter / services
  kServiceUnreachable,
  kMalformedServiceReply,
  kNoEventsFound,
  // source-provider
  kLabelNotFound,
  kBadAudioPayload,
  kIo,
  // spatializer
  kDegenerateDistance,
  kGridTooSparse,
  kResponseTooLong,
  // renderer
  kShapeMismatch,
  kPlanMismatch,
  // mixer
  kSampleRateMismatch,
  // metrics
  kLengthMismatch,
  kRateMismatch,
  kTooShort,
  kInvalidConfig,
};

std::string_view errc_name(Errc code) noexcept;

/// Typed error carried by every failing operation in the library.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }
  std::string_view name() const noexcept { return errc_name(code_); }

 private:
  Errc code_;
};

/// Scene-format error. `line` is 1-based; 0 when the record was parsed on its own.
class ParseError : public Error {
 public:
  ParseError(Errc code, std::string field, int line, const std::string& detail);

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

/// A service answered, but the reply did not parse. The raw body is kept.
class MalformedReplyError : public Error {
 public:
  MalformedReplyError(std::string raw_reply, const std::string& detail);

  const std::string& raw_reply() const noexcept { return raw_reply_; }

 private:
  std::string raw_reply_;
};

}  // namespace earshot
