#include "earshot/error.hpp"

namespace earshot {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::kFieldCount: return "FieldCount";
    case Errc::kNumberParse: return "NumberParse";
    case Errc::kRangeViolation: return "RangeViolation";
    case Errc::kEmptyScene: return "EmptyScene";
    case Errc::kServiceUnreachable: return "ServiceUnreachable";
    case Errc::kMalformedServiceReply: return "MalformedServiceReply";
    case Errc::kNoEventsFound: return "NoEventsFound";
    case Errc::kLabelNotFound: return "LabelNotFound";
    case Errc::kBadAudioPayload: return "BadAudioPayload";
    case Errc::kIo: return "Io";
    case Errc::kDegenerateDistance: return "DegenerateDistance";
    case Errc::kGridTooSparse: return "GridTooSparse";
    case Errc::kResponseTooLong: return "ResponseTooLong";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kPlanMismatch: return "PlanMismatch";
    case Errc::kSampleRateMismatch: return "SampleRateMismatch";
    case Errc::kLengthMismatch: return "LengthMismatch";
    case Errc::kRateMismatch: return "RateMismatch";
    case Errc::kTooShort: return "TooShort";
    case Errc::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

namespace {

std::string format_parse_message(Errc code, const std::string& field, int line,
                                 const std::string& detail) {
  std::string msg(errc_name(code));
  if (line > 0) msg += " at line " + std::to_string(line);
  if (!field.empty()) msg += ", field '" + field + "'";
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

ParseError::ParseError(Errc code, std::string field, int line, const std::string& detail)
    : Error(code, format_parse_message(code, field, line, detail)),
      field_(std::move(field)),
      line_(line) {}

MalformedReplyError::MalformedReplyError(std::string raw_reply, const std::string& detail)
    : Error(Errc::kMalformedServiceReply, "MalformedServiceReply: " + detail),
      raw_reply_(std::move(raw_reply)) {}

}  // namespace earshot
