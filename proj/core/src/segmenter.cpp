#include "earshot/segmenter.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "earshot/error.hpp"
#include "earshot/http_client.hpp"

namespace earshot {
namespace {

constexpr double kDefaultDuration = 5.0;
constexpr double kDefaultDistance = 1.5;
constexpr double kPresetElevation = 45.0;

struct Token {
  enum class Kind { kWord, kNumber, kBreak } kind;
  std::string text;
  double value = 0.0;
};

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::vector<Token> tokenize(std::string_view prose) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  auto push_break = [&] {
    if (!tokens.empty() && tokens.back().kind != Token::Kind::kBreak) tokens.push_back({Token::Kind::kBreak, {}});
  };
  while (i < prose.size()) {
    const char c = prose[i];
    const bool negative = c == '-' && i + 1 < prose.size() && is_digit(prose[i + 1]) &&
                          (i == 0 || !std::isalnum(static_cast<unsigned char>(prose[i - 1])));
    if (is_digit(c) || negative) {
      std::size_t j = i + 1;
      bool seen_dot = false;
      while (j < prose.size() &&
             (is_digit(prose[j]) || (prose[j] == '.' && !seen_dot && j + 1 < prose.size() && is_digit(prose[j + 1])))) {
        seen_dot = seen_dot || prose[j] == '.';
        ++j;
      }
      Token t{Token::Kind::kNumber, std::string(prose.substr(i, j - i))};
      std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
      tokens.push_back(std::move(t));
      i = j;
    } else if (is_alpha(c)) {
      std::size_t j = i;
      std::string word;
      while (j < prose.size() && (is_alpha(prose[j]) || (prose[j] == '\'' && j + 1 < prose.size() && is_alpha(prose[j + 1])))) {
        word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(prose[j]))));
        ++j;
      }
      if (word == "then") {
        push_break();
      } else {
        tokens.push_back({Token::Kind::kWord, std::move(word)});
      }
      i = j;
    } else {
      if (c == '.' || c == '!' || c == '?' || c == ';' || c == '\n') push_break();
      ++i;
    }
  }
  return tokens;
}

const std::set<std::string, std::less<>> kLeadingFillers = {
    "a", "an", "the", "some", "there", "is", "are", "was", "were", "and", "i", "we", "you",
    "hear", "suddenly", "also", "meanwhile", "finally", "next", "after", "that", "this", "it"};

const std::set<std::string, std::less<>> kStopWords = {
    "on", "to", "in", "at", "for", "from", "with", "near", "by", "is", "are", "and", "while",
    "starting", "start", "starts", "begins", "begin", "lasting", "about", "around", "far",
    "away", "close", "nearby", "somewhere", "side", "directly", "overhead", "after", "during"};

const std::set<std::string, std::less<>> kStartWords = {"starting", "start", "starts", "begins",
                                                        "begin", "from", "after", "at"};

const std::set<std::string, std::less<>> kDistanceUnits = {"m", "meter", "meters", "metre", "metres"};
const std::set<std::string, std::less<>> kTimeUnits = {"s", "sec", "secs", "second", "seconds"};

enum class Cue { kNone, kLeft, kRight, kFront, kRear, kUp, kDown };

Cue position_cue(std::string_view w) {
  if (w == "left") return Cue::kLeft;
  if (w == "right") return Cue::kRight;
  if (w == "front" || w == "ahead") return Cue::kFront;
  if (w == "behind" || w == "rear") return Cue::kRear;
  if (w == "above" || w == "upper" || w == "up" || w == "overhead" || w == "high") return Cue::kUp;
  if (w == "below" || w == "lower" || w == "down" || w == "beneath" || w == "under" || w == "low") {
    return Cue::kDown;
  }
  return Cue::kNone;
}

bool is_angle_keyword(std::string_view w) {
  return w == "azimuth" || w == "elevation" || w == "az" || w == "el";
}

struct Clause {
  std::string label;
  std::optional<double> azimuth, elevation, distance, duration, start;
  int lateral = 0;      // -1 left, +1 right
  int front_rear = 0;   // +1 front, -1 rear
  int vertical = 0;     // +1 up, -1 down
  bool any_cue() const { return lateral != 0 || front_rear != 0 || vertical != 0 || azimuth || elevation; }
};

std::string extract_label(const std::vector<Token>& tokens) {
  std::size_t i = 0;
  while (i < tokens.size() && tokens[i].kind == Token::Kind::kWord && kLeadingFillers.contains(tokens[i].text)) ++i;
  std::string label;
  for (; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.kind != Token::Kind::kWord) break;
    if (kStopWords.contains(t.text) || position_cue(t.text) != Cue::kNone || is_angle_keyword(t.text)) break;
    if (!label.empty()) label.push_back(' ');
    label += t.text;
  }
  return label;
}

Clause analyze(const std::vector<Token>& tokens) {
  Clause clause;
  clause.label = extract_label(tokens);
  auto word_at = [&](std::size_t i) -> std::string_view {
    return i < tokens.size() && tokens[i].kind == Token::Kind::kWord ? std::string_view(tokens[i].text)
                                                                      : std::string_view();
  };
  auto number_after = [&](std::size_t i) -> std::optional<double> {
    // Allow one connecting word: "azimuth of 30", "elevation is 10".
    for (std::size_t j = i + 1; j < tokens.size() && j <= i + 2; ++j) {
      if (tokens[j].kind == Token::Kind::kNumber) return tokens[j].value;
      if (tokens[j].kind != Token::Kind::kWord) break;
    }
    return std::nullopt;
  };

  std::vector<bool> consumed(tokens.size(), false);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.kind != Token::Kind::kWord) continue;
    if (t.text == "azimuth" || t.text == "az") {
      if (auto v = number_after(i)) clause.azimuth = *v;
      for (std::size_t j = i + 1; j < tokens.size() && j <= i + 2; ++j) {
        if (tokens[j].kind == Token::Kind::kNumber) { consumed[j] = true; break; }
      }
    } else if (t.text == "elevation" || t.text == "el") {
      if (auto v = number_after(i)) clause.elevation = *v;
      for (std::size_t j = i + 1; j < tokens.size() && j <= i + 2; ++j) {
        if (tokens[j].kind == Token::Kind::kNumber) { consumed[j] = true; break; }
      }
    } else {
      switch (position_cue(t.text)) {
        case Cue::kLeft: clause.lateral = -1; break;
        case Cue::kRight: clause.lateral = 1; break;
        case Cue::kFront: clause.front_rear = 1; break;
        case Cue::kRear: clause.front_rear = -1; break;
        case Cue::kUp: clause.vertical = 1; break;
        case Cue::kDown: clause.vertical = -1; break;
        case Cue::kNone: break;
      }
    }
  }

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].kind != Token::Kind::kNumber || consumed[i]) continue;
    const auto unit = word_at(i + 1);
    if (kDistanceUnits.contains(unit)) {
      clause.distance = tokens[i].value;
    } else if (kTimeUnits.contains(unit)) {
      bool is_start = false;
      for (std::size_t back = 1; back <= 2 && back <= i; ++back) {
        const auto w = word_at(i - back);
        if (w == "for" || w == "lasting") break;
        if (kStartWords.contains(w)) {
          is_start = true;
          break;
        }
      }
      (is_start ? clause.start : clause.duration) = tokens[i].value;
    }
  }
  return clause;
}

double preset_azimuth(int lateral, int front_rear) {
  if (lateral == 0) return front_rear < 0 ? 180.0 : 0.0;
  if (front_rear == 0) return 90.0 * lateral;
  return (front_rear > 0 ? 45.0 : 135.0) * lateral;
}

const PositionDefault* lookup_default(std::string_view label, const DefaultsTable& defaults) {
  const PositionDefault* best = nullptr;
  std::size_t best_len = 0;
  std::istringstream words{std::string(label)};
  std::string word;
  std::vector<std::string> label_words;
  while (words >> word) label_words.push_back(word);
  for (const auto& [keyword, position] : defaults) {  // ascending keyword order breaks ties
    if (keyword.size() <= best_len) continue;
    const bool hit = std::any_of(label_words.begin(), label_words.end(),
                                 [&](const std::string& w) { return w.starts_with(keyword); });
    if (hit) {
      best = &position;
      best_len = keyword.size();
    }
  }
  return best;
}

std::string_view trim_view(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

}  // namespace

DefaultsTable builtin_defaults() {
  return {{"dog", {0.0, -30.0, 2.0}},
          {"bird", {0.0, 45.0, 3.0}},
          {"thunder", {180.0, 30.0, 50.0}},
          {"footsteps", {0.0, -40.0, 1.0}}};
}

DefaultsTable parse_defaults_table(std::string_view text) {
  DefaultsTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto t = trim_view(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(Errc::kFieldCount, "defaults", line_number, "expected 'keyword = az, el, dist'");
    }
    std::string keyword(trim_view(t.substr(0, eq)));
    std::transform(keyword.begin(), keyword.end(), keyword.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (keyword.empty()) throw ParseError(Errc::kFieldCount, "keyword", line_number, "keyword is empty");

    std::array<double, 3> values{};
    std::size_t count = 0;
    std::string_view rest = t.substr(eq + 1);
    while (true) {
      const auto comma = rest.find(',');
      const auto field = trim_view(rest.substr(0, comma));
      if (count == values.size()) throw ParseError(Errc::kFieldCount, keyword, line_number, "expected 3 values");
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw ParseError(Errc::kNumberParse, keyword, line_number, "'" + std::string(field) + "' is not a number");
      }
      values[count++] = v;
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (count != values.size()) throw ParseError(Errc::kFieldCount, keyword, line_number, "expected 3 values");
    if (values[1] < -90.0 || values[1] > 90.0 || values[2] <= 0.0) {
      throw ParseError(Errc::kRangeViolation, keyword, line_number, "elevation or distance out of range");
    }
    table[keyword] = {values[0], values[1], values[2]};
  }
  return table;
}

DefaultsTable load_defaults_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot read defaults table " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_defaults_table(ss.str());
}

Scene rule_fallback(std::string_view prose, const DefaultsTable& defaults, int sample_rate) {
  Scene scene;
  scene.sample_rate = sample_rate;
  const auto tokens = tokenize(prose);
  double cursor = 0.0;
  std::size_t begin = 0;
  while (begin < tokens.size()) {
    std::size_t end = begin;
    while (end < tokens.size() && tokens[end].kind != Token::Kind::kBreak) ++end;
    const std::vector<Token> clause_tokens(tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                                           tokens.begin() + static_cast<std::ptrdiff_t>(end));
    begin = end + 1;

    const Clause clause = analyze(clause_tokens);
    if (clause.label.empty()) continue;

    SceneEvent e;
    e.label = clause.label;
    e.duration = clause.duration.value_or(kDefaultDuration);
    e.distance = clause.distance.value_or(kDefaultDistance);
    if (clause.any_cue()) {
      e.azimuth = clause.azimuth.value_or(
          clause.lateral != 0 || clause.front_rear != 0 ? preset_azimuth(clause.lateral, clause.front_rear) : 0.0);
      e.elevation = clause.elevation.value_or(kPresetElevation * clause.vertical);
    } else if (const auto* d = lookup_default(clause.label, defaults)) {
      e.azimuth = d->azimuth;
      e.elevation = d->elevation;
      if (!clause.distance) e.distance = d->distance;
    }
    e.start_time = clause.start.value_or(cursor);
    e = validate_event(std::move(e));
    cursor = e.start_time + e.duration;
    scene.events.push_back(std::move(e));
  }
  if (scene.events.empty()) throw Error(Errc::kNoEventsFound, "no sound events found in the description");
  return scene;
}

Scene segment_text(std::string_view prose, const SegmenterConfig& cfg) {
  if (trim_view(prose).empty()) throw Error(Errc::kNoEventsFound, "description is empty");
  if (cfg.offline()) return rule_fallback(prose, cfg.defaults, cfg.sample_rate);

  const nlohmann::json request = {{"prompt", cfg.prompt_template + std::string(prose)}};
  std::vector<std::pair<std::string, std::string>> headers;
  if (!cfg.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + cfg.api_key);
  const auto reply = http_post(cfg.endpoint, request.dump(), "application/json", cfg.timeout_seconds, headers);

  std::string records;
  try {
    const auto body = nlohmann::json::parse(reply.body);
    if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
      throw MalformedReplyError(reply.body, "reply has no string field 'text'");
    }
    records = body["text"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw MalformedReplyError(reply.body, std::string("reply is not JSON: ") + e.what());
  }

  try {
    Scene scene = parse_scene(records);
    scene.sample_rate = cfg.sample_rate;
    return scene;
  } catch (const ParseError& e) {
    if (e.code() == Errc::kEmptyScene) throw Error(Errc::kNoEventsFound, "service returned no events");
    throw MalformedReplyError(reply.body, e.what());
  }
}

}  // namespace earshot
