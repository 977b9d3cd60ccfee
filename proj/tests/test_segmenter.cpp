#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "earshot/error.hpp"
#include "earshot/segmenter.hpp"

#include "http_fixture.hpp"

namespace {

using namespace earshot;
using testing_support::LocalServer;

Scene offline(std::string_view prose) { return rule_fallback(prose, builtin_defaults()); }

TEST(RuleFallback, DogLowerLeftThenBirdUpperRight) {
  const auto s = offline("a dog barks on the lower left for 4 seconds, then a bird chirps upper right");
  ASSERT_EQ(s.events.size(), 2u);
  EXPECT_EQ(s.events[0].label, "dog barks");
  EXPECT_EQ(s.events[0].azimuth, -90.0);
  EXPECT_LT(s.events[0].elevation, 0.0);
  EXPECT_EQ(s.events[0].duration, 4.0);
  EXPECT_EQ(s.events[1].label, "bird chirps");
  EXPECT_EQ(s.events[1].azimuth, 90.0);
  EXPECT_GT(s.events[1].elevation, 0.0);
  EXPECT_EQ(s.events[1].start_time, 4.0);
}

TEST(RuleFallback, ExplicitParametersPassThrough) {
  const auto s = offline("a bell at azimuth 30, elevation 10, 2 m, starting at 0 s for 3 s");
  ASSERT_EQ(s.events.size(), 1u);
  const auto& e = s.events[0];
  EXPECT_EQ(e.label, "bell");
  EXPECT_EQ(e.azimuth, 30.0);
  EXPECT_EQ(e.elevation, 10.0);
  EXPECT_EQ(e.distance, 2.0);
  EXPECT_EQ(e.start_time, 0.0);
  EXPECT_EQ(e.duration, 3.0);
}

TEST(RuleFallback, PresetAndDefaults) {
  const auto s = offline("a bell rings to the left");
  ASSERT_EQ(s.events.size(), 1u);
  EXPECT_EQ(s.events[0].azimuth, -90.0);
  EXPECT_EQ(s.events[0].elevation, 0.0);
  EXPECT_EQ(s.events[0].duration, 5.0);
  EXPECT_EQ(s.events[0].distance, 1.5);
  EXPECT_EQ(s.events[0].start_time, 0.0);
}

TEST(RuleFallback, SequentialPacking) {
  const auto s = offline("rain for 8 seconds, then thunder behind");
  ASSERT_EQ(s.events.size(), 2u);
  EXPECT_EQ(s.events[0].label, "rain");
  EXPECT_EQ(s.events[1].label, "thunder");
  EXPECT_EQ(s.events[1].start_time, 8.0);
  EXPECT_EQ(s.events[1].azimuth, -180.0);
}

TEST(RuleFallback, DefaultsTableWhenNoPosition) {
  const auto s = offline("thunder rumbles. footsteps approach. a kettle whistles");
  ASSERT_EQ(s.events.size(), 3u);
  EXPECT_EQ(s.events[0].azimuth, -180.0);
  EXPECT_EQ(s.events[0].elevation, 30.0);
  EXPECT_EQ(s.events[0].distance, 50.0);
  EXPECT_EQ(s.events[1].elevation, -40.0);
  EXPECT_EQ(s.events[1].distance, 1.0);
  EXPECT_EQ(s.events[2].azimuth, 0.0);
  EXPECT_EQ(s.events[2].elevation, 0.0);
  EXPECT_EQ(s.events[2].distance, 1.5);
  EXPECT_EQ(s.events[2].start_time, 10.0);
}

TEST(RuleFallback, PluralMatchesKeywordPrefix) {
  const auto s = offline("birds sing");
  EXPECT_EQ(s.events[0].elevation, 45.0);
}

TEST(RuleFallback, CombinedPresets) {
  EXPECT_EQ(offline("a car in front left").events[0].azimuth, -45.0);
  EXPECT_EQ(offline("a car behind on the right").events[0].azimuth, 135.0);
  EXPECT_EQ(offline("a plane overhead").events[0].elevation, 45.0);
  EXPECT_EQ(offline("a plane overhead").events[0].azimuth, 0.0);
}

TEST(RuleFallback, ExplicitStartOverridesPacking) {
  const auto s = offline("a siren for 2 s; a horn starting at 1 s to the right");
  EXPECT_EQ(s.events[1].start_time, 1.0);
  EXPECT_EQ(s.events[1].duration, 5.0);
}

TEST(RuleFallback, NoEvents) {
  for (const char* prose : {"", "   ", "then. then!", "at 3 s for 4 s", "42"}) {
    try {
      offline(prose);
      FAIL() << prose;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kNoEventsFound) << prose;
    }
  }
}

TEST(RuleFallback, Deterministic) {
  const std::string prose = "a dog barks for 3 s, then rain above; wind behind at 20 m";
  EXPECT_EQ(serialize_scene(offline(prose)), serialize_scene(offline(prose)));
}

// Random prose never crashes: either a valid scene or a typed error.
TEST(RuleFallback, FuzzedProse) {
  const std::vector<std::string> vocab = {"a", "dog", "bird", "left", "right", "above", "below", "for", "at",
                                          "starting", "then", ".", ",", "3", "-2", "0", "100", "1.5", "s", "m",
                                          "seconds", "meters", "azimuth", "elevation", "behind", "front", "the",
                                          "thunder", ";", "\n", "after", "400", "-95", "@", "#"};
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1), len(0, 25);
  for (int i = 0; i < 2000; ++i) {
    std::string prose;
    const auto n = len(rng);
    for (std::size_t j = 0; j < n; ++j) prose += vocab[pick(rng)] + " ";
    try {
      const auto s = offline(prose);
      for (const auto& e : s.events) EXPECT_EQ(validate_event(e), e);
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == Errc::kNoEventsFound || e.code() == Errc::kRangeViolation) << prose;
    }
  }
}

TEST(DefaultsTable, ParsesFileFormat) {
  const auto t = parse_defaults_table("# comment\nCat = -30, 0, 1.2\n\n  owl=  10 , 60 ,4 \n");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.at("cat").azimuth, -30.0);
  EXPECT_EQ(t.at("owl").elevation, 60.0);
  EXPECT_EQ(t.at("owl").distance, 4.0);
  const auto s = rule_fallback("an owl hoots", t);
  EXPECT_EQ(s.events[0].elevation, 60.0);
}

TEST(DefaultsTable, Errors) {
  auto code = [](std::string_view text) {
    try {
      parse_defaults_table(text);
    } catch (const ParseError& e) {
      return e.code();
    }
    return Errc::kIo;
  };
  EXPECT_EQ(code("cat 1, 2, 3"), Errc::kFieldCount);
  EXPECT_EQ(code("cat = 1, 2"), Errc::kFieldCount);
  EXPECT_EQ(code("cat = 1, 2, 3, 4"), Errc::kFieldCount);
  EXPECT_EQ(code("cat = 1, x, 3"), Errc::kNumberParse);
  EXPECT_EQ(code("cat = 1, 100, 3"), Errc::kRangeViolation);
}

TEST(DefaultsTable, ShippedFileMatchesBuiltin) {
  const auto shipped = load_defaults_table(std::string(EARSHOT_TEST_DATA_DIR) + "/defaults_table.txt");
  const auto builtin = builtin_defaults();
  ASSERT_EQ(shipped.size(), builtin.size());
  for (const auto& [k, v] : builtin) {
    EXPECT_EQ(shipped.at(k).azimuth, v.azimuth);
    EXPECT_EQ(shipped.at(k).elevation, v.elevation);
    EXPECT_EQ(shipped.at(k).distance, v.distance);
  }
}

TEST(PromptTemplate, EmbeddedMatchesShippedFile) {
  std::ifstream in(std::string(EARSHOT_TEST_DATA_DIR) + "/segmenter_prompt.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(default_prompt_template(), ss.str());
  EXPECT_NE(default_prompt_template().find("label@duration@azimuth, elevation@distance@start_time"), std::string::npos);
}

SegmenterConfig service_config(const std::string& url) {
  SegmenterConfig cfg;
  cfg.endpoint = url;
  cfg.timeout_seconds = 5.0;
  cfg.api_key = "secret";
  return cfg;
}

TEST(SegmentText, ServiceReplyParsed) {
  std::string seen_prompt, seen_auth;
  LocalServer server("/segment", [&](const httplib::Request& req, httplib::Response& res) {
    seen_prompt = nlohmann::json::parse(req.body).at("prompt").get<std::string>();
    seen_auth = req.get_header_value("Authorization");
    res.set_content(R"({"text":"dog barking@4@-90, -30@2@0\nbird@2@90, 45@3@4\n"})", "application/json");
  });
  const auto s = segment_text("a dog and a bird", service_config(server.url("/segment")));
  ASSERT_EQ(s.events.size(), 2u);
  EXPECT_EQ(s.events[0].label, "dog barking");
  EXPECT_EQ(s.events[1].start_time, 4.0);
  EXPECT_TRUE(seen_prompt.starts_with(default_prompt_template()));
  EXPECT_TRUE(seen_prompt.ends_with("a dog and a bird"));
  EXPECT_EQ(seen_auth, "Bearer secret");
}

TEST(SegmentText, GarbageReplyIsMalformed) {
  LocalServer server("/segment", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"text":"garbage"})", "application/json");
  });
  try {
    segment_text("anything", service_config(server.url("/segment")));
    FAIL();
  } catch (const MalformedReplyError& e) {
    EXPECT_EQ(e.code(), Errc::kMalformedServiceReply);
    EXPECT_EQ(e.raw_reply(), R"({"text":"garbage"})");
  }
}

TEST(SegmentText, NonJsonReplyIsMalformed) {
  LocalServer server("/segment", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("garbage", "text/plain");
  });
  try {
    segment_text("anything", service_config(server.url("/segment")));
    FAIL();
  } catch (const MalformedReplyError& e) {
    EXPECT_EQ(e.raw_reply(), "garbage");
  }
}

TEST(SegmentText, EmptyReplyMeansNoEvents) {
  LocalServer server("/segment", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"text":"\n# nothing\n"})", "application/json");
  });
  try {
    segment_text("silence", service_config(server.url("/segment")));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNoEventsFound);
  }
}

TEST(SegmentText, ServerErrorAndDeadEndpointAreUnreachable) {
  LocalServer server("/segment", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  for (const auto& url : {server.url("/segment"), testing_support::dead_url()}) {
    try {
      segment_text("a dog", service_config(url));
      FAIL() << url;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kServiceUnreachable) << url;
    }
  }
}

TEST(SegmentText, OfflineNeverTouchesNetwork) {
  SegmenterConfig cfg;
  EXPECT_TRUE(cfg.offline());
  EXPECT_EQ(segment_text("a bell rings to the left", cfg).events.size(), 1u);
}

}  // namespace
