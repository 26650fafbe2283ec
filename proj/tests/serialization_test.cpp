#include <sstream>

#include <gtest/gtest.h>

#include <gamediag/gamediag.hpp>

using namespace gamediag;

namespace {

TrialRecord sample_trial() {
  TrialRecord t;
  t.trial_id = "s1-000007";
  t.session_id = "s1";
  t.spec = make_stimulus(Channel::orientation(135.0), 0.05, reference_screen(), {700.0, 300.0, 99},
                         ProbeMode::Integrated, 4, 12);
  t.view = {700.0, 300.0, 99};
  t.response = Response::Incorrect;
  t.response_time_ms = 850;
  t.credit_awarded = false;
  return t;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::NotFound;
}

}  // namespace

TEST(Serialization, TrialRoundTrip) {
  const auto t = sample_trial();
  const Json j = to_json(t);
  EXPECT_EQ(j["v"], 1);
  EXPECT_EQ(j["response"], "Incorrect");
  EXPECT_EQ(trial_from_json(j), t);
  EXPECT_EQ(trial_from_json(Json::parse(j.dump())), t);
}

TEST(Serialization, ScreenAndViewRoundTrip) {
  const auto s = reference_screen();
  const auto back = screen_from_json(to_json(s));
  EXPECT_EQ(back.width_px, s.width_px);
  EXPECT_DOUBLE_EQ(back.width_mm, s.width_mm);
  EXPECT_DOUBLE_EQ(back.black_luminance_cdm2, s.black_luminance_cdm2);
  const ViewingSample v{512.5, 3.25, 1234};
  const auto vb = view_from_json(to_json(v));
  EXPECT_DOUBLE_EQ(vb.distance_mm, v.distance_mm);
  EXPECT_DOUBLE_EQ(vb.ambient_lux, v.ambient_lux);
  EXPECT_EQ(vb.timestamp_ms, v.timestamp_ms);
}

TEST(Serialization, ChannelsRoundTrip) {
  for (const auto& ch : default_channels()) EXPECT_EQ(channel_from_json(to_json(ch)), ch);
}

TEST(Serialization, ProfileRoundTripAndDefaults) {
  ImpairmentProfile p;
  p.sphere_d = 6.0;
  p.cyl_d = 1.5;
  p.cyl_axis_deg = 90.0;
  p.cvd_type = ColorAxis::Deutan;
  p.cvd_severity = 0.7;
  p.nyctalopia_factor = 3.0;
  EXPECT_EQ(profile_from_json(to_json(p)), p);
  EXPECT_EQ(profile_from_json(Json::object()), ImpairmentProfile{});
  EXPECT_EQ(profile_from_json(Json{{"sphere_S", -2.0}}).sphere_d, -2.0);
  EXPECT_THROW(profile_from_json(Json{{"severity", 2.0}}), Error);
}

TEST(Serialization, RejectsOtherVersions) {
  Json j = to_json(sample_trial());
  j["v"] = 2;
  EXPECT_EQ(code_of([&] { trial_from_json(j); }), ErrorCode::BadRequest);
}

TEST(Serialization, RejectsMalformedTrials) {
  Json j = to_json(sample_trial());
  j.erase("trial_id");
  EXPECT_EQ(code_of([&] { trial_from_json(j); }), ErrorCode::BadRequest);
  Json k = to_json(sample_trial());
  k["response"] = "Maybe";
  EXPECT_EQ(code_of([&] { trial_from_json(k); }), ErrorCode::BadRequest);
  Json m = to_json(sample_trial());
  m["response_time_ms"] = "fast";
  EXPECT_EQ(code_of([&] { trial_from_json(m); }), ErrorCode::BadRequest);
}

TEST(Serialization, FitAndScreenJson) {
  PsychometricFit f;
  f.threshold_alpha = 0.5;
  f.ci_alpha = {0.4, 0.6};
  f.n_trials = 60;
  const Json j = to_json(f);
  EXPECT_EQ(j["v"], 1);
  EXPECT_NEAR(j["threshold"].get<double>(), std::pow(10.0, 0.5), 1e-12);
  ScreenResult r;
  r.screen = "color";
  r.kind = ScreenKind::CVDSuspect;
  r.cvd_type = ColorAxis::Tritan;
  r.evidence = {{"color|Tritan", f}};
  const Json rj = to_json(r);
  EXPECT_EQ(rj["kind"], "CVDSuspect");
  EXPECT_EQ(rj["cvd_type"], "Tritan");
  EXPECT_FALSE(rj.contains("axis_deg"));
  EXPECT_EQ(rj["evidence"][0]["label"], "color|Tritan");
}

TEST(EventLog, JsonLinesRoundTrip) {
  const auto log = run_session(ImpairmentProfile{}, reference_screen(), 50, AmbientSchedule{}, 8);
  const std::string text = to_jsonl(log);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 50);
  std::istringstream in(text);
  EXPECT_EQ(read_log(in), log);
}

TEST(EventLog, ReportsTheBadLine) {
  const auto log = run_session(ImpairmentProfile{}, reference_screen(), 5, AmbientSchedule{}, 8);
  std::string text = to_jsonl(log);
  text.insert(text.find('\n', text.find('\n') + 1) + 1, "{not json}\n");
  std::istringstream in(text);
  try {
    read_log(in);
    FAIL() << "expected ReplayError";
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.code(), ErrorCode::ReplayError);
  }
}

TEST(EventLog, BlankLines) {
  const auto log = run_session(ImpairmentProfile{}, reference_screen(), 3, AmbientSchedule{}, 8);
  std::istringstream trailing(to_jsonl(log) + "\n");
  EXPECT_EQ(read_log(trailing).size(), 3u);
  std::string text = to_jsonl(log);
  text.insert(text.find('\n') + 1, "\n");
  std::istringstream inner(text);
  EXPECT_THROW(read_log(inner), ReplayError);
}

TEST(Config, ParsesDocument) {
  const Json j = Json::parse(R"({
    "v": 1, "host": "0.0.0.0", "port": 9000, "data_dir": "",
    "children": [{"id": "kid-1", "screens": [{"width_mm": 480, "height_mm": 270, "width_px": 1920,
                  "height_px": 1080, "max_luminance_cdm2": 250, "black_luminance_cdm2": 0.25}]}],
    "session": {"budget_minigame": 4, "staircases": {"acuity": {"start": 12.0}}}
  })");
  const auto c = config_from_json(j);
  EXPECT_EQ(c.host, "0.0.0.0");
  EXPECT_EQ(c.port, 9000);
  EXPECT_TRUE(c.data_dir.empty());
  ASSERT_EQ(c.children.size(), 1u);
  EXPECT_EQ(c.children[0].name, "kid-1");
  EXPECT_EQ(c.children[0].screens.at(0).width_px, 1920);
  EXPECT_EQ(c.session.budget_minigame, 4);
  EXPECT_EQ(c.session.acuity.start, 12.0);
  EXPECT_EQ(c.session.acuity.max, 60.0);
}

TEST(Config, RejectsBadDocuments) {
  EXPECT_THROW(config_from_json(Json::array()), Error);
  EXPECT_THROW(config_from_json(Json{{"v", 7}}), Error);
  EXPECT_THROW(config_from_json(Json::parse(R"({"children": [{"id": "a"}, {"id": "a"}]})")), Error);
  EXPECT_THROW(config_from_json(Json::parse(R"({"session": {"staircases": {"acuity": {"start": 100}}}})")), Error);
}
