#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <gamediag/observer.hpp>

using namespace gamediag;

namespace {

StimulusSpec spec_of(const Channel& ch, double intensity) {
  StimulusSpec s;
  s.channel = ch;
  s.intensity = intensity;
  s.distractor_descriptors = {1, 2, 3};
  s.feasible = true;
  return s;
}

ImpairmentProfile myope() {
  ImpairmentProfile p;
  p.sphere_d = -2.0;
  return p;
}

}  // namespace

TEST(Observer, DefocusOfAMyope) {
  const auto p = myope();
  EXPECT_NEAR(defocus_diopters(p, 1.0), 1.0, 1e-12);
  EXPECT_NEAR(defocus_diopters(p, 2.0), 1.5, 1e-12);
  EXPECT_EQ(defocus_diopters(p, 0.4), 0.0);
  EXPECT_THROW(defocus_diopters(p, 0.0), Error);
}

TEST(Observer, DefocusOfAHyperope) {
  ImpairmentProfile p;
  p.sphere_d = 6.0;
  p.accommodation_d = 8.0;
  // Demand at 0.3 m is 3.33 + 6 D against 8 D of accommodation.
  EXPECT_NEAR(defocus_diopters(p, 0.3), 1.0 / 0.3 + 6.0 - 8.0, 1e-12);
  EXPECT_EQ(defocus_diopters(p, 1.0), 0.0);
}

TEST(Observer, AcuityBlurAddsInQuadrature) {
  const auto p = myope();
  const ViewingSample view{1000.0, 300.0, 0};
  const double blur = 3.44 * 4.0 * 1.0;
  EXPECT_NEAR(effective_threshold(p, Channel::acuity(), view), std::sqrt(1.0 + blur * blur), 1e-12);
  const ViewingSample dark{1000.0, 3.0, 0};
  const double dark_blur = 3.44 * 6.0 * 1.0;
  EXPECT_NEAR(effective_threshold(p, Channel::acuity(), dark), std::sqrt(1.0 + dark_blur * dark_blur), 1e-12);
  const ViewingSample dusk{1000.0, 50.0, 0};
  const double dusk_blur = 3.44 * 5.0 * 1.0;
  EXPECT_NEAR(effective_threshold(p, Channel::acuity(), dusk), std::sqrt(1.0 + dusk_blur * dusk_blur), 1e-12);
  EXPECT_NEAR(effective_threshold(ImpairmentProfile{}, Channel::acuity(), view), 1.0, 1e-12);
}

TEST(Observer, CylinderBlursBarsAlongItsAxis) {
  ImpairmentProfile p;
  p.cyl_d = 1.5;
  p.cyl_axis_deg = 90.0;
  const ViewingSample view{600.0, 300.0, 0};
  const double worst = effective_threshold(p, Channel::orientation(90.0), view);
  const double best = effective_threshold(p, Channel::orientation(0.0), view);
  const double blur = 3.44 * 4.0 * 1.5;
  EXPECT_NEAR(worst, 0.01 * std::sqrt(1.0 + blur * blur), 1e-12);
  EXPECT_NEAR(best, 0.01, 1e-12);
  const double diagonal = effective_threshold(p, Channel::orientation(45.0), view);
  EXPECT_GT(diagonal, best);
  EXPECT_LT(diagonal, worst);
}

TEST(Observer, ColorDeficitScalesOneAxis) {
  ImpairmentProfile p;
  p.cvd_type = ColorAxis::Deutan;
  p.cvd_severity = 1.0;
  const ViewingSample view{600.0, 300.0, 0};
  EXPECT_NEAR(effective_threshold(p, Channel::color(ColorAxis::Deutan), view), 0.2, 1e-12);
  EXPECT_NEAR(effective_threshold(p, Channel::color(ColorAxis::Protan), view), 0.02, 1e-12);
}

TEST(Observer, NightBlindnessScalesScotopicThreshold) {
  ImpairmentProfile p;
  p.nyctalopia_factor = 3.0;
  const ViewingSample view{600.0, 3.0, 0};
  EXPECT_NEAR(effective_threshold(p, Channel::scotopic(), view),
              3.0 * effective_threshold(ImpairmentProfile{}, Channel::scotopic(), view), 1e-12);
}

TEST(Observer, ProbabilityAtThreshold) {
  const ImpairmentProfile p;
  const ViewingSample view{600.0, 300.0, 0};
  EXPECT_NEAR(p_correct(p, spec_of(Channel::acuity(), 1.0), view), 0.25 + 0.73 / 2.0, 1e-12);
  EXPECT_NEAR(p_correct(p, spec_of(Channel::acuity(), 100.0), view), 0.98, 1e-6);
  std::mt19937_64 rng(1);
  auto infeasible = spec_of(Channel::acuity(), 1.0);
  infeasible.feasible = false;
  EXPECT_THROW(respond(p, infeasible, view, rng), Error);
}

TEST(Observer, MyopesSitCloser) {
  std::mt19937_64 rng(9);
  double emmetrope = 0.0, near_sighted = 0.0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    emmetrope += preferred_distance(ImpairmentProfile{}, rng);
    const double d = preferred_distance(myope(), rng);
    EXPECT_LE(d, 0.5);
    near_sighted += d;
  }
  EXPECT_LT(near_sighted / n, 0.8 * emmetrope / n);
}

TEST(Observer, ProfileValidation) {
  ImpairmentProfile p;
  p.cvd_severity = 1.5;
  EXPECT_THROW(p.validate(), Error);
  ImpairmentProfile q;
  q.nyctalopia_factor = 0.0;
  EXPECT_THROW(q.validate(), Error);
  EXPECT_NO_THROW(ImpairmentProfile{}.validate());
}

TEST(Schedule, SegmentsByFraction) {
  const AmbientSchedule s;
  EXPECT_EQ(s.lux_at(0, 100), 300.0);
  EXPECT_EQ(s.lux_at(74, 100), 300.0);
  EXPECT_EQ(s.lux_at(75, 100), 50.0);
  EXPECT_EQ(s.lux_at(80, 100), 3.0);
  EXPECT_EQ(s.lux_at(99, 100), 3.0);
}

TEST(Simulation, DeterministicAndComplete) {
  const auto a = run_session(myope(), reference_screen(), 120, AmbientSchedule{}, 77);
  const auto b = run_session(myope(), reference_screen(), 120, AmbientSchedule{}, 77);
  ASSERT_EQ(a.size(), 120u);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.front().trial_id, "s1-000000");
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_GT(a[i].view.timestamp_ms, a[i - 1].view.timestamp_ms);
  const auto c = run_session(myope(), reference_screen(), 120, AmbientSchedule{}, 78);
  EXPECT_NE(a, c);
}

TEST(Simulation, ScotopicOnlyInTheDark) {
  const auto log = run_session(ImpairmentProfile{}, reference_screen(), 600, AmbientSchedule{}, 5);
  int scotopic = 0;
  for (const auto& t : log) {
    const bool is_scotopic = t.spec.channel.kind == ChannelKind::Scotopic;
    if (t.view.ambient_lux > 10.0) EXPECT_FALSE(is_scotopic) << t.trial_id;
    else EXPECT_TRUE(is_scotopic) << t.trial_id;
    scotopic += is_scotopic;
  }
  EXPECT_EQ(scotopic, 120);
}

TEST(Simulation, StudyNamesSessionsByDay) {
  const auto log = run_study({ImpairmentProfile{}, ImpairmentProfile{}}, reference_screen(), 20, AmbientSchedule{}, 3);
  ASSERT_EQ(log.size(), 40u);
  EXPECT_EQ(log.front().session_id, "s1");
  EXPECT_EQ(log.back().session_id, "s2");
  EXPECT_GT(log[20].view.timestamp_ms, SimulationOptions{}.start_time_ms + 24LL * 3600 * 1000);
  EXPECT_LT(log[19].view.timestamp_ms, SimulationOptions{}.start_time_ms + 24LL * 3600 * 1000);
}
