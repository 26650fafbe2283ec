#include <thread>

#include <gtest/gtest.h>

#include <gamediag/gamediag.hpp>
#include <gamediag/server.hpp>

using namespace gamediag;

namespace {

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ServiceConfig config;
    config.data_dir.clear();
    config.children = {{"kid", "Kid", {reference_screen()}}};
    service_ = std::make_unique<Service>(config);
    register_routes(server_, *service_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void TearDown() override {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

  std::unique_ptr<Service> service_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

void expect_error(const httplib::Result& res, int status, const std::string& code) {
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, status);
  const Json body = Json::parse(res->body);
  EXPECT_EQ(body["code"], code);
  EXPECT_TRUE(body["message"].is_string());
}

}  // namespace

TEST_F(ServerTest, Health) {
  auto res = client().Get("/v1/healthz");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(Json::parse(res->body)["status"], "ok");
}

TEST_F(ServerTest, PostTrialsThenReport) {
  const auto log = run_session(ImpairmentProfile{}, reference_screen(), 20, AmbientSchedule{}, 3);
  auto c = client();
  for (const auto& t : log) {
    auto res = c.Post("/v1/children/kid/sessions/s1/trials", to_json(t).dump(), "application/json");
    ASSERT_TRUE(res);
    ASSERT_EQ(res->status, 200) << res->body;
    const Json ack = Json::parse(res->body);
    EXPECT_EQ(ack["trial_id"], t.trial_id);
    EXPECT_EQ(ack["duplicate"], false);
  }
  auto again = c.Post("/v1/children/kid/sessions/s1/trials", to_json(log[0]).dump(), "application/json");
  ASSERT_TRUE(again);
  EXPECT_EQ(again->status, 200);
  EXPECT_EQ(Json::parse(again->body)["duplicate"], true);

  auto report = c.Get("/v1/children/kid/report");
  ASSERT_TRUE(report);
  EXPECT_EQ(report->status, 200);
  EXPECT_EQ(report->body, service_->get_report("kid").dump());
  EXPECT_EQ(Json::parse(report->body)["trial_counts"]["total"], 20);
}

TEST_F(ServerTest, Alerts) {
  auto res = client().Get("/v1/children/kid/alerts?since=0");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const Json body = Json::parse(res->body);
  EXPECT_EQ(body["v"], 1);
  EXPECT_TRUE(body["alerts"].is_array());
  expect_error(client().Get("/v1/children/kid/alerts?since=soon"), 400, "BadRequest");
}

TEST_F(ServerTest, ErrorBodies) {
  auto c = client();
  expect_error(c.Get("/v1/children/nobody/report"), 404, "NotFound");
  expect_error(c.Post("/v1/children/kid/sessions/s1/trials", "{oops", "application/json"), 400, "BadRequest");
  expect_error(c.Post("/v1/children/kid/sessions/s1/trials", R"({"v": 1})", "application/json"), 400,
               "BadRequest");
  const auto t = run_session(ImpairmentProfile{}, reference_screen(), 1, AmbientSchedule{}, 3).front();
  expect_error(c.Post("/v1/children/nobody/sessions/s1/trials", to_json(t).dump(), "application/json"), 404,
               "NotFound");
}
