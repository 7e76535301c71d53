// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <chrono>
#include <future>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/core/detail/base64.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "linetrace/cli/teleop.hpp"
#include "linetrace/imaging/png_io.hpp"
#include "test_support.hpp"

using namespace linetrace;
using namespace linetrace::cli;
using nlohmann::json;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = boost::asio::ip::tcp;

namespace {

threshold::HsvThreshold yellow() {
  using threshold::Axis;
  using threshold::Comparator;
  return {"yellow", {{{Axis::S, Comparator::Ge, 0.5}, {Axis::H, Comparator::Lt, 0.25}}}};
}

TeleopSession make_session(bool with_threshold = true) {
  return TeleopSession(sim::presets::oval(), sim::SimConfig{},
                       with_threshold ? std::optional(yellow()) : std::nullopt);
}

std::string decode_b64(const std::string& s) {
  namespace b64 = beast::detail::base64;
  std::string out(b64::decoded_size(s.size()), '\0');
  out.resize(b64::decode(out.data(), s.data(), s.size()).first);
  return out;
}

class WsClient {
 public:
  explicit WsClient(std::uint16_t port) : ws_(ioc_) {
    tcp::resolver resolver(ioc_);
    boost::asio::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/teleop");
  }
  json read() {
    beast::flat_buffer buf;
    ws_.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }
  // Skips frames until a message of `type` arrives.
  json read_until(const std::string& type, std::vector<json>* frames = nullptr) {
    for (;;) {
      json m = read();
      if (m["type"] == type) return m;
      if (frames && m["type"] == "frame") frames->push_back(std::move(m));
    }
  }
  void send(const std::string& text) { ws_.write(boost::asio::buffer(text)); }
  void close() { ws_.close(websocket::close_code::normal); }

 private:
  boost::asio::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
};

}  // namespace

TEST(TeleopSession, HelloAndFrameMessages) {
  TeleopSession s = make_session();
  ASSERT_TRUE(s.connect());
  const json hello = json::parse(s.hello());
  EXPECT_EQ(hello["type"], "hello");
  EXPECT_EQ(hello["world"], "oval");
  EXPECT_EQ(hello["fps"], 6);

  const TeleopSession::Tick t = s.tick();
  const json frame = json::parse(t.message);
  EXPECT_EQ(frame["type"], "frame");
  EXPECT_EQ(frame["seq"], 0);
  EXPECT_EQ(frame["t"], 0.0);
  EXPECT_EQ(frame["recording"], false);
  ASSERT_EQ(frame["pose"].size(), 3u);
  const std::string png = decode_b64(frame["png_b64"].get<std::string>());
  ASSERT_GT(png.size(), 8u);
  EXPECT_EQ(png.substr(1, 3), "PNG");
  linetrace::testing::TempDir dir("teleop");
  linetrace::testing::write_file(dir / "f.png", png);
  const imaging::RgbImage img = imaging::read_png(dir / "f.png");
  EXPECT_EQ(img.width(), 640);
  EXPECT_EQ(img.height(), 480);
  EXPECT_EQ(json::parse(s.tick().message)["t"], 1.0 / 6.0);
}

TEST(TeleopSession, ConstantCommandMatchesRunEpisode) {
  TeleopSession s = make_session();
  s.connect();
  ASSERT_FALSE(s.handle(R"({"type":"cmd","linear":1,"angular":0})"));
  std::vector<sim::Pose> poses;
  for (int i = 0; i < 30; ++i) poses.push_back(s.tick(false).record.pose);

  sim::CommandDriver straight({1.0, 0.0});
  sim::EpisodeOptions opt;
  opt.frames = 30;
  const sim::EpisodeTrace ref = sim::run_episode(sim::presets::oval(), straight, sim::SimConfig{}, opt);
  ASSERT_EQ(ref.frames.size(), 30u);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(poses[i], ref.frames[i].pose) << i;
}

TEST(TeleopSession, RecordingToggleControlsRows) {
  TeleopSession s = make_session();
  s.connect();
  s.handle(R"({"type":"cmd","linear":0.5,"angular":0.2})");
  for (int i = 0; i < 3; ++i) EXPECT_FALSE(s.tick(false).recorded);
  ASSERT_FALSE(s.handle(R"({"type":"record","on":true})"));
  for (int i = 0; i < 4; ++i) EXPECT_TRUE(s.tick(false).recorded);
  ASSERT_FALSE(s.handle(R"({"type":"record","on":false})"));
  for (int i = 0; i < 2; ++i) EXPECT_FALSE(s.tick(false).recorded);
  ASSERT_EQ(s.demos().size(), 4u);
  for (const auto& r : s.demos().records) {
    EXPECT_TRUE(dataset::is_unit_or_zero(r.linear, r.angular));
    EXPECT_NEAR(r.angular / r.linear, 0.4, 1e-12);  // raw values normalized
  }
  const dataset::DemoSet out = s.disconnect();
  EXPECT_EQ(out.size(), 4u);
  EXPECT_EQ(out.provenance, dataset::Provenance::Teleop);
  EXPECT_FALSE(s.recording());
}

TEST(TeleopSession, MalformedMessagesGetErrorsAndSessionContinues) {
  TeleopSession s = make_session();
  s.connect();
  for (const char* bad : {"{not json", "[1,2]", R"({"type":7})", R"({"type":"cmd","linear":"fast","angular":0})",
                          R"({"type":"cmd","linear":1})", R"({"type":"record","on":"yes"})", R"({"type":"jump"})"}) {
    const auto reply = s.handle(bad);
    ASSERT_TRUE(reply) << bad;
    EXPECT_EQ(json::parse(*reply)["type"], "error") << bad;
  }
  EXPECT_FALSE(s.handle(R"({"type":"cmd","linear":0.3,"angular":-0.1})"));
  EXPECT_EQ(s.latest_command(), (sim::DriveCommand{0.3, -0.1}));
  EXPECT_TRUE(s.connected());
}

TEST(TeleopSession, SingleClientAndThresholdGuard) {
  TeleopSession s = make_session(false);
  EXPECT_TRUE(s.handle(R"({"type":"record","on":true})"));  // nobody connected
  ASSERT_TRUE(s.connect());
  EXPECT_FALSE(s.connect());
  EXPECT_EQ(s.client_count(), 1);
  const auto reply = s.handle(R"({"type":"record","on":true})");
  ASSERT_TRUE(reply);
  EXPECT_NE(reply->find("threshold"), std::string::npos);
  s.disconnect();
  EXPECT_EQ(s.client_count(), 0);
  EXPECT_TRUE(s.connect());
  EXPECT_EQ(s.session_id(), "session-2");
}

TEST(TeleopService, EndToEndOverWebSocket) {
  linetrace::testing::TempDir dir("teleop_srv");
  TeleopSession session = make_session();
  std::promise<std::uint16_t> port_promise;
  std::ostringstream log;
  ServeOptions opt;
  opt.port = 0;
  opt.out_dir = dir.path();
  opt.duration = 8.0;
  opt.on_listening = [&](std::uint16_t p) { port_promise.set_value(p); };
  std::thread server([&] { serve_teleop(session, opt, log); });
  struct Joiner {
    std::thread& t;
    ~Joiner() {
      if (t.joinable()) t.join();
    }
  } joiner{server};
  const std::uint16_t port = port_promise.get_future().get();

  std::size_t recorded_frames = 0;
  std::vector<double> gaps;
  try {
    WsClient client(port);
    const json hello = client.read();
    EXPECT_EQ(hello["type"], "hello");
    EXPECT_EQ(hello["fps"], 6);

    WsClient second(port);
    const json busy = second.read();
    EXPECT_EQ(busy["type"], "error");
    EXPECT_EQ(busy["msg"], "busy");

    client.send(R"({"type":"cmd","linear":1,"angular":0.1})");
    client.send("{oops");
    std::vector<json> frames;
    EXPECT_EQ(client.read_until("error", &frames)["type"], "error");
    client.send(R"({"type":"record","on":true})");
    // Frames carry the recording flag once the toggle has been applied.
    auto last = std::chrono::steady_clock::now();
    int seen = 0;
    while (seen < 12) {
      const json f = client.read();
      if (f["type"] != "frame") continue;
      const auto now = std::chrono::steady_clock::now();
      if (seen > 0) gaps.push_back(std::chrono::duration<double>(now - last).count());
      last = now;
      recorded_frames += f["recording"].get<bool>();
      ++seen;
    }
    client.send(R"({"type":"record","on":false})");
    for (;;) {
      const json f = client.read();
      if (f["type"] == "frame" && !f["recording"].get<bool>()) break;
      if (f["type"] == "frame") ++recorded_frames;
    }
    client.close();
  } catch (const std::exception& e) {
    FAIL() << "client: " << e.what() << "\n" << log.str();
  }
  server.join();

  const std::string path = (dir / "teleop_session-1.csv").string();
  ASSERT_TRUE(std::filesystem::exists(path)) << log.str();
  const dataset::DemoSet set = dataset::read_csv(path);
  EXPECT_EQ(set.size(), recorded_frames);
  for (const auto& r : set.records) EXPECT_TRUE(dataset::is_unit_or_zero(r.linear, r.angular));

  double mean = 0.0;
  for (double g : gaps) mean += g;
  mean /= static_cast<double>(gaps.size());
  EXPECT_NEAR(mean, 1.0 / 6.0, 0.2 / 6.0);
  EXPECT_NE(log.str().find("busy"), std::string::npos);
}
