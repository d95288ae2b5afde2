#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "lelma/llm/gateway.hpp"

using namespace lelma::llm;

namespace {

std::vector<ChatMessage> ask(const std::string& text) { return {{Role::system, "be brief"}, {Role::user, text}}; }

// Plays back canned HTTP responses and remembers what was sent.
class StubTransport : public Transport {
 public:
  explicit StubTransport(std::vector<HttpResponse> script) : script_(std::move(script)) {}
  HttpResponse post(const HttpRequest& req) override {
    requests.push_back(req);
    if (next_ >= script_.size()) throw TransportFailure("stub exhausted");
    auto r = script_[next_++];
    if (r.status < 0) throw TransportFailure("connection refused");
    return r;
  }
  std::vector<HttpRequest> requests;

 private:
  std::vector<HttpResponse> script_;
  std::size_t next_ = 0;
};

class FailingTransport : public Transport {
 public:
  HttpResponse post(const HttpRequest&) override {
    ++uses;
    throw TransportFailure("network use is not allowed here");
  }
  std::atomic<int> uses{0};
};

const std::string kOpenAiOk =
    R"({"choices":[{"message":{"role":"assistant","content":"hi there"}}],"usage":{"prompt_tokens":7,"completion_tokens":2}})";

ModelConfig openai_cfg() {
  ModelConfig c;
  c.provider = ProviderKind::openai;
  c.model_id = "gpt-test";
  return c;
}

HttpProvider stub_provider(std::shared_ptr<Transport> t, std::vector<std::chrono::milliseconds>* sleeps = nullptr) {
  return HttpProvider(
      std::move(t), [sleeps](std::chrono::milliseconds d) { if (sleeps) sleeps->push_back(d); },
      [](const std::string&) { return std::optional<std::string>("sk-test"); });
}

std::filesystem::path temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "lelma_llm_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(ModelConfig, Defaults) {
  ModelConfig c;
  EXPECT_EQ(c.temperature, 1.0);
  EXPECT_EQ(c.max_output_tokens, 1024);
  EXPECT_EQ(c.retries, 3);
  EXPECT_EQ(c.timeout, std::chrono::seconds(60));
  c.temperature = -0.5;
  EXPECT_THROW(c.validate(), GatewayError);
  c.temperature = 0;
  c.max_output_tokens = 0;
  EXPECT_THROW(c.validate(), GatewayError);
}

TEST(MockProvider, ScriptedHello) {
  MockProvider mock(std::vector<std::string>{"hello"});
  auto r = mock.complete({}, ask("say hello"));
  EXPECT_EQ(r.text, "hello");
  EXPECT_EQ(r.usage.completion_tokens, 1);
  EXPECT_EQ(r.usage.prompt_tokens, 4);
  try {
    mock.complete({}, ask("again"));
    FAIL();
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.kind(), GatewayError::Kind::provider);
  }
}

TEST(MockProvider, RejectsBadConversations) {
  MockProvider mock(std::vector<std::string>{"x"});
  EXPECT_THROW(mock.complete({}, {}), GatewayError);
  EXPECT_THROW(mock.complete({}, {{Role::assistant, "hi"}}), GatewayError);
  EXPECT_THROW(mock.complete({}, {{Role::user, ""}}), GatewayError);
}

TEST(HttpProvider, RetriesTwo503sThenSucceeds) {
  auto t = std::make_shared<StubTransport>(std::vector<HttpResponse>{{503, "busy"}, {503, "busy"}, {200, kOpenAiOk}});
  std::vector<std::chrono::milliseconds> sleeps;
  auto p = stub_provider(t, &sleeps);
  auto cfg = openai_cfg();
  auto r = p.complete(cfg, ask("hi"));
  EXPECT_EQ(r.text, "hi there");
  EXPECT_EQ(r.usage, (Usage{7, 2}));
  EXPECT_EQ(t->requests.size(), 3u);
  ASSERT_EQ(sleeps.size(), 2u);
  EXPECT_LT(sleeps[0], sleeps[1]);
}

TEST(HttpProvider, GivesUpAfterRetries) {
  auto t = std::make_shared<StubTransport>(std::vector<HttpResponse>(5, {503, "busy"}));
  auto p = stub_provider(t);
  auto cfg = openai_cfg();
  cfg.retries = 2;
  try {
    p.complete(cfg, ask("hi"));
    FAIL();
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.kind(), GatewayError::Kind::provider);
    EXPECT_EQ(e.status(), 503);
    EXPECT_EQ(e.body(), "busy");
  }
  EXPECT_EQ(t->requests.size(), 3u);
}

TEST(HttpProvider, ClientErrorIsNotRetried) {
  auto t = std::make_shared<StubTransport>(std::vector<HttpResponse>{{401, "bad key"}, {200, kOpenAiOk}});
  auto p = stub_provider(t);
  EXPECT_THROW(p.complete(openai_cfg(), ask("hi")), GatewayError);
  EXPECT_EQ(t->requests.size(), 1u);
}

TEST(HttpProvider, TransportErrorAfterRetries) {
  auto t = std::make_shared<StubTransport>(std::vector<HttpResponse>{{-1, ""}, {-1, ""}, {-1, ""}, {-1, ""}});
  auto p = stub_provider(t);
  try {
    p.complete(openai_cfg(), ask("hi"));
    FAIL();
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.kind(), GatewayError::Kind::transport);
  }
  EXPECT_EQ(t->requests.size(), 4u);
}

TEST(HttpProvider, OpenAiWireFormat) {
  auto t = std::make_shared<StubTransport>(std::vector<HttpResponse>{{200, kOpenAiOk}});
  auto p = stub_provider(t);
  auto cfg = openai_cfg();
  cfg.temperature = 0.5;
  p.complete(cfg, ask("hi"));
  auto body = nlohmann::json::parse(t->requests[0].body);
  EXPECT_EQ(body["model"], "gpt-test");
  EXPECT_EQ(body["max_tokens"], 1024);
  EXPECT_EQ(body["temperature"], 0.5);
  EXPECT_EQ(body["messages"][1]["content"], "hi");
  EXPECT_EQ(t->requests[0].headers[0].second, "Bearer sk-test");
}

TEST(HttpProvider, GeminiWireFormat) {
  auto t = std::make_shared<StubTransport>(std::vector<HttpResponse>{
      {200, R"({"candidates":[{"content":{"parts":[{"text":"ok"}]}}],"usageMetadata":{"promptTokenCount":3,"candidatesTokenCount":1}})"}});
  auto p = stub_provider(t);
  ModelConfig cfg;
  cfg.provider = ProviderKind::gemini;
  cfg.model_id = "gemini-test";
  auto r = p.complete(cfg, ask("hi"));
  EXPECT_EQ(r.text, "ok");
  EXPECT_EQ(r.usage, (Usage{3, 1}));
  EXPECT_NE(t->requests[0].url.find("models/gemini-test:generateContent"), std::string::npos);
  auto body = nlohmann::json::parse(t->requests[0].body);
  EXPECT_EQ(body["systemInstruction"]["parts"][0]["text"], "be brief");
  EXPECT_EQ(body["contents"].size(), 1u);
  EXPECT_EQ(body["generationConfig"]["maxOutputTokens"], 1024);
}

TEST(HttpProvider, MissingKeyIsConfigurationError) {
  auto t = std::make_shared<FailingTransport>();
  HttpProvider p(t, [](auto) {}, [](const std::string&) { return std::optional<std::string>(); });
  try {
    p.complete(openai_cfg(), ask("hi"));
    FAIL();
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.kind(), GatewayError::Kind::configuration);
    EXPECT_NE(std::string(e.what()).find("OPENAI_API_KEY"), std::string::npos);
  }
  EXPECT_EQ(t->uses, 0);
}

TEST(HttpProvider, MalformedBodyIsParseError) {
  auto t = std::make_shared<StubTransport>(std::vector<HttpResponse>{{200, "{}"}});
  auto p = stub_provider(t);
  try {
    p.complete(openai_cfg(), ask("hi"));
    FAIL();
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.kind(), GatewayError::Kind::parse);
  }
}

TEST(Gateway, MockNeverTouchesTransport) {
  auto net = std::make_shared<FailingTransport>();
  auto mock = std::make_shared<MockProvider>([](const ModelConfig&, const std::vector<ChatMessage>& m) { return m.back().content; });
  Gateway gw(mock);
  for (int i = 0; i < 20; ++i) gw.complete({}, ask("echo " + std::to_string(i)));
  EXPECT_EQ(net->uses, 0);
}

TEST(Gateway, UsageIsAdditive) {
  auto mock = std::make_shared<MockProvider>([](const ModelConfig&, const std::vector<ChatMessage>& m) {
    return std::string(m.back().content.size() % 7 + 1, 'x') + " y z";
  });
  Gateway gw(mock);
  Usage sum;
  for (int i = 0; i < 50; ++i) sum += gw.complete({}, ask(std::string(i, 'a') + " b")).usage;
  EXPECT_EQ(gw.usage(), sum);
  Usage logged;
  for (const auto& u : gw.call_log()) logged += u;
  EXPECT_EQ(logged, sum);
  EXPECT_EQ(gw.calls(), 50u);
}

TEST(Gateway, Budgets) {
  auto mock = std::make_shared<MockProvider>([](auto&, auto&) { return std::string("one two three"); });
  Gateway calls(mock, Budget{2, std::nullopt});
  calls.complete({}, ask("a"));
  calls.complete({}, ask("a"));
  try {
    calls.complete({}, ask("a"));
    FAIL();
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.kind(), GatewayError::Kind::budget_exceeded);
  }
  Gateway tokens(mock, Budget{std::nullopt, 10});
  tokens.complete({}, ask("a b c d"));
  tokens.complete({}, ask("a"));
  EXPECT_THROW(tokens.complete({}, ask("a")), GatewayError);
}

TEST(Cassette, RecordThenReplayIsIdentical) {
  auto path = temp_file("roundtrip.jsonl");
  auto mock = std::make_shared<MockProvider>([n = 0](const ModelConfig&, const std::vector<ChatMessage>& m) mutable {
    return "reply " + std::to_string(n++) + " to " + m.back().content;
  });
  std::vector<CompletionResult> recorded;
  {
    auto writer = std::make_shared<CassetteWriter>(path);
    RecordingProvider rec(mock, writer);
    for (const auto* q : {"a", "b", "a", "c\nwith \"quotes\" and \t tabs"}) recorded.push_back(rec.complete({}, ask(q)));
  }
  auto replay = load_cassette(path);
  EXPECT_EQ(replay->size(), 4u);
  std::vector<CompletionResult> replayed;
  for (const auto* q : {"a", "b", "a", "c\nwith \"quotes\" and \t tabs"}) replayed.push_back(replay->complete({}, ask(q)));
  EXPECT_EQ(replayed, recorded);
  // The repeated prompt got its two distinct answers in order.
  EXPECT_NE(recorded[0].text, recorded[2].text);
}

TEST(Cassette, MissIsProviderError) {
  auto path = temp_file("one.jsonl");
  {
    auto writer = std::make_shared<CassetteWriter>(path);
    writer->append({}, ask("known"), {"answer", {1, 1}, std::chrono::milliseconds(5)});
  }
  auto replay = load_cassette(path);
  EXPECT_EQ(replay->complete({}, ask("known")).text, "answer");
  try {
    replay->complete({}, ask("unknown"));
    FAIL();
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.kind(), GatewayError::Kind::provider);
    EXPECT_EQ(e.body(), "cassette-miss");
  }
  ModelConfig other;
  other.model_id = "other-model";
  EXPECT_THROW(replay->complete(other, ask("known")), GatewayError);
}

TEST(Cassette, EmptyFileMissesEverything) {
  auto path = temp_file("empty.jsonl");
  std::ofstream(path).close();
  auto replay = load_cassette(path);
  EXPECT_EQ(replay->size(), 0u);
  EXPECT_THROW(replay->complete({}, ask("x")), GatewayError);
}

TEST(Cassette, ParseAndDuplicateErrors) {
  auto bad = temp_file("bad.jsonl");
  std::ofstream(bad) << "{not json\n";
  try {
    load_cassette(bad);
    FAIL();
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.kind(), GatewayError::Kind::parse);
  }
  auto dup = temp_file("dup.jsonl");
  {
    auto writer = std::make_shared<CassetteWriter>(dup);
    writer->append({}, ask("q"), {"a", {}, {}});
  }
  std::string line = lelma::llm::read_cassette(dup).at(0).to_json().dump();
  std::ofstream(dup) << line << "\n" << line << "\n";
  try {
    load_cassette(dup);
    FAIL();
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.kind(), GatewayError::Kind::duplicate_request_key);
  }
}

TEST(Cassette, KeyIsCanonical) {
  EXPECT_EQ(request_key("m", ask("x")), request_key("m", ask("x")));
  EXPECT_NE(request_key("m", ask("x")), request_key("n", ask("x")));
  EXPECT_NE(request_key("m", ask("x")), request_key("m", ask("y")));
  EXPECT_EQ(request_key("m", ask("x")).size(), 16u);
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Cassette, ConcurrentRecordingIsSerialised) {
  auto path = temp_file("concurrent.jsonl");
  auto writer = std::make_shared<CassetteWriter>(path);
  auto mock = std::make_shared<MockProvider>([](auto&, const std::vector<ChatMessage>& m) { return m.back().content; });
  RecordingProvider rec(mock, writer);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&, t] {
      for (int i = 0; i < 25; ++i) rec.complete({}, ask(std::to_string(t) + "-" + std::to_string(i)));
    });
  for (auto& th : threads) th.join();
  EXPECT_EQ(read_cassette(path).size(), 100u);
}
