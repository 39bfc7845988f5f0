#include <thread>

#include <gtest/gtest.h>

#include "curvesel/protocol.hpp"
#include "curvesel/service.hpp"
#include "test_support.hpp"

using namespace curvesel;
namespace pr = curvesel::protocol;

namespace {

Vec3 rvec(Rng& rng) { return curvesel::testing::random_point(rng, 10.0); }

std::string rid(Rng& rng) { return "s" + std::to_string(rng.index(100000)); }

pr::ClientMessage random_client(Rng& rng) {
    switch (rng.index(4)) {
        case 0:
            return pr::NewSession{rng.index(1u << 30) * 4096 + rng.index(4096)};
        case 1:
            return pr::SetPose{rid(rng), rvec(rng), rvec(rng), rvec(rng), rng.uniform(), rng.uniform(0.1, 8.0)};
        case 2: {
            SelectionEvent e;
            switch (rng.index(4)) {
                case 0:
                    e = SelectionEvent::bend();
                    break;
                case 1:
                    e = SelectionEvent::straighten();
                    break;
                case 2:
                    e = SelectionEvent::touch(rng.index(8));
                    break;
                default:
                    e = SelectionEvent::cancel();
            }
            return pr::Event{rid(rng), e};
        }
        default:
            return pr::SetParadigm{rid(rng), rng.index(2) == 0 ? Paradigm::LinearRay : Paradigm::BezierCurve};
    }
}

pr::Frame random_frame(Rng& rng) {
    pr::Frame f;
    f.session_id = rid(rng);
    f.kappa = rng.uniform(0.0, 1.5);
    for (int i = 0; i < 21; ++i) {
        f.curve_samples.push_back(rvec(rng));
    }
    const std::size_t k = rng.index(5);
    for (std::size_t i = 0; i < k; ++i) {
        f.ranked.push_back({static_cast<ObjectId>(rng.index(64)), rng.uniform(), rvec(rng), rng.index(20), rng.uniform()});
        f.slots.push_back({i, f.ranked.back().object_id, rvec(rng)});
    }
    f.phase = static_cast<Phase>(rng.index(3));
    return f;
}

pr::ServerMessage random_server(Rng& rng) {
    switch (rng.index(4)) {
        case 0: {
            SceneConfig c;
            c.object_count = 1 + rng.index(6);
            c.seed = rng.index(1000);
            return pr::SessionCreated{rid(rng), generate_scene(c)};
        }
        case 1:
            return random_frame(rng);
        case 2: {
            pr::EventResult r;
            r.session_id = rid(rng);
            r.phase = static_cast<Phase>(rng.index(3));
            if (rng.index(2) == 0) {
                r.selection = pr::Selection{static_cast<ObjectId>(rng.index(64)), rng.index(2) == 0};
            }
            if (rng.index(2) == 0) {
                r.soft_error = "empty slot";
            }
            r.frame = random_frame(rng);
            return r;
        }
        default:
            return pr::Error{rng.index(2) == 0 ? "bad_message" : "no_session", "detail " + rid(rng)};
    }
}

template <typename T>
T expect_kind(const pr::ServerMessage& m) {
    const T* p = std::get_if<T>(&m);
    if (p == nullptr) {
        ADD_FAILURE() << "unexpected reply " << pr::serialize(m);
        return T{};
    }
    return *p;
}

std::string new_session(PlaygroundService& svc, std::uint64_t seed) {
    return expect_kind<pr::SessionCreated>(svc.handle(pr::ClientMessage{pr::NewSession{seed}})).session_id;
}

pr::Frame set_pose(PlaygroundService& svc, const std::string& id, double flexion, Vec3 wrist = {0.15, 1.1, 0.2}) {
    return expect_kind<pr::Frame>(
        svc.handle(pr::ClientMessage{pr::SetPose{id, wrist, {0, 0, 1}, {0, 1, 0}, flexion, kDefaultReach}}));
}

pr::EventResult send(PlaygroundService& svc, const std::string& id, SelectionEvent e) {
    return expect_kind<pr::EventResult>(svc.handle(pr::ClientMessage{pr::Event{id, e}}));
}

}  // namespace

TEST(Protocol, ClientRoundTrip) {
    Rng rng(61);
    for (int i = 0; i < 10000; ++i) {
        const pr::ClientMessage m = random_client(rng);
        ASSERT_EQ(pr::parse_client(pr::serialize(m)), m) << pr::serialize(m);
    }
}

TEST(Protocol, ServerRoundTrip) {
    Rng rng(62);
    for (int i = 0; i < 10000; ++i) {
        const pr::ServerMessage m = random_server(rng);
        ASSERT_EQ(pr::parse_server(pr::serialize(m)), m) << pr::serialize(m);
    }
}

TEST(Protocol, WireShape) {
    const json j = pr::to_json(pr::ClientMessage{pr::Event{"s1", SelectionEvent::touch(2)}});
    EXPECT_EQ(j, json::parse(R"({"type":"event","session_id":"s1","kind":"slot_touched","slot":2})"));
    const json p = pr::to_json(pr::ClientMessage{pr::SetParadigm{"s1", Paradigm::LinearRay}});
    EXPECT_EQ(p["paradigm"], "linear");
    const json e = pr::to_json(pr::ServerMessage{pr::Error{"no_session", "x"}});
    EXPECT_EQ(e, json::parse(R"({"type":"error","code":"no_session","detail":"x"})"));
}

TEST(Protocol, MalformedInputIsBadMessage) {
    for (const char* text : {"", "{", "[]", "{\"type\":\"nope\"}", "{\"type\":\"new_session\"}",
                             "{\"type\":\"new_session\",\"seed\":-1}",
                             "{\"type\":\"event\",\"session_id\":\"s1\",\"kind\":\"wave\"}",
                             "{\"type\":\"set_pose\",\"session_id\":\"s1\",\"wrist\":[0,0]}"}) {
        try {
            pr::parse_client(text);
            ADD_FAILURE() << "accepted: " << text;
        } catch (const pr::ProtocolError& e) {
            EXPECT_EQ(e.code(), "bad_message") << text;
        }
    }
}

TEST(Service, NewSessionBuildsSeededScene) {
    PlaygroundService svc;
    const auto reply = expect_kind<pr::SessionCreated>(svc.handle(pr::ClientMessage{pr::NewSession{17}}));
    SceneConfig c;
    c.seed = 17;
    EXPECT_EQ(reply.scene, generate_scene(c));
    EXPECT_FALSE(reply.session_id.empty());
    EXPECT_EQ(svc.session_count(), 1u);
    EXPECT_NE(new_session(svc, 17), reply.session_id);
}

TEST(Service, ExtendedFingerGivesStraightRay) {
    PlaygroundService svc;
    const std::string id = new_session(svc, 3);
    const pr::Frame f = set_pose(svc, id, 0.0);
    EXPECT_EQ(f.kappa, 0.0);
    ASSERT_EQ(f.curve_samples.size(), 21u);
    const Vec3 a = f.curve_samples.front();
    const Vec3 d = normalized(f.curve_samples.back() - a);
    for (const Vec3& p : f.curve_samples) {
        EXPECT_LT(norm(cross(p - a, d)), 1e-9);
    }
}

TEST(Service, FullyBentFingerGivesMaxCurvature) {
    PlaygroundService svc;
    const std::string id = new_session(svc, 3);
    EXPECT_DOUBLE_EQ(set_pose(svc, id, 1.0).kappa, 1.5);
    EXPECT_NEAR(set_pose(svc, id, 0.5).kappa, 0.75, 1e-12);
}

TEST(Service, FrameMatchesRankingUntilLocked) {
    PlaygroundService svc;
    ServiceConfig cfg;
    const std::string id = new_session(svc, 8);
    const pr::Frame f = set_pose(svc, id, 0.3);
    const SessionState s = *svc.snapshot(id);
    const Polyline line{f.curve_samples};
    EXPECT_EQ(f.ranked, rank_objects(line, s.scene.objects, cfg.slots).ranked);
    EXPECT_EQ(f.slots.size(), f.ranked.size());
    EXPECT_EQ(f.phase, Phase::Idle);

    send(svc, id, SelectionEvent::bend());
    const auto locked = send(svc, id, SelectionEvent::straighten());
    EXPECT_EQ(locked.phase, Phase::Locked);
    EXPECT_EQ(locked.frame.ranked, f.ranked);
    // moving the hand while locked leaves the shown ranking frozen
    const pr::Frame moved = set_pose(svc, id, 0.9, {-0.5, 1.0, 0.2});
    EXPECT_EQ(moved.phase, Phase::Locked);
    EXPECT_EQ(moved.ranked, f.ranked);
    EXPECT_NE(moved.curve_samples, f.curve_samples);
}

TEST(Service, AimedSelectionReportsTarget) {
    PlaygroundService svc;
    const std::string id = new_session(svc, 11);
    const SessionState s = *svc.snapshot(id);
    const Vec3 wrist{0.15, 1.1, 0.2};
    const Vec3 dir = normalized(s.scene.target().position - wrist);
    const Vec3 helper = std::abs(dir.y) < 0.9 ? Vec3{0, 1, 0} : Vec3{1, 0, 0};
    const Vec3 ortho = normalized(helper - dot(helper, dir) * dir);
    ASSERT_TRUE(std::holds_alternative<pr::Frame>(
        svc.handle(pr::ClientMessage{pr::SetPose{id, wrist, dir, ortho, 0.0, kDefaultReach}})));
    EXPECT_EQ(send(svc, id, SelectionEvent::bend()).phase, Phase::Active);
    const auto locked = send(svc, id, SelectionEvent::straighten());
    ASSERT_FALSE(locked.frame.ranked.empty());
    const auto done = send(svc, id, SelectionEvent::touch(0));
    ASSERT_TRUE(done.selection.has_value());
    EXPECT_EQ(done.selection->object_id, locked.frame.ranked[0].object_id);
    EXPECT_EQ(done.selection->is_target, done.selection->object_id == s.scene.target_id);
    EXPECT_EQ(done.phase, Phase::Idle);
}

TEST(Service, BendStraightenTouchSelectsTargetWhenRankedFirst) {
    // one-object scenes make the target the only candidate
    ServiceConfig cfg;
    cfg.scene.object_count = 1;
    PlaygroundService svc(cfg);
    const std::string id = new_session(svc, 4);
    send(svc, id, SelectionEvent::bend());
    send(svc, id, SelectionEvent::straighten());
    const auto done = send(svc, id, SelectionEvent::touch(0));
    ASSERT_TRUE(done.selection.has_value());
    EXPECT_TRUE(done.selection->is_target);
}

TEST(Service, EmptySlotIsSoftError) {
    ServiceConfig cfg;
    cfg.scene.object_count = 2;
    PlaygroundService svc(cfg);
    const std::string id = new_session(svc, 4);
    send(svc, id, SelectionEvent::bend());
    send(svc, id, SelectionEvent::straighten());
    const auto r = send(svc, id, SelectionEvent::touch(3));
    EXPECT_EQ(r.soft_error, std::optional<std::string>("empty slot"));
    EXPECT_EQ(r.phase, Phase::Locked);
    EXPECT_FALSE(r.selection);
}

TEST(Service, ParadigmSwitchForcesStraightRay) {
    PlaygroundService svc;
    const std::string id = new_session(svc, 5);
    set_pose(svc, id, 1.0);
    const auto f = expect_kind<pr::Frame>(svc.handle(pr::ClientMessage{pr::SetParadigm{id, Paradigm::LinearRay}}));
    EXPECT_EQ(f.kappa, 0.0);
    const Vec3 a = f.curve_samples.front();
    const Vec3 d = normalized(f.curve_samples.back() - a);
    for (const Vec3& p : f.curve_samples) {
        EXPECT_LT(norm(cross(p - a, d)), 1e-9);
    }
}

TEST(Service, Errors) {
    PlaygroundService svc;
    EXPECT_EQ(expect_kind<pr::Error>(svc.handle("not json")).code, "bad_message");
    EXPECT_EQ(expect_kind<pr::Error>(svc.handle(R"({"type":"event","session_id":"zz","kind":"bend"})")).code,
              "no_session");
    const std::string id = new_session(svc, 1);
    EXPECT_EQ(expect_kind<pr::Error>(svc.handle(pr::ClientMessage{pr::SetPose{id, {}, {0, 0, 1}, {0, 1, 0}, 1.5, 4.0}}))
                  .code,
              "bad_message");
    EXPECT_EQ(expect_kind<pr::Error>(svc.handle(pr::ClientMessage{pr::SetPose{id, {}, {0, 0, 1}, {0, 0, 1}, 0.5, 4.0}}))
                  .code,
              "bad_message");
    EXPECT_EQ(expect_kind<pr::Error>(svc.handle(pr::ClientMessage{pr::SetPose{id, {}, {0, 0, 1}, {0, 1, 0}, 0.5, 0.0}}))
                  .code,
              "bad_message");
    // a rejected pose leaves the session untouched
    EXPECT_EQ(svc.snapshot(id)->params.kappa, 0.0);
    svc.close_all();
    EXPECT_EQ(svc.session_count(), 0u);
    EXPECT_EQ(expect_kind<pr::Error>(svc.handle(pr::ClientMessage{pr::Event{id, SelectionEvent::bend()}})).code,
              "no_session");
}

TEST(Service, HandleTextSpeaksJson) {
    PlaygroundService svc;
    const json reply = json::parse(svc.handle_text(R"({"type":"new_session","seed":2})"));
    EXPECT_EQ(reply["type"], "session");
    EXPECT_EQ(reply["scene"]["objects"].size(), 64u);
}

TEST(Service, ConcurrentSessionsMatchSerialReplay) {
    // Each thread drives its own session; the result must equal replaying
    // that thread's messages alone on a fresh service.
    const auto script = [](PlaygroundService& svc, std::uint64_t seed) {
        Rng rng(seed);
        const std::string id = new_session(svc, seed);
        std::vector<std::string> replies;
        for (int i = 0; i < 60; ++i) {
            pr::ClientMessage m = random_client(rng);
            std::visit(
                [&](auto& x) {
                    if constexpr (requires { x.session_id; }) {
                        x.session_id = id;
                    }
                },
                m);
            if (auto* p = std::get_if<pr::SetPose>(&m)) {
                p->v_align = {0, 0, 1};
                p->v_ortho = {0, 1, 0};
            }
            if (std::holds_alternative<pr::NewSession>(m)) {
                continue;
            }
            replies.push_back(pr::serialize(svc.handle(m)));
        }
        return replies;
    };
    PlaygroundService shared;
    std::vector<std::vector<std::string>> concurrent(4);
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < 4; ++t) {
            pool.emplace_back([&, t] { concurrent[t] = script(shared, 100 + t); });
        }
    }
    for (std::size_t t = 0; t < 4; ++t) {
        PlaygroundService alone;
        const auto serial = script(alone, 100 + t);
        ASSERT_EQ(serial.size(), concurrent[t].size());
        for (std::size_t i = 0; i < serial.size(); ++i) {
            // session ids differ between the two services
            json a = json::parse(serial[i]);
            json b = json::parse(concurrent[t][i]);
            a.erase("session_id");
            b.erase("session_id");
            if (a.contains("frame")) {
                a["frame"].erase("session_id");
                b["frame"].erase("session_id");
            }
            EXPECT_EQ(a, b) << "thread " << t << " message " << i;
        }
    }
    EXPECT_EQ(shared.session_count(), 4u);
}
