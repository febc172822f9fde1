#include <doctest.h>

#include <random>

#include "fixture.hpp"
#include "generators.hpp"
#include "kgdash/comments.hpp"
#include "kgdash/error.hpp"

using namespace kgdash;

namespace {

Errc error_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return Errc::io_error;
}

const Snapshot& kg() {
    static const Snapshot s = fixture::snapshot();
    return s;
}

Comment add(CommentStore& store, const char* target, CommentType type = CommentType::other) {
    return store.create(kg(), EntityId(target), type, "needs work", "ana", fixture::kNow);
}

}  // namespace

TEST_CASE("create, list and resolve") {
    fixture::TempDir dir;
    CommentStore store(dir / "c.jsonl");
    CHECK(store.list().empty());

    auto first = add(store, "R111", CommentType::incomplete);
    CHECK(first.id == 1);
    CHECK(first.status == CommentStatus::open);
    CHECK(first.created_at == fixture::kNow);
    auto second = add(store, "R100");
    CHECK(second.id == 2);
    auto third = add(store, "R111", CommentType::question);
    auto all = store.list();
    REQUIRE(all.size() == 3);
    CHECK(all[0].id == 1);
    CHECK(all[2].id == 3);

    store.set_status(third.id, CommentStatus::resolved);
    CHECK(store.list({std::nullopt, CommentStatus::open, std::nullopt}).size() == 2);
    CHECK(store.list({EntityId("R111"), std::nullopt, std::nullopt}).size() == 2);
    CHECK(store.list({EntityId("R111"), CommentStatus::open, CommentType::incomplete}) == std::vector{first});
    CHECK(store.get(3)->status == CommentStatus::resolved);
    CHECK_FALSE(store.get(99));

    CHECK(error_of([&] { store.set_status(42, CommentStatus::resolved); }) == Errc::unknown_comment);
}

TEST_CASE("create validation") {
    fixture::TempDir dir;
    CommentStore store(dir / "c.jsonl");
    auto now = fixture::kNow;
    CHECK(error_of([&] { store.create(kg(), EntityId("R999"), CommentType::other, "x", "a", now); }) ==
          Errc::unknown_target);
    CHECK(error_of([&] { store.create(kg(), EntityId("R100"), CommentType::other, " \n\t", "a", now); }) ==
          Errc::empty_text);
    CHECK(error_of([&] { store.create(kg(), EntityId("R100"), CommentType::other, "x", "  ", now); }) ==
          Errc::empty_author);
    std::string longest(kMaxCommentLength, 'x');
    CHECK_NOTHROW(store.create(kg(), EntityId("R100"), CommentType::other, longest, "a", now));
    CHECK(error_of([&] { store.create(kg(), EntityId("R100"), CommentType::other, longest + "x", "a", now); }) ==
          Errc::invalid_arg);
    // Length counts characters, not bytes.
    std::string wide;
    for (std::size_t i = 0; i < kMaxCommentLength; ++i) wide += "\xc3\xa9";
    CHECK_NOTHROW(store.create(kg(), EntityId("R100"), CommentType::other, wide, "a", now));
    CHECK(store.size() == 2);
}

TEST_CASE("restart replays the journal") {
    fixture::TempDir dir;
    std::vector<Comment> before;
    {
        CommentStore store(dir / "c.jsonl");
        add(store, "R111");
        add(store, "R100", CommentType::duplicate);
        store.set_status(1, CommentStatus::resolved);
        before = store.list();
    }
    CommentStore again(dir / "c.jsonl");
    CHECK(again.list() == before);
    CHECK(again.get(1)->status == CommentStatus::resolved);
    CHECK(add(again, "R101").id == 3);

    CHECK(replay_journal(dir / "c.jsonl") == again.list());
    CHECK(replay_journal(dir / "c.jsonl") == replay_journal(dir / "c.jsonl"));
}

TEST_CASE("compaction keeps state and ids") {
    fixture::TempDir dir;
    CommentStore store(dir / "c.jsonl");
    for (int i = 0; i < 5; ++i) add(store, "R100");
    store.set_status(2, CommentStatus::resolved);
    store.set_status(2, CommentStatus::open);
    store.set_status(4, CommentStatus::resolved);
    auto state = store.list();
    auto size_before = std::filesystem::file_size(dir / "c.jsonl");
    store.compact();
    CHECK(std::filesystem::file_size(dir / "c.jsonl") < size_before);
    CHECK(store.list() == state);
    CHECK(add(store, "R100").id == 6);
    CommentStore reopened(dir / "c.jsonl");
    CHECK(reopened.list() == store.list());
}

TEST_CASE("journal corruption is detected, an unterminated tail is not") {
    fixture::TempDir dir;
    {
        CommentStore store(dir / "c.jsonl");
        add(store, "R100");
        add(store, "R101");
    }
    std::string good = fixture::read_file(dir / "c.jsonl");

    fixture::write_file(dir / "tail.jsonl", good + "{\"op\":\"create\",\"id\":3,");
    std::uint64_t valid = 0;
    CHECK(replay_journal(dir / "tail.jsonl", &valid).size() == 2);
    CHECK(valid == good.size());
    {
        CommentStore store(dir / "tail.jsonl");
        CHECK(add(store, "R102").id == 3);
    }
    CHECK(replay_journal(dir / "tail.jsonl").size() == 3);

    fixture::write_file(dir / "bad.jsonl", "garbage\n" + good);
    CHECK(error_of([&] { replay_journal(dir / "bad.jsonl"); }) == Errc::journal_corrupt);
    fixture::write_file(dir / "order.jsonl", good + good);
    CHECK(error_of([&] { replay_journal(dir / "order.jsonl"); }) == Errc::journal_corrupt);
    fixture::write_file(dir / "status.jsonl", good + "{\"op\":\"set_status\",\"id\":9,\"status\":\"open\"}\n");
    CHECK(error_of([&] { replay_journal(dir / "status.jsonl"); }) == Errc::journal_corrupt);
}

TEST_CASE("property: random operation sequences match a linear scan of replay") {
    gen::Rng rng(3);
    const std::vector<const char*> targets = {"R100", "R111", "P60", "R300"};
    for (int round = 0; round < 30; ++round) {
        fixture::TempDir dir;
        CommentStore store(dir / "c.jsonl");
        std::vector<Comment> model;
        for (int op = 0; op < 40; ++op) {
            if (model.empty() || rng() % 3 != 0) {
                auto type = static_cast<CommentType>(rng() % 5);
                model.push_back(add(store, targets[rng() % targets.size()], type));
            } else {
                auto& c = model[rng() % model.size()];
                c.status = rng() % 2 ? CommentStatus::resolved : CommentStatus::open;
                store.set_status(c.id, c.status);
            }
        }
        auto replayed = replay_journal(dir / "c.jsonl");
        CHECK(replayed == model);
        for (int q = 0; q < 10; ++q) {
            CommentFilter f;
            if (rng() % 2) f.target = EntityId(targets[rng() % targets.size()]);
            if (rng() % 2) f.status = static_cast<CommentStatus>(rng() % 2);
            if (rng() % 2) f.type = static_cast<CommentType>(rng() % 5);
            std::vector<Comment> scan;
            for (const auto& c : replayed) {
                if ((!f.target || c.target == *f.target) && (!f.status || c.status == *f.status) &&
                    (!f.type || c.type == *f.type)) {
                    scan.push_back(c);
                }
            }
            CHECK(store.list(f) == scan);
        }
    }
}
