#include <doctest.h>

#include "generators.hpp"
#include "kgdash/error.hpp"
#include "kgdash/metrics.hpp"
#include "kgdash/model.hpp"

using namespace kgdash;

namespace {

Entity resource(const char* id, std::vector<EntityId> classes = {}) {
    return {EntityId(id), EntityKind::resource, std::nullopt, std::nullopt, std::move(classes), std::nullopt};
}
Entity of_kind(const char* id, EntityKind kind, std::optional<std::string> label = std::nullopt) {
    return {EntityId(id), kind, std::move(label), std::nullopt, {}, std::nullopt};
}
Statement stmt(const char* id, const char* s, const char* p, const char* o) {
    return {EntityId(id), EntityId(s), EntityId(p), EntityId(o), std::nullopt};
}

Errc error_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return Errc::io_error;
}

}  // namespace

TEST_CASE("entity ids reject empty and whitespace") {
    CHECK(EntityId::is_valid("R123"));
    CHECK_FALSE(EntityId::is_valid(""));
    CHECK_FALSE(EntityId::is_valid("R 1"));
    CHECK_FALSE(EntityId::is_valid("R1\n"));
    CHECK(error_of([] { EntityId(""); }) == Errc::invalid_id);
}

TEST_CASE("empty snapshot") {
    auto s = build_snapshot({}, {});
    CHECK(s.entities().empty());
    CHECK(s.statements().empty());
    CHECK(s.outgoing(EntityId("R1")).empty());
    CHECK(entities_of_class(s, EntityId("Paper")).empty());
}

TEST_CASE("single edge is indexed by subject and object") {
    auto s = build_snapshot({resource("R1"), of_kind("P1", EntityKind::predicate), of_kind("L1", EntityKind::literal, "v")},
                            {stmt("S1", "R1", "P1", "L1")});
    REQUIRE(s.outgoing(EntityId("R1")).size() == 1);
    CHECK(s.outgoing(EntityId("R1"))[0]->id == EntityId("S1"));
    REQUIRE(s.incoming(EntityId("L1")).size() == 1);
    CHECK(s.incoming(EntityId("L1"))[0]->id == EntityId("S1"));
    CHECK(s.outgoing(EntityId("L1")).empty());
}

TEST_CASE("build errors") {
    SUBCASE("dangling statement reference names the statement") {
        try {
            build_snapshot({resource("R1"), of_kind("P1", EntityKind::predicate)}, {stmt("S7", "R1", "P1", "R99")});
            FAIL("no throw");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::dangling_reference);
            CHECK(e.context() == "S7");
        }
    }
    SUBCASE("duplicate entity id") {
        CHECK(error_of([] { build_snapshot({resource("R1"), resource("R1")}, {}); }) == Errc::duplicate_id);
    }
    SUBCASE("duplicate statement id") {
        CHECK(error_of([] {
                  build_snapshot({resource("R1"), of_kind("P1", EntityKind::predicate)},
                                 {stmt("S1", "R1", "P1", "R1"), stmt("S1", "R1", "P1", "R1")});
              }) == Errc::duplicate_id);
    }
    SUBCASE("dangling class membership") {
        CHECK(error_of([] { build_snapshot({resource("R1", {EntityId("Nope")})}, {}); }) == Errc::dangling_reference);
    }
    SUBCASE("class membership must point at a class") {
        CHECK(error_of([] { build_snapshot({resource("R1", {EntityId("R2")}), resource("R2")}, {}); }) ==
              Errc::kind_mismatch);
    }
    SUBCASE("subject must be a resource, predicate a predicate") {
        CHECK(error_of([] {
                  build_snapshot({of_kind("L1", EntityKind::literal, "x"), of_kind("P1", EntityKind::predicate)},
                                 {stmt("S1", "L1", "P1", "L1")});
              }) == Errc::kind_mismatch);
        CHECK(error_of([] { build_snapshot({resource("R1")}, {stmt("S1", "R1", "R1", "R1")}); }) ==
              Errc::kind_mismatch);
    }
}

TEST_CASE("entities_of_class") {
    auto s = build_snapshot({of_kind("Paper", EntityKind::klass), of_kind("Comparison", EntityKind::klass),
                             resource("R2", {EntityId("Paper")}), resource("R1", {EntityId("Paper"), EntityId("Paper")}),
                             resource("R3", {EntityId("Comparison")}), of_kind("Empty", EntityKind::klass)},
                            {});
    CHECK(entities_of_class(s, EntityId("Paper")) == std::vector{EntityId("R1"), EntityId("R2")});
    CHECK(entities_of_class(s, EntityId("Empty")).empty());
    CHECK(entities_of_class(s, EntityId("Unknown")).empty());
}

TEST_CASE("curation config validation") {
    CurationConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.entity_url(EntityId("R5")) == "https://orkg.org/resource/R5");
    c.entity_url_template = "https://x/{id}/{id}";
    CHECK(error_of([&] { c.validate(); }) == Errc::config_error);
    c.entity_url_template = "https://x/";
    CHECK(error_of([&] { c.validate(); }) == Errc::config_error);
    c.entity_url_template = "{id}";
    c.traversal_depth_limit = 0;
    CHECK(error_of([&] { c.validate(); }) == Errc::config_error);
}

TEST_CASE("published handle swaps atomically and keeps old readers alive") {
    SnapshotHandle h(std::make_shared<const Snapshot>(build_snapshot({resource("R1")}, {})));
    auto reader = h.load();
    h.publish(std::make_shared<const Snapshot>(build_snapshot({}, {})));
    CHECK(reader->entities().size() == 1);
    CHECK(h.load()->entities().empty());
}

TEST_CASE("property: index sizes, class lookup and permutation invariance") {
    gen::Rng rng(11);
    for (int round = 0; round < 200; ++round) {
        auto gc = gen::random_graph(rng, 500, 600);
        auto snap = gen::snapshot_of(gc.graph);

        std::size_t by_subject = 0, by_object = 0;
        for (const auto& [id, list] : snap.subject_index()) by_subject += list.size();
        for (const auto& [id, list] : snap.object_index()) by_object += list.size();
        CHECK(by_subject == snap.statements().size());
        CHECK(by_object == snap.statements().size());

        for (const auto& e : snap.entities()) {
            if (e.kind != EntityKind::klass) continue;
            CHECK(entities_of_class(snap, e.id) == oracle::entities_of_class(gc.graph, e.id));
        }

        auto other = gen::snapshot_of(gen::shuffled(gc.graph, rng));
        CHECK(metrics_summary(snap, gc.config) == metrics_summary(other, gc.config));
        CHECK(duplicate_predicate_groups(snap) == duplicate_predicate_groups(other));
        CHECK(statement_count_per_paper(snap, gc.config) == statement_count_per_paper(other, gc.config));
        CHECK(unused_resources(snap) == unused_resources(other));
        CHECK(template_overview(snap, gc.config) == template_overview(other, gc.config));
    }
}
