#include <doctest.h>

#include <algorithm>
#include <string>

#include "support/generators.hpp"
#include "weaver/ontology.hpp"

namespace on = weaver::ontology;
namespace kw = weaver::keywords;
using weaver::testsupport::fixture_path;
using weaver::testsupport::lexicon;

namespace {

kw::ChunkPattern default_pattern() { return kw::ChunkPattern::compile("(ADJ|N)*N"); }

on::ConceptGraph fixture_graph() {
    static const on::ConceptGraph g = on::build_service_ontology(
        weaver::testsupport::themed_registry(), lexicon(), default_pattern());
    return g;
}

}  // namespace

TEST_SUITE("ontology") {

TEST_CASE("service ontology built from the fixture registry") {
    on::ConceptGraph g = fixture_graph();
    CHECK(g.concepts.size() == 44);

    // "customer order" shows up in four service descriptions.
    CHECK(g.freq.at("customer order") == 4);
    CHECK(g.providedBy.at("customer order") ==
          std::set<std::string>{"svc-inventory-checker", "svc-order-validator",
                                "svc-payment-gateway", "svc-shipping-scheduler"});
    CHECK(g.isA.at("customer order") == std::set<std::string>{"order"});
    CHECK(g.domainConcepts.count("customer order") == 1);

    // The head noun exists as its own concept but provides nothing.
    CHECK(g.concepts.count("order") == 1);
    CHECK(g.freq.at("order") == 0);
    CHECK(g.providedBy.count("order") == 0);
    CHECK(g.domainConcepts.count("order") == 1);

    // Verb concepts are not domain concepts.
    CHECK(g.freq.at("send") == 2);
    CHECK(g.providedBy.at("send") == std::set<std::string>{"svc-email-sender", "svc-sms-sender"});
    CHECK(g.domainConcepts.count("send") == 0);

    // Every concept has a frequency entry, even the zero ones.
    for (const std::string& c : g.concepts) CHECK(g.freq.count(c) == 1);
    CHECK(g.freq.size() == g.concepts.size());
}

TEST_CASE("parallel build equals the serial reference") {
    auto reg = weaver::testsupport::themed_registry();
    auto pattern = default_pattern();
    on::ConceptGraph serial = on::build_service_ontology_serial(reg, lexicon(), pattern);
    CHECK(on::build_service_ontology(reg, lexicon(), pattern) == serial);
    CHECK(on::build_service_ontology(reg, lexicon(), pattern, 1) == serial);
    CHECK(on::build_service_ontology(reg, lexicon(), pattern, 4) == serial);
}

TEST_CASE("build order does not depend on descriptor file order") {
    // Same records loaded in a different order produce the same graph.
    std::vector<std::string> texts;
    for (const auto& [id, rec] : weaver::testsupport::themed_registry().records)
        texts.push_back(weaver::registry::save_descriptor(rec));
    auto pattern = default_pattern();
    on::ConceptGraph forward =
        on::build_service_ontology(weaver::registry::load_registry(texts), lexicon(), pattern);
    std::reverse(texts.begin(), texts.end());
    on::ConceptGraph reversed =
        on::build_service_ontology(weaver::registry::load_registry(texts), lexicon(), pattern);
    CHECK(forward == reversed);
    CHECK(forward == fixture_graph());
}

TEST_CASE("empty registry is rejected") {
    weaver::registry::Registry empty;
    auto pattern = default_pattern();
    CHECK_THROWS_AS(on::build_service_ontology(empty, lexicon(), pattern), weaver::Error);
    CHECK_THROWS_AS(on::build_service_ontology_serial(empty, lexicon(), pattern), weaver::Error);
}

TEST_CASE("baseline pruning drops below-mean concepts") {
    on::ConceptGraph g;
    g.concepts = {"validate", "rare phrase", "phrase", "noise"};
    g.freq = {{"validate", 6}, {"rare phrase", 1}, {"phrase", 0}, {"noise", 1}};
    g.isA["rare phrase"] = {"phrase"};
    g.providedBy = {{"validate", {"s1"}}, {"rare phrase", {"s2"}}, {"noise", {"s3"}}};
    g.domainConcepts = {"rare phrase", "phrase", "noise"};

    // total 8 over 4 concepts, mean 2: only "validate" clears it, and its
    // child is gone, so no parent is forced to stay.
    on::ConceptGraph pruned = on::prune_baseline(g);
    CHECK(pruned.concepts == std::set<std::string>{"validate"});
    CHECK(pruned.freq == std::map<std::string, long long>{{"validate", 6}});
    CHECK(pruned.isA.empty());
    CHECK(pruned.providedBy == std::map<std::string, std::set<std::string>>{{"validate", {"s1"}}});
    CHECK(pruned.domainConcepts.empty());
}

TEST_CASE("pruning keeps the parents of surviving children") {
    on::ConceptGraph g;
    g.concepts = {"customer order", "order", "junk"};
    g.freq = {{"customer order", 5}, {"order", 0}, {"junk", 1}};
    g.isA["customer order"] = {"order"};
    g.domainConcepts = {"customer order", "order", "junk"};

    // total 6 over 3, mean 2: "order" fails on its own (0 < 2) but survives
    // because its child "customer order" stays; "junk" has no protector.
    on::ConceptGraph pruned = on::prune_baseline(g);
    CHECK(pruned.concepts == std::set<std::string>{"customer order", "order"});
    CHECK(pruned.isA.at("customer order") == std::set<std::string>{"order"});
    CHECK(pruned.freq.at("order") == 0);
    CHECK(pruned.domainConcepts == std::set<std::string>{"customer order", "order"});
}

TEST_CASE("pruning keeps exact-mean concepts and tolerates empty graphs") {
    on::ConceptGraph g;
    g.concepts = {"a", "b"};
    g.freq = {{"a", 1}, {"b", 1}};
    CHECK(on::prune_baseline(g) == g);  // 1*2 >= 2 on both sides of the tie

    on::ConceptGraph empty;
    CHECK(on::prune_baseline(empty) == empty);
}

TEST_CASE("fixture pruning is a no-op only thanks to parent forcing") {
    on::ConceptGraph g = fixture_graph();
    long long total = 0;
    for (const auto& [c, f] : g.freq) total += f;
    const long long count = static_cast<long long>(g.concepts.size());

    // The zero-frequency head nouns all sit below the mean...
    std::set<std::string> belowMean;
    for (const auto& [c, f] : g.freq)
        if (f * count < total) belowMean.insert(c);
    CHECK(!belowMean.empty());
    CHECK(belowMean.count("order") == 1);

    // ...yet pruning removes nothing, because each one anchors a kept child.
    CHECK(on::prune_baseline(g) == g);
}

TEST_CASE("pruning matches the oracle on random frequency tables") {
    weaver::testsupport::Rng rng(1234);
    for (int i = 0; i < 60; ++i) {
        on::ConceptGraph g = weaver::testsupport::random_freq_graph(rng);
        std::set<std::string> expected = weaver::testsupport::oracle_prune_kept(g);
        on::ConceptGraph pruned = on::prune_baseline(g);
        CAPTURE(on::save_triples(g));
        CHECK(pruned.concepts == expected);
        // Retained metadata is the restriction of the original.
        for (const std::string& c : pruned.concepts) {
            CHECK(pruned.freq.at(c) == g.freq.at(c));
            CHECK(pruned.providedBy.count(c) == g.providedBy.count(c));
            if (g.providedBy.count(c)) CHECK(pruned.providedBy.at(c) == g.providedBy.at(c));
            CHECK(pruned.domainConcepts.count(c) == g.domainConcepts.count(c));
        }
    }
}

TEST_CASE("triple files round trip losslessly") {
    on::ConceptGraph g = fixture_graph();
    std::string text = on::save_triples(g);
    on::ConceptGraph back = on::load_triples(text);
    CHECK(back == g);
    CHECK(on::save_triples(back) == text);

    weaver::testsupport::Rng rng(5150);
    for (int i = 0; i < 100; ++i) {
        on::ConceptGraph r = weaver::testsupport::random_concept_graph(rng);
        std::string t = on::save_triples(r);
        CAPTURE(t);
        CHECK(on::load_triples(t) == r);
    }
}

TEST_CASE("triple text is sorted and complete") {
    on::ConceptGraph g;
    g.concepts = {"b", "a"};
    g.freq = {{"a", 2}, {"b", 0}};
    g.isA["b"] = {"a"};
    g.domainConcepts = {"a"};
    g.providedBy["a"] = {"s2", "s1"};
    CHECK(on::save_triples(g) ==
          "a\tfreq\t2\n"
          "a\tisDomain\ttrue\n"
          "a\tprovidedBy\ts1\n"
          "a\tprovidedBy\ts2\n"
          "b\tfreq\t0\n"
          "b\tisA\ta\n");
}

TEST_CASE("loading triples fills in implied concepts and frequencies") {
    on::ConceptGraph g = on::load_triples("child\tisA\tparent\r\n\nchild\tprovidedBy\tsvc-x\n");
    CHECK(g.concepts == std::set<std::string>{"child", "parent"});
    CHECK(g.freq.at("child") == 0);
    CHECK(g.freq.at("parent") == 0);
    CHECK(g.providedBy.at("child") == std::set<std::string>{"svc-x"});
    CHECK(on::load_triples("").concepts.empty());
}

TEST_CASE("malformed triples carry their line number") {
    auto fails_at = [](const std::string& text, std::size_t line) {
        try {
            on::load_triples(text);
            FAIL_CHECK("expected TripleError for: " << text);
        } catch (const on::TripleError& e) {
            CHECK(e.line() == line);
            CHECK(e.code() == "MalformedTriple");
        }
    };
    fails_at("a freq 3\n", 1);                        // spaces, not tabs
    fails_at("a\tfreq\n", 1);                         // two fields
    fails_at("a\tfreq\t3\textra\n", 1);               // four fields
    fails_at("\tfreq\t3\n", 1);                       // empty subject
    fails_at("a\tfreq\t\n", 1);                       // empty object
    fails_at("a\tfreq\t3\nb\tfreq\t-1\n", 2);         // negative freq
    fails_at("a\tfreq\t1.5\n", 1);                    // non-integer freq
    fails_at("a\tlinksTo\tb\n", 1);                   // unknown predicate
    fails_at("a\tisDomain\tfalse\n", 1);              // isDomain must be true
}

TEST_CASE("memo records and replays keyword sets") {
    on::ProcessMemo memo;
    kw::KeywordSet k;
    k.verbs = {"archive"};
    k.nounPhrases = {"paper trail", "paperwork"};
    k.headNouns = {"trail"};

    CHECK(!on::memo_lookup(memo, k).has_value());
    on::memo_record(memo, k, {"svc-a", "svc-b"});
    auto hit = on::memo_lookup(memo, k);
    REQUIRE(hit.has_value());
    CHECK(*hit == std::vector<std::string>{"svc-a", "svc-b"});

    // Head nouns are not part of the key: a set differing only there hits.
    kw::KeywordSet alias = k;
    alias.headNouns = {"paperwork"};
    CHECK(on::memo_lookup(memo, alias).has_value());

    // Re-recording overwrites.
    on::memo_record(memo, k, {"svc-c"});
    CHECK(*on::memo_lookup(memo, k) == std::vector<std::string>{"svc-c"});
}

TEST_CASE("memo file round trip") {
    on::ProcessMemo memo;
    memo.entries["archive|paper trail"] = {"svc-b", "svc-a"};
    memo.entries["send"] = {"svc-mail"};
    std::string text = on::save_memo(memo);
    CHECK(text == "archive|paper trail\tsvc-b,svc-a\nsend\tsvc-mail\n");

    on::ProcessMemo back = on::load_memo(text);
    CHECK(back.entries == memo.entries);
    CHECK(on::save_memo(back) == text);
    CHECK(on::load_memo("").entries.empty());

    auto fails = [](const std::string& t) { CHECK_THROWS_AS(on::load_memo(t), on::TripleError); };
    fails("keyonly\n");       // no tab
    fails("\tsvc-a\n");       // empty key
    fails("key\t\n");         // no services
    fails("key\tsvc-a,\n");   // trailing comma means empty id
    fails("key\ta,,b\n");     // empty id inside the list
}

}
