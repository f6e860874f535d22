#include <doctest.h>

#include <filesystem>
#include <set>

#include "consult/detail/io.hpp"
#include "consult/qa.hpp"
#include "consult/sft.hpp"
#include "consult/synthetic.hpp"

using namespace consult;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("consult_sft_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ConsultationRecord two_turn_record() {
    ConsultationRecord r;
    r.id = "r1";
    r.department = Department::surgery;
    r.turns = {{Role::patient, "hi", 0}, {Role::doctor, "hello", 1}};
    return r;
}

}  // namespace

TEST_CASE("a record maps to system+user+assistant messages in order") {
    const auto e = record_to_example(two_turn_record(), "be helpful");
    REQUIRE(e.messages.size() == 3);
    CHECK(e.messages[0].role == MsgRole::system);
    CHECK(e.messages[0].content == "be helpful");
    CHECK(e.messages[1].role == MsgRole::user);
    CHECK(e.messages[1].content == "hi");
    CHECK(e.messages[2].role == MsgRole::assistant);
    CHECK(validate_example(e).empty());
}

TEST_CASE("an empty system prompt adds no system message") {
    const auto e = record_to_example(two_turn_record(), "");
    REQUIRE(e.messages.size() == 2);
    CHECK(e.messages[0].role == MsgRole::user);
}

TEST_CASE("four turns map to four alternating messages after the system") {
    auto r = two_turn_record();
    r.turns.push_back({Role::patient, "more", 2});
    r.turns.push_back({Role::doctor, "again", 3});
    const auto e = record_to_example(r, "s");
    REQUIRE(e.messages.size() == 5);
    CHECK(validate_example(e).empty());
}

TEST_CASE("qa pairs map to a two-message example with verbatim answer") {
    const QAPair p{"What does X treat?", "fever", KnowledgeKind::medicine, "X",
                   Aspect::indications};
    const auto with_system = qa_to_example(p, "sys");
    CHECK(with_system.messages.size() == 3);
    const auto without = qa_to_example(p, "");
    REQUIRE(without.messages.size() == 2);
    CHECK(without.messages[0].content == "What does X treat?");
    CHECK(without.messages[1].content == "fever");
    CHECK(validate_example(without).empty());
}

TEST_CASE("example_to_turns inverts record_to_example") {
    const auto records = synth::synth_records(25, 63);
    for (const auto& r : records) {
        const auto turns = example_to_turns(record_to_example(r, "system prompt"));
        REQUIRE(turns.size() == r.turns.size());
        for (std::size_t i = 0; i < turns.size(); ++i) {
            CHECK(turns[i].role == r.turns[i].role);
            CHECK(turns[i].text == r.turns[i].text);
        }
    }
}

TEST_CASE("validate_example rejects broken alternation") {
    SFTExample e;
    e.messages = {{MsgRole::user, "a"}, {MsgRole::user, "b"}};
    CHECK(!validate_example(e).empty());
    e.messages = {{MsgRole::assistant, "a"}};
    CHECK(!validate_example(e).empty());
    e.messages = {{MsgRole::system, "s"}, {MsgRole::user, "u"}};
    CHECK(!validate_example(e).empty());  // no assistant message
}

TEST_CASE("ten records with an 80/20 split give 8 train and 2 val") {
    const auto dir = temp_dir("split");
    const auto records = synth::synth_records(10, 19);
    DatasetOptions opts;
    opts.system_prompt = "s";
    opts.split_fractions = {0.8, 0.2};
    const auto out = build_dataset(records, {}, dir, 5, opts);
    CHECK(load_examples(out.split_paths[0]).examples.size() == 8);
    CHECK(load_examples(out.split_paths[1]).examples.size() == 2);
    CHECK(out.manifest.conversation_examples == 10);
    CHECK(out.manifest.knowledge_examples == 0);
}

TEST_CASE("two runs under one seed are byte-identical") {
    const auto records = synth::synth_records(30, 8);
    const auto entries = synth::synth_knowledge(KnowledgeKind::disease, 10, 9);
    const auto pairs = generate_pairs(entries, TemplateSet::defaults());
    auto run = [&](const fs::path& dir) {
        DatasetOptions opts;
        opts.system_prompt = "s";
        const auto out = build_dataset(records, pairs, dir, 77, opts);
        return detail::read_file(out.split_paths[0]) + detail::read_file(out.split_paths[1]) +
               detail::read_file(out.manifest_path);
    };
    CHECK(run(temp_dir("det_a")) == run(temp_dir("det_b")));
}

TEST_CASE("every input item lands in exactly one split exactly once") {
    const auto dir = temp_dir("partition");
    const auto records = synth::synth_records(41, 13);
    const auto entries = synth::synth_knowledge(KnowledgeKind::medicine, 12, 14);
    const auto pairs = generate_pairs(entries, TemplateSet::defaults());
    DatasetOptions opts;  // no mix_ratio: everything is used
    const auto out = build_dataset(records, pairs, dir, 3, opts);

    std::multiset<std::string> emitted;
    for (const auto& path : out.split_paths)
        for (const auto& e : load_examples(path).examples) {
            std::string key;
            for (const auto& m : e.messages) key += to_string(m.role) + ":" + m.content + "|";
            emitted.insert(key);
        }
    std::multiset<std::string> expected;
    auto key_of = [](const SFTExample& e) {
        std::string key;
        for (const auto& m : e.messages) key += to_string(m.role) + ":" + m.content + "|";
        return key;
    };
    for (const auto& r : records) expected.insert(key_of(record_to_example(r, "")));
    for (const auto& p : pairs) expected.insert(key_of(qa_to_example(p, "")));
    CHECK(emitted == expected);
    CHECK(emitted.size() == records.size() + pairs.size());
}

TEST_CASE("the alternation invariant holds over whole emitted files") {
    const auto dir = temp_dir("altern");
    const auto records = synth::synth_records(50, 21);
    const auto entries = synth::synth_knowledge(KnowledgeKind::disease, 20, 22);
    const auto pairs = generate_pairs(entries, TemplateSet::defaults());
    DatasetOptions opts;
    opts.system_prompt = "sys";
    const auto out = build_dataset(records, pairs, dir, 4, opts);
    for (const auto& path : out.split_paths) CHECK(validate_dataset_file(path).empty());
}

TEST_CASE("a mix ratio of one half balances a 100+100 input exactly") {
    const auto dir = temp_dir("mix");
    const auto records = synth::synth_records(100, 31);
    auto entries = synth::synth_knowledge(KnowledgeKind::disease, 40, 32);
    auto pairs = generate_pairs(entries, TemplateSet::defaults());
    pairs.resize(100);
    DatasetOptions opts;
    opts.mix_ratio = 0.5;
    const auto out = build_dataset(records, pairs, dir, 6, opts);
    CHECK(out.manifest.conversation_examples == 100);
    CHECK(out.manifest.knowledge_examples == 100);
}

TEST_CASE("the mix ratio downsamples the over-represented side") {
    const auto dir = temp_dir("mix2");
    const auto records = synth::synth_records(90, 41);
    auto entries = synth::synth_knowledge(KnowledgeKind::medicine, 40, 42);
    auto pairs = generate_pairs(entries, TemplateSet::defaults());
    pairs.resize(30);
    DatasetOptions opts;
    opts.mix_ratio = 0.25;  // knowledge should be a quarter of the mix
    const auto out = build_dataset(records, pairs, dir, 6, opts);
    // conversations capped at 3x knowledge
    CHECK(out.manifest.knowledge_examples == 30);
    CHECK(out.manifest.conversation_examples == 90);

    opts.mix_ratio = 0.1;
    const auto out2 = build_dataset(records, pairs, dir, 6, opts);
    CHECK(out2.manifest.conversation_examples == 90);
    CHECK(out2.manifest.knowledge_examples == 10);

    opts.mix_ratio = 0.0;
    const auto out3 = build_dataset(records, pairs, dir, 6, opts);
    CHECK(out3.manifest.knowledge_examples == 0);
}

TEST_CASE("the manifest carries the training defaults") {
    TrainManifest m;
    CHECK(m.global_batch_size == 16);
    CHECK(m.learning_rate == doctest::Approx(2e-5));
    CHECK(m.optimizer == "AdamW");
    CHECK(m.max_seq_len_tokens == 1024);
    CHECK(m.epochs == 4);
    CHECK(m.adapter == "low-rank adaptation");
    const auto j = manifest_to_json(m);
    CHECK(j.at("mix").at("conversation").get<std::size_t>() == 0);
}

TEST_CASE("empty input is rejected") {
    CHECK_THROWS_AS(build_dataset({}, {}, temp_dir("empty"), 1, {}), EmptyInput);
}
