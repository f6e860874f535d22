#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "consult/detail/rng.hpp"
#include "consult/detail/sha256.hpp"
#include "consult/ingest.hpp"
#include "consult/synthetic.hpp"

using namespace consult;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("consult_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

const char* kRecordLine =
    R"({"id":"r1","department":"gynecology","turns":[{"role":"patient","text":"hi"},{"role":"doctor","text":"hello"}],"source":"human"})";

}  // namespace

TEST_CASE("load_records parses one well-formed line") {
    const auto dir = temp_dir("ingest1");
    write_text(dir / "r.jsonl", std::string(kRecordLine) + "\n");
    const auto result = load_records(dir / "r.jsonl");
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].id == "r1");
    CHECK(result.records[0].department == Department::gynecology);
    CHECK(result.records[0].turns.size() == 2);
    CHECK(result.total_lines == 1);
}

TEST_CASE("load_records returns an empty list for an empty file") {
    const auto dir = temp_dir("ingest2");
    write_text(dir / "r.jsonl", "");
    const auto result = load_records(dir / "r.jsonl");
    CHECK(result.records.empty());
    CHECK(result.total_lines == 0);
}

TEST_CASE("a line missing the turns field is a ParseError at line 1") {
    const auto dir = temp_dir("ingest3");
    write_text(dir / "r.jsonl", R"({"id":"r1","source":"human"})"
                                "\n");
    try {
        load_records(dir / "r.jsonl");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line_no == 1);
    }
}

TEST_CASE("lenient mode skips bad lines and keeps the count identity") {
    const auto dir = temp_dir("ingest4");
    write_text(dir / "r.jsonl", std::string(kRecordLine) + "\nnot json\n" + kRecordLine + "\n");
    const auto result = load_records(dir / "r.jsonl", ParseMode::lenient);
    CHECK(result.records.size() == 2);
    CHECK(result.skipped.size() == 1);
    CHECK(result.skipped[0].line_no == 2);
    CHECK(result.records.size() + result.skipped.size() == result.total_lines);
}

TEST_CASE("unknown record keys are rejected") {
    const auto dir = temp_dir("ingest5");
    write_text(dir / "r.jsonl",
               R"({"id":"r1","turns":[{"role":"patient","text":"a"},{"role":"doctor","text":"b"}],"source":"human","extra":1})"
               "\n");
    CHECK_THROWS_AS(load_records(dir / "r.jsonl"), ParseError);
}

TEST_CASE("knowledge loading honours the closed aspect key set") {
    const auto dir = temp_dir("ingest6");
    write_text(dir / "d.jsonl",
               R"({"name":"a","aspects":{"symptoms":"s","causes":"c","diagnosis":"d","treatment":"t","lifestyle":"l","prevention":"p","when_to_consult":"w"}})"
               "\n");
    const auto entries = load_knowledge(dir / "d.jsonl", KnowledgeKind::disease).entries;
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].aspects.size() == 7);

    // a medicine aspect on a disease entry is a ParseError
    write_text(dir / "bad.jsonl", R"({"name":"a","aspects":{"indications":"x"}})"
                                  "\n");
    CHECK_THROWS_AS(load_knowledge(dir / "bad.jsonl", KnowledgeKind::disease), ParseError);
}

TEST_CASE("duplicate knowledge names are rejected") {
    const auto dir = temp_dir("ingest7");
    write_text(dir / "d.jsonl", R"({"name":"a","aspects":{"symptoms":"s"}})"
                                "\n"
                                R"({"name":"a","aspects":{"causes":"c"}})"
                                "\n");
    CHECK_THROWS_AS(load_knowledge(dir / "d.jsonl", KnowledgeKind::disease), DuplicateName);
    const auto lenient = load_knowledge(dir / "d.jsonl", KnowledgeKind::disease,
                                        ParseMode::lenient);
    CHECK(lenient.entries.size() == 1);
    CHECK(lenient.skipped.size() == 1);
}

TEST_CASE("write then load round-trips records exactly") {
    const auto dir = temp_dir("ingest8");
    const auto records = synth::synth_records(40, 11);
    const auto manifest = write_records(dir / "r.jsonl", records);
    CHECK(manifest.count == 40);
    CHECK(manifest.kind == CorpusKind::records);
    const auto loaded = load_records(dir / "r.jsonl");
    CHECK(loaded.records == records);

    // knowledge round-trip too
    const auto entries = synth::synth_knowledge(KnowledgeKind::medicine, 20, 5);
    write_knowledge(dir / "m.jsonl", entries, KnowledgeKind::medicine);
    CHECK(load_knowledge(dir / "m.jsonl", KnowledgeKind::medicine).entries == entries);
}

TEST_CASE("writing an empty corpus yields an empty file and a zero-count manifest") {
    const auto dir = temp_dir("ingest9");
    const auto manifest = write_records(dir / "r.jsonl", {});
    CHECK(manifest.count == 0);
    CHECK(detail::read_file(dir / "r.jsonl").empty());
}

TEST_CASE("content hash changes iff file bytes change") {
    const auto dir = temp_dir("ingest10");
    const auto records = synth::synth_records(5, 3);
    const auto m1 = write_records(dir / "a.jsonl", records);
    const auto m2 = write_records(dir / "b.jsonl", records);
    CHECK(m1.content_hash == m2.content_hash);
    auto altered = records;
    altered[0].turns[0].text += "!";
    const auto m3 = write_records(dir / "c.jsonl", altered);
    CHECK(m1.content_hash != m3.content_hash);
}

TEST_CASE("single-byte corruption is detected or changes the parsed corpus") {
    const auto dir = temp_dir("ingest11");
    // departments deliberately avoid others/unclassified so the fallback
    // cannot mask a corrupted label as the original record
    auto records = synth::synth_records(3, 17);
    for (auto& r : records) r.department = Department::psychiatry;
    write_records(dir / "r.jsonl", records);
    const std::string original = detail::read_file(dir / "r.jsonl");
    const auto baseline = load_records(dir / "r.jsonl").records;

    detail::Rng rng(99);
    int detected = 0, changed = 0;
    for (int trial = 0; trial < 150; ++trial) {
        std::string bytes = original;
        const std::size_t pos = rng.below(bytes.size());
        char replacement = static_cast<char>(rng.below(256));
        while (replacement == bytes[pos]) replacement = static_cast<char>(rng.below(256));
        bytes[pos] = replacement;
        write_text(dir / "fuzz.jsonl", bytes);
        try {
            const auto mutated = load_records(dir / "fuzz.jsonl").records;
            CHECK(mutated != baseline);
            ++changed;
        } catch (const ParseError&) {
            ++detected;
        }
    }
    CHECK(detected + changed == 150);
    CHECK(detected > 0);
}

TEST_CASE("sha256 matches the FIPS 180-4 test vectors") {
    CHECK(detail::sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(detail::sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(detail::sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    const std::string million(1000000, 'a');
    CHECK(detail::sha256_hex(million) ==
          "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}
