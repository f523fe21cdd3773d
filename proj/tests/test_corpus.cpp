// Corpus loading, tokenization and statistics.
#include <fstream>
#include <string>

#include "catch2/catch_amalgamated.hpp"
#include "gloss/corpus.hpp"
#include "gloss/errors.hpp"

namespace {

std::string mini_path() { return std::string(GLOSS_SOURCE_DIR) + "/data/mini.tsv"; }

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string("/tmp/") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("tokenize splits on whitespace and peels sentence punctuation") {
    using gloss::Side;
    CHECK(gloss::tokenize("are you deaf ?", Side::Source) ==
          gloss::Sentence{"are", "you", "deaf", "?"});
    CHECK(gloss::tokenize("Are you deaf?", Side::Source) ==
          gloss::Sentence{"are", "you", "deaf", "?"});
    CHECK(gloss::tokenize("DEAF YOU?", Side::Target) == gloss::Sentence{"DEAF", "YOU", "?"});
    // leading and trailing punctuation peel into their own tokens, trail order preserved
    CHECK(gloss::tokenize("!what?!", Side::Source) ==
          gloss::Sentence{"!", "what", "?", "!"});
    // internal punctuation stays inside the token
    CHECK(gloss::tokenize("don't stop", Side::Source) == gloss::Sentence{"don't", "stop"});
    CHECK(gloss::tokenize("e-mail", Side::Source) == gloss::Sentence{"e-mail"});
    // case folding applies to the english side only
    CHECK(gloss::tokenize("Hello", Side::Source) == gloss::Sentence{"hello"});
    CHECK(gloss::tokenize("Hello", Side::Target) == gloss::Sentence{"Hello"});
    CHECK(gloss::tokenize("", Side::Source).empty());
    CHECK(gloss::tokenize("   ", Side::Source).empty());
    CHECK(gloss::tokenize("a,b", Side::Source) == gloss::Sentence{"a,b"});
    CHECK(gloss::tokenize("a, b", Side::Source) == gloss::Sentence{"a", ",", "b"});
}

TEST_CASE("load_parallel_corpus reads tab separated pairs and skips comments") {
    const auto path = write_temp("corpus_basic.tsv",
                                 "# header comment\n"
                                 "I play\tI PLAY\n"
                                 "\n"
                                 "you read\tYOU READ\n");
    const gloss::ParallelCorpus corpus = gloss::load_parallel_corpus(path);
    REQUIRE(corpus.pairs.size() == 2);
    CHECK(corpus.pairs[0].source == gloss::Sentence{"i", "play"});
    CHECK(corpus.pairs[0].target == gloss::Sentence{"I", "PLAY"});
    CHECK(corpus.pairs[0].id == 0);
    CHECK(corpus.pairs[1].id == 1);
    CHECK(corpus.pairs[1].lf() == 2);
    CHECK(corpus.pairs[1].le() == 2);
}

TEST_CASE("load_parallel_corpus reports malformed lines with their line number") {
    const auto path = write_temp("corpus_notab.tsv", "I play\tI PLAY\nno separator here\n");
    try {
        gloss::load_parallel_corpus(path);
        FAIL("expected FormatError");
    } catch (const gloss::FormatError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("load_parallel_corpus rejects pairs with an empty side") {
    const auto path = write_temp("corpus_empty_side.tsv", "I play\t\n");
    CHECK_THROWS_AS(gloss::load_parallel_corpus(path), gloss::EmptySentence);
    const auto path2 = write_temp("corpus_empty_src.tsv", "\tI PLAY\n");
    CHECK_THROWS_AS(gloss::load_parallel_corpus(path2), gloss::EmptySentence);
}

TEST_CASE("vocabulary ids follow first occurrence and source vocab reserves NULL") {
    const auto path = write_temp("corpus_vocab.tsv", "b a b\tB A\na c\tA C\n");
    const gloss::ParallelCorpus corpus = gloss::load_parallel_corpus(path);
    CHECK(corpus.source_vocab.surface(0) == gloss::kNullSurface);
    CHECK(corpus.source_vocab.id("b") == 1);
    CHECK(corpus.source_vocab.id("a") == 2);
    CHECK(corpus.source_vocab.id("c") == 3);
    CHECK(corpus.source_vocab.size() == 4);
    CHECK(corpus.target_vocab.id("B") == 0);
    CHECK(corpus.target_vocab.id("A") == 1);
    CHECK(corpus.target_vocab.size() == 3);
    CHECK(corpus.target_vocab.contains("C"));
    CHECK_FALSE(corpus.target_vocab.contains("NULL"));
}

TEST_CASE("reverse_corpus swaps sides and rebuilds vocabularies") {
    const auto path = write_temp("corpus_rev.tsv", "i play\tI PLAY\n");
    const gloss::ParallelCorpus corpus = gloss::load_parallel_corpus(path);
    const gloss::ParallelCorpus rev = gloss::reverse_corpus(corpus);
    REQUIRE(rev.pairs.size() == 1);
    CHECK(rev.pairs[0].source == gloss::Sentence{"I", "PLAY"});
    CHECK(rev.pairs[0].target == gloss::Sentence{"i", "play"});
    CHECK(rev.source_vocab.contains("I"));
    CHECK(rev.source_vocab.surface(0) == gloss::kNullSurface);
    CHECK(rev.target_vocab.contains("play"));
}

TEST_CASE("corpus_from_lines matches the file loader tokenization") {
    const gloss::ParallelCorpus corpus =
        gloss::corpus_from_lines({{"Are you deaf?", "DEAF YOU?"}});
    REQUIRE(corpus.pairs.size() == 1);
    CHECK(corpus.pairs[0].source == gloss::Sentence{"are", "you", "deaf", "?"});
    CHECK(corpus.pairs[0].target == gloss::Sentence{"DEAF", "YOU", "?"});
}

TEST_CASE("bundled corpus statistics") {
    const gloss::ParallelCorpus corpus = gloss::load_parallel_corpus(mini_path());
    const gloss::CorpusStats st = gloss::corpus_stats(corpus);
    CHECK(st.sentence_count == 15);
    CHECK(st.source_token_count == 130);
    CHECK(st.source_type_count == 75);
    CHECK(st.target_token_count == 96);
    CHECK(st.target_type_count == 56);
    REQUIRE(st.ngram_type_counts.count(1) == 1);
    CHECK(st.ngram_type_counts.at(1) == 57);
    CHECK(st.ngram_type_counts.at(2) == 91);
    CHECK(st.ngram_type_counts.at(3) == 105);
}

TEST_CASE("corpus statistics on an empty corpus are all zero") {
    gloss::ParallelCorpus corpus;
    const gloss::CorpusStats st = gloss::corpus_stats(corpus);
    CHECK(st.sentence_count == 0);
    CHECK(st.source_token_count == 0);
    CHECK(st.target_token_count == 0);
    CHECK(st.ngram_type_counts.at(1) == 0);
    CHECK(st.ngram_type_counts.at(3) == 0);
}

TEST_CASE("format_pair_line round-trips through the loader") {
    const gloss::ParallelCorpus corpus = gloss::load_parallel_corpus(mini_path());
    std::string joined;
    for (const auto& p : corpus.pairs) joined += gloss::format_pair_line(p) + "\n";
    const auto path = write_temp("corpus_roundtrip.tsv", joined);
    const gloss::ParallelCorpus again = gloss::load_parallel_corpus(path);
    REQUIRE(again.pairs.size() == corpus.pairs.size());
    for (size_t k = 0; k < again.pairs.size(); ++k) {
        CHECK(again.pairs[k].source == corpus.pairs[k].source);
        CHECK(again.pairs[k].target == corpus.pairs[k].target);
    }
}
