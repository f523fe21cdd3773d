// EM training for the lexical and position alignment models.
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "catch2/catch_amalgamated.hpp"
#include "gloss/corpus.hpp"
#include "gloss/errors.hpp"
#include "gloss/word_align.hpp"

namespace {

using Catch::Approx;

gloss::ParallelCorpus tiny_corpus() {
    return gloss::corpus_from_lines(
        {{"i understand", "I UNDERSTAND"}, {"i play piano", "I PLAY PIANO"}});
}

std::string mini_path() { return std::string(GLOSS_SOURCE_DIR) + "/data/mini.tsv"; }

// Row sums of the lexical table grouped by source word.
std::map<gloss::Token, double> row_sums(const gloss::TranslationTable& tt) {
    std::map<gloss::Token, double> sums;
    for (const auto& [key, v] : tt.t) sums[key.first] += v;
    return sums;
}

gloss::TranslationTable train_m1(const gloss::ParallelCorpus& corpus, int iters,
                                 gloss::EmOptions opts = {}) {
    gloss::TranslationTable tt = gloss::uniform_translation_table(corpus, opts.include_null);
    for (int k = 0; k < iters; ++k) tt = gloss::model1_em_iteration(corpus, tt, opts).first;
    return tt;
}

// Oracle: posterior over links by enumerating every alignment function.
// The per-link weight matches the E-step's (blended when enabled), and the
// constant epsilon / L^le factor cancels in the ratio.
std::vector<std::vector<double>> enumerated_posteriors(const gloss::SentencePair& pair,
                                                       const gloss::TranslationTable& tt,
                                                       const gloss::EmOptions& opts) {
    const auto sources = gloss::effective_sources(pair, opts.include_null);
    const std::size_t L = sources.size();
    const std::size_t le = pair.target.size();
    std::vector<std::size_t> a(le, 0);
    std::vector<std::vector<double>> num(le, std::vector<double>(L, 0.0));
    double z = 0.0;
    while (true) {
        double p = 1.0;
        for (std::size_t j = 0; j < le; ++j)
            p *= gloss::blended_link_weight(pair.target[j], sources[a[j]], tt, opts);
        z += p;
        for (std::size_t j = 0; j < le; ++j) num[j][a[j]] += p;
        std::size_t j = 0;
        while (j < le && ++a[j] == L) a[j++] = 0;
        if (j == le) break;
    }
    for (auto& row : num)
        for (double& v : row) v /= z;
    return num;
}

}  // namespace

TEST_CASE("uniform initialization spreads mass over the target vocabulary") {
    const auto corpus = tiny_corpus();
    const auto tt = gloss::uniform_translation_table(corpus);
    CHECK(tt.prob("I", "i") == 0.25);
    CHECK(tt.prob("UNDERSTAND", "understand") == 0.25);
    CHECK(tt.prob("PIANO", "play") == 0.25);
    // no co-occurrence, no entry
    CHECK(tt.prob("UNDERSTAND", "play") == 0.0);
    CHECK_FALSE(tt.has_source("NULL"));
    const auto with_null = gloss::uniform_translation_table(corpus, true);
    CHECK(with_null.prob("I", gloss::kNullSurface) == 0.25);
    CHECK(with_null.has_source("NULL"));
}

TEST_CASE("sentence probability under uniform weights") {
    const auto corpus = tiny_corpus();
    const auto tt = gloss::uniform_translation_table(corpus);
    CHECK(gloss::model1_sentence_prob(corpus.pairs[0], tt) == Approx(0.0625).margin(1e-12));
    // including the empty word leaves this particular value unchanged:
    // the per-word sum grows by u while the length normalizer grows too
    const auto tt_null = gloss::uniform_translation_table(corpus, true);
    gloss::EmOptions opts;
    opts.include_null = true;
    CHECK(gloss::model1_sentence_prob(corpus.pairs[0], tt_null, opts) ==
          Approx(0.0625).margin(1e-12));
}

TEST_CASE("blended link weight mixes the table with string similarity") {
    const auto corpus = tiny_corpus();
    const auto tt = gloss::uniform_translation_table(corpus);
    gloss::EmOptions opts;
    opts.blend_alpha = 0.5;
    CHECK(gloss::blended_link_weight("I", "i", tt, opts) == Approx(0.625).margin(1e-12));
    // zero similarity keeps half the table mass
    CHECK(gloss::blended_link_weight("UNDERSTAND", "i", tt, opts) ==
          Approx(0.125).margin(1e-12));
    opts.blend_alpha = 1.0;
    CHECK(gloss::blended_link_weight("I", "i", tt, opts) == Approx(0.25).margin(1e-12));
    // the empty word has no surface form to compare against
    opts.blend_alpha = 0.5;
    CHECK(gloss::blended_link_weight("I", gloss::kNullSurface, tt, opts) ==
          Approx(0.5 * tt.prob("I", gloss::kNullSurface)).margin(1e-12));
}

TEST_CASE("first iterations of lexical EM on the two-pair corpus") {
    const auto corpus = tiny_corpus();
    gloss::TranslationTable tt = gloss::uniform_translation_table(corpus);

    auto [t1, ll1] = gloss::model1_em_iteration(corpus, tt);
    CHECK(ll1 == Approx(-6.931472).margin(1e-5));
    CHECK(t1.prob("I", "i") == Approx(0.416667).margin(1e-6));
    CHECK(t1.prob("I", "understand") == Approx(0.5).margin(1e-6));
    CHECK(t1.prob("PIANO", "i") == Approx(0.166667).margin(1e-6));
    CHECK(t1.prob("UNDERSTAND", "i") == Approx(0.25).margin(1e-6));
    CHECK(t1.prob("PIANO", "play") == Approx(0.333333).margin(1e-6));

    auto [t2, ll2] = gloss::model1_em_iteration(corpus, t1);
    CHECK(t2.prob("I", "i") == Approx(0.533650).margin(1e-6));
    CHECK(t2.prob("PIANO", "piano") == Approx(0.361111).margin(1e-6));
    CHECK(t2.prob("UNDERSTAND", "understand") == Approx(0.55).margin(1e-6));
    CHECK(t2.prob("I", "understand") == Approx(0.45).margin(1e-6));
    CHECK(t2.prob("PLAY", "i") == Approx(0.127186).margin(1e-6));

    auto [t3, ll3] = gloss::model1_em_iteration(corpus, t2);
    CHECK(t3.prob("I", "i") == Approx(0.641231).margin(1e-6));
    CHECK(t3.prob("PIANO", "play") == Approx(0.384633).margin(1e-6));
    CHECK(t3.prob("UNDERSTAND", "understand") == Approx(0.612070).margin(1e-6));
    CHECK(t3.prob("I", "piano") == Approx(0.230733).margin(1e-6));
    CHECK(t3.prob("PLAY", "i") == Approx(0.092996).margin(1e-6));
    CHECK(ll3 > ll2);
    CHECK(ll2 > ll1);
}

TEST_CASE("long-run lexical EM separates sure pairs and splits ambiguous ones") {
    const auto corpus = tiny_corpus();
    gloss::TranslationTable tt = train_m1(corpus, 50);
    CHECK(tt.prob("I", "i") == Approx(1.0).margin(1e-4));
    CHECK(tt.prob("UNDERSTAND", "understand") == Approx(0.988704).margin(1e-6));
    CHECK(tt.prob("PLAY", "play") == Approx(0.496291).margin(1e-6));
    CHECK(tt.prob("PLAY", "piano") == Approx(0.496291).margin(1e-6));
    CHECK(tt.prob("PIANO", "play") == Approx(0.496291).margin(1e-6));
    CHECK(tt.prob("PIANO", "piano") == Approx(0.496291).margin(1e-6));
    CHECK(tt.prob("PIANO", "i") < 1e-6);
}

TEST_CASE("lexical rows stay normalized after every M-step") {
    const auto corpus = gloss::load_parallel_corpus(mini_path());
    gloss::TranslationTable tt = gloss::uniform_translation_table(corpus);
    for (int k = 0; k < 20; ++k) {
        tt = gloss::model1_em_iteration(corpus, tt).first;
        for (const auto& [f, s] : row_sums(tt)) {
            CAPTURE(k, f);
            REQUIRE(s == Approx(1.0).margin(1e-9));
        }
    }
}

TEST_CASE("lexical EM log-likelihood is monotone non-decreasing") {
    for (const auto& corpus : {tiny_corpus(), gloss::load_parallel_corpus(mini_path())}) {
        gloss::TranslationTable tt = gloss::uniform_translation_table(corpus);
        double prev = -HUGE_VAL;
        for (int k = 0; k < 50; ++k) {
            auto [next, ll] = gloss::model1_em_iteration(corpus, tt);
            CAPTURE(k);
            REQUIRE(ll >= prev - 1e-9);
            prev = ll;
            tt = std::move(next);
        }
    }
}

TEST_CASE("link posteriors match brute-force alignment enumeration") {
    const auto corpus = tiny_corpus();
    for (gloss::EmOptions opts :
         {gloss::EmOptions{}, gloss::EmOptions{1, 0.5, {}, false},
          gloss::EmOptions{1, std::nullopt, {}, true}}) {
        gloss::TranslationTable tt = gloss::uniform_translation_table(corpus, opts.include_null);
        for (int it = 0; it < 3; ++it) {
            for (const auto& pair : corpus.pairs) {
                const auto fast = gloss::model1_link_posteriors(pair, tt, opts);
                const auto slow = enumerated_posteriors(pair, tt, opts);
                REQUIRE(fast.size() == slow.size());
                for (std::size_t j = 0; j < fast.size(); ++j) {
                    REQUIRE(fast[j].size() == slow[j].size());
                    for (std::size_t i = 0; i < fast[j].size(); ++i) {
                        CAPTURE(it, pair.id, j, i);
                        REQUIRE(fast[j][i] == Approx(slow[j][i]).margin(1e-9));
                    }
                }
            }
            tt = gloss::model1_em_iteration(corpus, tt, opts).first;
        }
    }
}

TEST_CASE("a target word with no usable source weight raises DegenerateRow") {
    const auto corpus = gloss::corpus_from_lines({{"a", "X"}});
    gloss::TranslationTable tt;
    tt.set("X", "a", 0.0);
    try {
        gloss::model1_link_posteriors(corpus.pairs[0], tt);
        FAIL("expected DegenerateRow");
    } catch (const gloss::DegenerateRow& e) {
        CHECK(e.word() == "X");
    }
}

TEST_CASE("blended EM after three iterations") {
    const auto corpus = tiny_corpus();
    gloss::EmOptions opts;
    opts.blend_alpha = 0.5;
    const gloss::TranslationTable tt = train_m1(corpus, 3, opts);
    CHECK(tt.prob("I", "i") == Approx(0.844747).margin(1e-6));
    CHECK(tt.prob("UNDERSTAND", "understand") == Approx(0.956318).margin(1e-6));
    CHECK(tt.prob("PLAY", "play") == Approx(0.657979).margin(1e-6));
    CHECK(tt.prob("PIANO", "piano") == Approx(0.361868).margin(1e-6));
    CHECK(tt.prob("PLAY", "piano") == Approx(0.325537).margin(1e-6));
    CHECK(tt.prob("I", "piano") == Approx(0.312595).margin(1e-6));
    CHECK(tt.prob("I", "play") == Approx(0.014893).margin(1e-6));
    CHECK(tt.prob("PIANO", "i") == Approx(0.146219).margin(1e-6));
    CHECK(tt.prob("PLAY", "i") == Approx(0.002262).margin(1e-6));
    // similarity pulls same-looking pairs apart from their competitors
    CHECK(tt.prob("PLAY", "play") - tt.prob("PLAY", "piano") >= 0.3);
    CHECK(tt.prob("I", "piano") > tt.prob("I", "play"));
    CHECK(tt.prob("PIANO", "i") > tt.prob("PLAY", "i"));
}

TEST_CASE("position model refines the lexical handoff") {
    const auto corpus = tiny_corpus();
    gloss::TranslationTable tt = train_m1(corpus, 3);
    gloss::DistortionTable dt;

    // with fresh uniform position priors the two likelihoods coincide
    CHECK(gloss::model2_log_likelihood(corpus, tt, dt) ==
          Approx(gloss::corpus_log_likelihood(corpus, tt)).margin(1e-9));

    auto [t1, d1, ll1] = gloss::model2_em_iteration(corpus, tt, dt);
    CHECK(t1.prob("I", "i") == Approx(0.734309).margin(1e-6));

    auto [t2, d2, ll2] = gloss::model2_em_iteration(corpus, t1, d1);
    CHECK(t2.prob("I", "i") == Approx(0.964006).margin(1e-6));
    CHECK(t2.prob("UNDERSTAND", "understand") == Approx(0.853946).margin(1e-6));
    CHECK(t2.prob("PIANO", "play") == Approx(0.471782).margin(1e-6));

    auto [t3, d3, ll3] = gloss::model2_em_iteration(corpus, t2, d2);
    CHECK(t3.prob("I", "i") == Approx(0.999918).margin(1e-6));
    CHECK(t3.prob("UNDERSTAND", "understand") == Approx(0.990016).margin(1e-6));
    CHECK(t3.prob("PIANO", "piano") == Approx(0.499558).margin(1e-6));
    CHECK(ll3 > ll2);
    CHECK(ll2 > ll1);

    // position rows remain distributions and the diagonal is reinforced
    for (const auto& [shape, rows] : d3.shapes) {
        for (const auto& row : rows) {
            double s = 0.0;
            for (double v : row) s += v;
            CHECK(s == Approx(1.0).margin(1e-9));
        }
    }
    CHECK(d3.prob(1, 1, 2, 2) > 0.5);
    CHECK(d3.prob(2, 2, 3, 3) > 1.0 / 3.0);
}

TEST_CASE("fresh position priors are uniform on demand") {
    gloss::DistortionTable dt;
    CHECK(dt.prob(1, 1, 2, 2) == 0.5);
    CHECK(dt.prob(2, 1, 2, 2) == 0.5);
    CHECK(dt.columns(4) == 4);
    gloss::DistortionTable with_null;
    with_null.includes_null = true;
    CHECK(with_null.columns(4) == 5);
    CHECK(with_null.prob(0, 1, 2, 2) == Approx(1.0 / 3.0).margin(1e-12));
}

TEST_CASE("viterbi alignment prefers the diagonal among exact ties") {
    const auto corpus = tiny_corpus();
    const gloss::TranslationTable trained = train_m1(corpus, 3);
    auto [a, score] = gloss::viterbi_alignment(corpus.pairs[1], trained);
    CHECK(a == gloss::AlignmentFunction{1, 2, 3});
    CHECK(score == Approx(trained.prob("I", "i") * trained.prob("PLAY", "play") *
                          trained.prob("PIANO", "piano") / 27.0)
                       .margin(1e-12));

    // fully uniform weights tie everywhere; the diagonal wins
    const gloss::TranslationTable uniform = gloss::uniform_translation_table(corpus);
    CHECK(gloss::viterbi_alignment(corpus.pairs[1], uniform).first ==
          gloss::AlignmentFunction{1, 2, 3});
    // off the square part, ties fall back to the smallest source position
    const auto wide = gloss::corpus_from_lines({{"a", "X Y"}});
    const auto u2 = gloss::uniform_translation_table(wide);
    CHECK(gloss::viterbi_alignment(wide.pairs[0], u2).first ==
          gloss::AlignmentFunction{1, 1});
}

TEST_CASE("position-aware viterbi follows the position priors") {
    const auto corpus = gloss::corpus_from_lines({{"a b", "X Y"}});
    const auto tt = gloss::uniform_translation_table(corpus);
    gloss::DistortionTable dt;
    auto& m = dt.shape(2, 2);
    m[0] = {0.1, 0.9};
    m[1] = {0.9, 0.1};
    auto [a, score] = gloss::viterbi_alignment(corpus.pairs[0], tt, dt);
    CHECK(a == gloss::AlignmentFunction{2, 1});
    // uniform t is 0.5 on the two-word gloss vocabulary
    CHECK(score == Approx(0.5 * 0.9 * 0.5 * 0.9).margin(1e-12));
}

TEST_CASE("corpus log-likelihood reports pairs with zero probability") {
    const auto corpus = tiny_corpus();
    const auto tt = gloss::uniform_translation_table(corpus);
    CHECK(gloss::corpus_log_likelihood(corpus, tt) == Approx(-6.931472).margin(1e-5));

    const auto other = gloss::corpus_from_lines({{"i understand", "I UNDERSTAND"},
                                                 {"totally new", "NEW WORDS"}});
    std::vector<std::size_t> zero_pairs;
    const double ll = gloss::corpus_log_likelihood(other, tt, {}, &zero_pairs);
    REQUIRE(zero_pairs.size() == 1);
    CHECK(zero_pairs[0] == 1);
    CHECK(std::isinf(ll));
}

TEST_CASE("symmetrization grows the intersection toward the union") {
    using gloss::LinkSet;
    const LinkSet fwd{{1, 1}, {2, 2}};
    const LinkSet rev{{1, 1}, {3, 2}};
    const LinkSet grown = gloss::grow_diag_final(fwd, rev, 3, 2);
    CHECK(grown == LinkSet{{1, 1}, {2, 2}, {3, 2}});
    CHECK(gloss::grow_diag_final(fwd, rev, 3, 2, gloss::SymmetrizeMode::GrowDiagFinalAnd) ==
          grown);
}

TEST_CASE("final pass link adoption differs between the two modes") {
    using gloss::LinkSet;
    // (3,1) shares its target word with (1,1) and is not adjacent to it
    const LinkSet fwd{{1, 1}, {3, 1}};
    const LinkSet rev{{1, 1}};
    CHECK(gloss::grow_diag_final(fwd, rev, 3, 1) == LinkSet{{1, 1}, {3, 1}});
    CHECK(gloss::grow_diag_final(fwd, rev, 3, 1, gloss::SymmetrizeMode::GrowDiagFinalAnd) ==
          LinkSet{{1, 1}});
}

TEST_CASE("symmetrize builds link sets from the two directed alignments") {
    using gloss::LinkSet;
    const gloss::AlignmentFunction fwd{1, 2};  // target j -> source i
    const gloss::AlignmentFunction rev{1, 2};  // source i -> target j
    CHECK(gloss::symmetrize(fwd, rev) == LinkSet{{1, 1}, {2, 2}});
    // empty-word links are dropped
    CHECK(gloss::links_from_alignment({0, 2}) == LinkSet{{2, 2}});
    CHECK(gloss::grow_diag_final({}, {}, 2, 2).empty());
}

TEST_CASE("alignment line format") {
    const auto corpus = gloss::corpus_from_lines({{"are you deaf ?", "DEAF YOU ?"}});
    const gloss::LinkSet links{{2, 2}, {3, 1}, {4, 3}};
    CHECK(gloss::format_alignment_line(corpus.pairs[0], links) ==
          "DEAF YOU ? NULL ({ }) are ({ }) you ({ 2 }) deaf ({ 1 }) ? ({ 3 })");
}

TEST_CASE("alignment line lists multiple linked positions in ascending order") {
    const auto corpus = gloss::corpus_from_lines({{"t", "A B C D E F G H I J"}});
    const gloss::LinkSet links{{1, 2}, {1, 5}, {1, 10}};
    const std::string line = gloss::format_alignment_line(corpus.pairs[0], links);
    CHECK(line.find("t ({ 2 5 10 })") != std::string::npos);
    CHECK(line.find("NULL ({ 1 3 4 6 7 8 9 })") != std::string::npos);
}

TEST_CASE("two-line alignment block carries pair number, lengths and score") {
    const auto corpus = gloss::corpus_from_lines({{"are you deaf ?", "DEAF YOU ?"}});
    const gloss::LinkSet links{{2, 2}, {3, 1}, {4, 3}};
    const std::string block = gloss::format_giza_alignment(corpus.pairs[0], links, 0.0016781);
    CHECK(block ==
          "# Sentence pair (1) Source : 4 Target : 3 Score : 0.0016781\n"
          "DEAF YOU ? NULL ({ }) are ({ }) you ({ 2 }) deaf ({ 1 }) ? ({ 3 })\n");
}

TEST_CASE("matrix rendering marks links against padded grid") {
    const auto corpus = gloss::corpus_from_lines({{"a b", "X Y"}});
    const gloss::LinkSet links{{1, 1}, {2, 2}};
    CHECK(gloss::render_alignment_matrix(corpus.pairs[0], links) ==
          "  X Y\n"
          "a * .\n"
          "b . *\n");
    const auto deaf = gloss::corpus_from_lines({{"are you deaf ?", "DEAF YOU ?"}});
    const std::string grid =
        gloss::render_alignment_matrix(deaf.pairs[0], {{2, 2}, {3, 1}, {4, 3}});
    CHECK(grid.find(" DEAF YOU ?") != std::string::npos);
    CHECK(grid.find("deaf *") != std::string::npos);
}
