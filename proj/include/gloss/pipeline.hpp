#ifndef GLOSS_PIPELINE_HPP
#define GLOSS_PIPELINE_HPP

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gloss/corpus.hpp"
#include "gloss/decoder.hpp"
#include "gloss/model_io.hpp"
#include "gloss/ngram_lm.hpp"
#include "gloss/phrase_model.hpp"
#include "gloss/word_align.hpp"

namespace gloss {

struct PipelineConfig {
    std::string corpus_path;
    std::string out_dir;
    int m1_iterations = 10;
    int m2_iterations = 10;
    int m3_iterations = 0;
    double alpha = 0.5;   // blend weight, active only when blend is true
    bool blend = false;
    JaroWinklerConfig jw;
    int max_phrase_len = 4;
    int lm_order = 3;
    double lm_backoff = 0.4;
    DecoderConfig decoder;
    SymmetrizeMode symmetrize_mode = SymmetrizeMode::GrowDiagFinalAnd;
    std::vector<std::pair<Token, Token>> watch_pairs;  // (source f, target e)

    std::optional<double> blend_alpha() const {
        return blend ? std::optional<double>(alpha) : std::nullopt;
    }
};

// Models and diagnostics for one training direction.
struct DirectionModels {
    TranslationTable ttable;
    DistortionTable distortion;
    Model3Params fertility_model;
    bool has_fertility_model = false;
    std::vector<AlignmentFunction> seeds;  // position-model Viterbi per pair
    std::vector<double> loglik_m1, loglik_m2, loglik_m3;
    // Watch trajectories keyed (f, e): value at init, then per iteration.
    std::map<std::pair<Token, Token>, std::vector<double>> watch_init;
    std::map<std::pair<Token, Token>, std::vector<double>> watch_m1;
    std::map<std::pair<Token, Token>, std::vector<double>> watch_m2;
};

inline DirectionModels train_direction(const ParallelCorpus& corpus, const PipelineConfig& cfg,
                                       bool record_watch) {
    DirectionModels dm;
    EmOptions opts;
    opts.blend_alpha = cfg.blend_alpha();
    opts.jw = cfg.jw;
    dm.ttable = uniform_translation_table(corpus);

    auto record = [&](std::map<std::pair<Token, Token>, std::vector<double>>& dst) {
        if (!record_watch) return;
        for (const auto& wp : cfg.watch_pairs)
            dst[wp].push_back(dm.ttable.prob(wp.second, wp.first));
    };
    record(dm.watch_init);
    for (int it = 0; it < cfg.m1_iterations; ++it) {
        auto [t2, ll] = model1_em_iteration(corpus, dm.ttable, opts);
        dm.ttable = std::move(t2);
        dm.loglik_m1.push_back(ll);
        record(dm.watch_m1);
    }
    for (int it = 0; it < cfg.m2_iterations; ++it) {
        auto [t2, d2, ll] = model2_em_iteration(corpus, dm.ttable, dm.distortion, opts);
        dm.ttable = std::move(t2);
        dm.distortion = std::move(d2);
        dm.loglik_m2.push_back(ll);
        record(dm.watch_m2);
    }
    for (const auto& pair : corpus.pairs)
        dm.seeds.push_back(viterbi_alignment(pair, dm.ttable, dm.distortion, opts).first);
    if (cfg.m3_iterations > 0) {
        dm.fertility_model = init_model3(corpus, dm.ttable);
        dm.has_fertility_model = true;
        for (int it = 0; it < cfg.m3_iterations; ++it)
            dm.loglik_m3.push_back(model3_em_iteration(corpus, dm.fertility_model, dm.seeds));
    }
    return dm;
}

// Best alignment per pair under the direction's strongest trained model.
inline std::vector<AlignmentFunction> final_alignments(const ParallelCorpus& corpus,
                                                       DirectionModels& dm,
                                                       const PipelineConfig& cfg) {
    std::vector<AlignmentFunction> out;
    if (dm.has_fertility_model) {
        for (std::size_t idx = 0; idx < corpus.pairs.size(); ++idx)
            out.push_back(
                model3_hillclimb(corpus.pairs[idx], dm.seeds[idx], dm.fertility_model).first);
        return out;
    }
    EmOptions opts;
    opts.blend_alpha = cfg.blend_alpha();
    opts.jw = cfg.jw;
    for (const auto& pair : corpus.pairs)
        out.push_back(viterbi_alignment(pair, dm.ttable, dm.distortion, opts).first);
    return out;
}

struct TrainResult {
    ParallelCorpus corpus;
    DirectionModels forward;
    DirectionModels reverse;
    std::vector<LinkSet> links;  // symmetrized, (source pos, target pos)
    PhraseTable phrases;
    NGramModel lm;
    std::string report;
};

inline std::string format_double_4f(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

inline std::string format_double_4g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

inline std::string format_double_6f(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

namespace detail {

inline void report_direction(std::string& out, const char* label, const DirectionModels& dm) {
    out += std::string("[") + label + "]\n";
    for (std::size_t i = 0; i < dm.loglik_m1.size(); ++i)
        out += "model1 iter " + std::to_string(i + 1) + " loglik " +
               format_double_6f(dm.loglik_m1[i]) + "\n";
    for (std::size_t i = 0; i < dm.loglik_m2.size(); ++i)
        out += "model2 iter " + std::to_string(i + 1) + " loglik " +
               format_double_6f(dm.loglik_m2[i]) + "\n";
    for (std::size_t i = 0; i < dm.loglik_m3.size(); ++i)
        out += "model3 iter " + std::to_string(i + 1) + " loglik " +
               format_double_6f(dm.loglik_m3[i]) + "\n";
    for (const auto& [wp, init_vals] : dm.watch_init) {
        std::string row = "watch t(" + wp.second + "|" + wp.first + "):";
        bool first = true;
        auto append = [&row, &first](double v) {
            row += (first ? " " : ", ") + format_double_4g(v);
            first = false;
        };
        for (double v : init_vals) append(v);
        auto m1 = dm.watch_m1.find(wp);
        if (m1 != dm.watch_m1.end())
            for (double v : m1->second) append(v);
        auto m2 = dm.watch_m2.find(wp);
        if (m2 != dm.watch_m2.end())
            for (double v : m2->second) append(v);
        out += row + "\n";
    }
}

}  // namespace detail

inline TrainResult train_pipeline(const PipelineConfig& cfg) {
    TrainResult r;
    r.corpus = load_parallel_corpus(cfg.corpus_path);
    const ParallelCorpus rev_corpus = reverse_corpus(r.corpus);
    r.forward = train_direction(r.corpus, cfg, true);
    r.reverse = train_direction(rev_corpus, cfg, false);

    auto fwd_align = final_alignments(r.corpus, r.forward, cfg);
    auto rev_align = final_alignments(rev_corpus, r.reverse, cfg);
    for (std::size_t idx = 0; idx < r.corpus.pairs.size(); ++idx)
        r.links.push_back(symmetrize(fwd_align[idx], rev_align[idx], cfg.symmetrize_mode));

    r.phrases = build_phrase_table(r.corpus, r.links, cfg.max_phrase_len);
    std::vector<Sentence> target_side;
    for (const auto& pair : r.corpus.pairs) target_side.push_back(pair.target);
    r.lm = train_ngram(target_side, cfg.lm_order, cfg.lm_backoff);

    std::string rep = "corpus " + cfg.corpus_path + " pairs " +
                      std::to_string(r.corpus.pairs.size()) + "\n";
    rep += "config m1 " + std::to_string(cfg.m1_iterations) + " m2 " +
           std::to_string(cfg.m2_iterations) + " m3 " + std::to_string(cfg.m3_iterations) +
           " alpha " + (cfg.blend ? format_double_4f(cfg.alpha) : std::string("off")) +
           " max-phrase " + std::to_string(cfg.max_phrase_len) + " lm-order " +
           std::to_string(cfg.lm_order) + " sym " +
           (cfg.symmetrize_mode == SymmetrizeMode::GrowDiagFinalAnd ? "gdf-and" : "gdf") + "\n";
    detail::report_direction(rep, "forward", r.forward);
    detail::report_direction(rep, "reverse", r.reverse);
    rep += "phrases " + std::to_string(r.phrases.entries.size()) + "\n";
    std::size_t lm_grams = r.lm.counts.size();
    rep += "lm-ngrams " + std::to_string(lm_grams) + "\n";
    r.report = rep;
    return r;
}

inline std::string model_class_of(const PipelineConfig& cfg) {
    if (cfg.m3_iterations > 0) return "model3";
    if (cfg.m2_iterations > 0) return "model2";
    return "model1";
}

// Writes align.fwd.txt, align.rev.txt, phrases.txt, lm.txt, report.txt.
inline void write_training_artifacts(const TrainResult& r, const PipelineConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const std::string cls = model_class_of(cfg);
    auto save_direction = [&](const DirectionModels& dm, const std::string& name) {
        AlignmentModelFile m;
        m.model_class = cls;
        m.iterations = cfg.m1_iterations + cfg.m2_iterations + cfg.m3_iterations;
        m.alpha = cfg.blend_alpha();
        m.ttable = dm.ttable;
        m.distortion = dm.distortion;
        if (dm.has_fertility_model) m.fertility_model = dm.fertility_model;
        save_alignment_model(cfg.out_dir + "/" + name, m);
    };
    save_direction(r.forward, "align.fwd.txt");
    save_direction(r.reverse, "align.rev.txt");
    save_phrase_table(cfg.out_dir + "/phrases.txt", r.phrases);
    save_ngram_model(cfg.out_dir + "/lm.txt", r.lm);
    std::ofstream rep(cfg.out_dir + "/report.txt", std::ios::binary);
    if (!rep) throw FormatError("cannot write report file");
    rep << r.report;
}

// Viterbi alignment of one pair under a persisted model.
inline std::pair<AlignmentFunction, double> model_viterbi(AlignmentModelFile& m,
                                                          const SentencePair& pair) {
    EmOptions opts;
    opts.blend_alpha = m.alpha;
    if (m.model_class == "model1") return viterbi_alignment(pair, m.ttable, opts);
    auto seed = viterbi_alignment(pair, m.ttable, m.distortion, opts);
    if (m.model_class == "model2") return seed;
    return viterbi_alignment(pair, m.fertility_model, seed.first);
}

// Alignment listing: per pair a two-line block (header with lengths and the
// forward model score, then the alignment line), optionally followed by the
// link matrix.
inline std::string align_report(AlignmentModelFile& fwd, AlignmentModelFile& rev,
                                const ParallelCorpus& corpus, SymmetrizeMode mode,
                                bool with_matrix) {
    std::string out;
    const ParallelCorpus rev_corpus = reverse_corpus(corpus);
    for (std::size_t idx = 0; idx < corpus.pairs.size(); ++idx) {
        const auto& pair = corpus.pairs[idx];
        auto [fa, fscore] = model_viterbi(fwd, pair);
        auto [ra, rscore] = model_viterbi(rev, rev_corpus.pairs[idx]);
        const LinkSet links = symmetrize(fa, ra, mode);
        out += format_giza_alignment(pair, links, fscore);
        if (with_matrix) out += render_alignment_matrix(pair, links);
    }
    return out;
}

// Decodes each input line; returns output lines plus a failure flag. Failed
// lines carry the partial-output warning marker.
inline std::pair<std::vector<std::string>, bool> translate_lines(
    const PhraseTable& table, const NGramModel& lm, const DecoderConfig& cfg,
    const std::vector<std::string>& lines, bool with_score, bool with_derivation) {
    std::vector<std::string> out;
    bool any_failed = false;
    for (const auto& line : lines) {
        const Sentence src = tokenize(line, Side::Source);
        if (src.empty()) {
            out.push_back("");
            continue;
        }
        try {
            const DecodeResult res = decode(src, table, lm, cfg);
            std::string text = detail::join_tokens(res.target);
            if (with_score) text += "\t" + format_double_6f(res.score);
            out.push_back(text);
            if (with_derivation) {
                std::string dump = format_derivation(res.derivation);
                while (!dump.empty() && dump.back() == '\n') dump.pop_back();
                if (!dump.empty()) out.push_back(dump);
            }
        } catch (const DecodeFailure& e) {
            any_failed = true;
            out.push_back("[partial] " + e.best_partial());
        }
    }
    return {out, any_failed};
}

}  // namespace gloss

#endif
