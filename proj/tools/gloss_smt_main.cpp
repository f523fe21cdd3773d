// Command-line driver: train / translate / align / lm / jw / stats.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gloss/corpus.hpp"
#include "gloss/decoder.hpp"
#include "gloss/errors.hpp"
#include "gloss/model_io.hpp"
#include "gloss/ngram_lm.hpp"
#include "gloss/pipeline.hpp"
#include "gloss/string_metrics.hpp"
#include "gloss/word_align.hpp"

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw gloss::FormatError("cannot open input file '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> read_stdin_lines() {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(std::cin, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

gloss::SymmetrizeMode parse_sym(const std::string& s) {
    if (s == "gdf") return gloss::SymmetrizeMode::GrowDiagFinal;
    if (s == "gdf-and") return gloss::SymmetrizeMode::GrowDiagFinalAnd;
    throw CLI::ValidationError("--sym", "expected 'gdf' or 'gdf-and'");
}

std::pair<gloss::Token, gloss::Token> parse_watch(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
        throw CLI::ValidationError("--watch", "expected <source>:<target>");
    return {s.substr(0, colon), s.substr(colon + 1)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"english-to-gloss statistical translation toolkit"};
    app.require_subcommand(1);

    // ---- train
    auto* train = app.add_subcommand("train", "train alignment, phrase and language models");
    gloss::PipelineConfig cfg;
    bool no_blend = false;
    bool alpha_given = false;
    std::string sym_name = "gdf-and";
    std::vector<std::string> watch_raw;
    train->add_option("--corpus", cfg.corpus_path, "parallel corpus (english<TAB>gloss)")
        ->required();
    train->add_option("--out", cfg.out_dir, "output directory for model files")->required();
    train->add_option("--iters-m1", cfg.m1_iterations, "word-model EM iterations");
    train->add_option("--iters-m2", cfg.m2_iterations, "position-model EM iterations");
    train->add_option("--iters-m3", cfg.m3_iterations, "fertility-model EM iterations");
    train->add_option("--alpha", cfg.alpha, "blend weight; giving it enables string-metric blending")
        ->check(CLI::Range(0.0, 1.0))
        ->each([&alpha_given](const std::string&) { alpha_given = true; });
    train->add_flag("--no-blend", no_blend, "force blending off");
    train->add_option("--max-phrase", cfg.max_phrase_len, "maximum phrase length")
        ->check(CLI::PositiveNumber);
    train->add_option("--lm-order", cfg.lm_order, "language model order")
        ->check(CLI::PositiveNumber);
    train->add_option("--lm-backoff", cfg.lm_backoff, "language model backoff factor");
    train->add_option("--watch", watch_raw,
                      "source:target pair whose t(target|source) trajectory is reported");
    train->add_option("--sym", sym_name, "symmetrization: gdf or gdf-and");

    // ---- translate
    auto* translate = app.add_subcommand("translate", "decode english lines to gloss");
    std::string tr_models, tr_input;
    std::vector<std::string> tr_text;
    bool tr_derivation = false, tr_score = false;
    gloss::DecoderConfig dec_cfg;
    translate->add_option("models", tr_models, "directory written by train")->required();
    translate->add_option("input", tr_input, "input file, one english sentence per line");
    translate->add_option("--text", tr_text, "inline input line (repeatable)");
    translate->add_flag("--derivation", tr_derivation, "print the derivation dump per line");
    translate->add_flag("--score", tr_score, "append the log score to each output line");
    translate->add_option("--beam", dec_cfg.beam_size, "beam size")->check(CLI::PositiveNumber);
    translate->add_option("--distortion-limit", dec_cfg.distortion_limit,
                          "max reordering jump; -1 = unlimited");
    translate->add_option("--max-phrase", dec_cfg.max_phrase_len, "maximum phrase length")
        ->check(CLI::PositiveNumber);
    translate->add_option("--eta", dec_cfg.distortion_base, "distortion base in (0,1)")
        ->check(CLI::Range(1e-9, 1.0));

    // ---- align
    auto* align = app.add_subcommand("align", "print alignments of a corpus under trained models");
    std::string al_models, al_corpus, al_sym = "gdf-and";
    bool al_matrix = false;
    align->add_option("models", al_models, "directory written by train")->required();
    align->add_option("corpus", al_corpus, "parallel corpus to align")->required();
    align->add_flag("--matrix", al_matrix, "also render a link matrix per pair");
    align->add_option("--sym", al_sym, "symmetrization: gdf or gdf-and");

    // ---- lm
    auto* lm_cmd = app.add_subcommand("lm", "score gloss lines with a trained language model");
    std::string lm_file, lm_input;
    std::vector<std::string> lm_text;
    lm_cmd->add_option("model", lm_file, "lm file written by train")->required();
    lm_cmd->add_option("input", lm_input, "input file, one gloss sentence per line");
    lm_cmd->add_option("--text", lm_text, "inline input line (repeatable)");

    // ---- jw
    auto* jw_cmd = app.add_subcommand("jw", "string similarity of two tokens (case-folded)");
    std::string jw_a, jw_b;
    jw_cmd->add_option("s1", jw_a, "first string")->required();
    jw_cmd->add_option("s2", jw_b, "second string")->required();

    // ---- stats
    auto* stats_cmd = app.add_subcommand("stats", "corpus token and n-gram type counts");
    std::string st_corpus;
    stats_cmd->add_option("corpus", st_corpus, "parallel corpus")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? gloss::kExitOk : gloss::kExitUsage;
    }

    try {
        if (train->parsed()) {
            cfg.blend = alpha_given && !no_blend;
            cfg.symmetrize_mode = parse_sym(sym_name);
            for (const auto& w : watch_raw) cfg.watch_pairs.push_back(parse_watch(w));
            const gloss::TrainResult result = gloss::train_pipeline(cfg);
            gloss::write_training_artifacts(result, cfg);
            std::cout << result.report;
            return gloss::kExitOk;
        }
        if (translate->parsed()) {
            const gloss::PhraseTable table =
                gloss::load_phrase_table(tr_models + "/phrases.txt");
            const gloss::NGramModel lm = gloss::load_ngram_model(tr_models + "/lm.txt");
            std::vector<std::string> lines = tr_text;
            if (!tr_input.empty()) {
                auto file_lines = read_lines(tr_input);
                lines.insert(lines.end(), file_lines.begin(), file_lines.end());
            } else if (tr_text.empty()) {
                lines = read_stdin_lines();
            }
            auto [out, failed] =
                gloss::translate_lines(table, lm, dec_cfg, lines, tr_score, tr_derivation);
            for (const auto& line : out) std::cout << line << "\n";
            return failed ? gloss::kExitDecode : gloss::kExitOk;
        }
        if (align->parsed()) {
            gloss::AlignmentModelFile fwd =
                gloss::load_alignment_model(al_models + "/align.fwd.txt");
            gloss::AlignmentModelFile rev =
                gloss::load_alignment_model(al_models + "/align.rev.txt");
            const gloss::ParallelCorpus corpus = gloss::load_parallel_corpus(al_corpus);
            std::cout << gloss::align_report(fwd, rev, corpus, parse_sym(al_sym), al_matrix);
            return gloss::kExitOk;
        }
        if (lm_cmd->parsed()) {
            const gloss::NGramModel lm = gloss::load_ngram_model(lm_file);
            std::vector<std::string> lines = lm_text;
            if (!lm_input.empty()) {
                auto file_lines = read_lines(lm_input);
                lines.insert(lines.end(), file_lines.begin(), file_lines.end());
            } else if (lm_text.empty()) {
                lines = read_stdin_lines();
            }
            char buf[96];
            for (const auto& line : lines) {
                const gloss::Sentence s = gloss::tokenize(line, gloss::Side::Target);
                if (s.empty()) {
                    std::cout << "\n";
                    continue;
                }
                const auto [ll, ppl] = gloss::sentence_logprob(lm, s);
                std::snprintf(buf, sizeof(buf), "logprob %.6f ppl %.6f", ll, ppl);
                std::cout << buf << "\n";
            }
            return gloss::kExitOk;
        }
        if (jw_cmd->parsed()) {
            const std::string a = gloss::fold_case(jw_a);
            const std::string b = gloss::fold_case(jw_b);
            char buf[96];
            std::snprintf(buf, sizeof(buf), "jaro %.6f\njaro_winkler %.6f", gloss::jaro(a, b),
                          gloss::jaro_winkler(a, b));
            std::cout << buf << "\n";
            return gloss::kExitOk;
        }
        if (stats_cmd->parsed()) {
            const gloss::ParallelCorpus corpus = gloss::load_parallel_corpus(st_corpus);
            const gloss::CorpusStats st = gloss::corpus_stats(corpus);
            std::cout << "pairs " << st.sentence_count << "\n";
            std::cout << "source tokens " << st.source_token_count << " types "
                      << st.source_type_count << "\n";
            std::cout << "target tokens " << st.target_token_count << " types "
                      << st.target_type_count << "\n";
            for (const auto& [k, v] : st.ngram_type_counts)
                std::cout << "ngram-types " << k << " " << v << "\n";
            return gloss::kExitOk;
        }
    } catch (const gloss::DecodeFailure& e) {
        std::cerr << "decode failure: " << e.what() << "\n";
        if (!e.best_partial().empty()) std::cerr << "[partial] " << e.best_partial() << "\n";
        return gloss::kExitDecode;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return gloss::kExitData;
    }
    return gloss::kExitUsage;
}
