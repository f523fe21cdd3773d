#ifndef GLOSS_DECODER_HPP
#define GLOSS_DECODER_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gloss/errors.hpp"
#include "gloss/ngram_lm.hpp"
#include "gloss/phrase_model.hpp"

namespace gloss {

struct DecoderConfig {
    int beam_size = 100;
    int distortion_limit = 6;       // -1 = unlimited
    double distortion_base = 0.6;   // eta in d(x) = eta^|x|
    double weight_phi = 1.0;        // log-linear feature weights; 1.0 each is
    double weight_distortion = 1.0; // the plain probability product
    double weight_lm = 1.0;
    int max_phrase_len = 4;
    bool passthrough = true;  // unknown tokens copied through as themselves
    double passthrough_logphi = std::log(1e-4);
};

// |start - end_prev - 1| * log(eta): zero for monotone adjacent phrases.
inline double distortion_cost(int start, int end_prev, double eta) {
    const int jump = std::abs(start - end_prev - 1);
    return jump == 0 ? 0.0 : jump * std::log(eta);
}

struct PhraseOption {
    std::vector<Token> target;
    double log_phi = 0.0;  // log phi(fbar|ebar)
};

// (span start, span end) inclusive 1-based -> candidate phrase options,
// ordered as stored in the table (descending phi(ebar|fbar)).
using SpanOptions = std::map<std::pair<int, int>, std::vector<PhraseOption>>;

inline SpanOptions span_options(const std::vector<Token>& src, const PhraseTable& table,
                                const DecoderConfig& cfg) {
    const int n = static_cast<int>(src.size());
    SpanOptions opts;
    for (int s = 1; s <= n; ++s) {
        for (int e = s; e <= std::min(n, s + cfg.max_phrase_len - 1); ++e) {
            std::vector<Token> phrase(src.begin() + (s - 1), src.begin() + e);
            for (const auto& [tgt, scores] : lookup(phrase, table))
                opts[{s, e}].push_back({tgt, std::log(scores.phi_src_given_tgt)});
        }
        auto it = opts.find({s, s});
        if (cfg.passthrough && (it == opts.end() || it->second.empty()))
            opts[{s, s}].push_back(
                {{src[static_cast<std::size_t>(s - 1)]}, cfg.passthrough_logphi});
    }
    return opts;
}

// Admissible per-span completion estimates: best weighted phrase score plus
// context-free LM word estimates, DP over split points. Spans with no
// covering segmentation stay at -infinity (infeasible).
inline std::map<std::pair<int, int>, double> future_cost_table(int n, const SpanOptions& opts,
                                                               const NGramModel& lm,
                                                               const DecoderConfig& cfg) {
    std::map<std::pair<int, int>, double> fc;
    for (int length = 1; length <= n; ++length) {
        for (int s = 1; s + length - 1 <= n; ++s) {
            const int e = s + length - 1;
            double best = -std::numeric_limits<double>::infinity();
            auto it = opts.find({s, e});
            if (it != opts.end()) {
                for (const auto& opt : it->second) {
                    double v = cfg.weight_phi * opt.log_phi;
                    for (const auto& w : opt.target) v += cfg.weight_lm * word_estimate(lm, w);
                    best = std::max(best, v);
                }
            }
            for (int split = s; split < e; ++split)
                best = std::max(best, fc.at({s, split}) + fc.at({split + 1, e}));
            fc[{s, e}] = best;
        }
    }
    return fc;
}

struct DerivationStep {
    int src_begin = 0, src_end = 0;  // inclusive, 1-based
    std::vector<Token> src_tokens;
    std::vector<Token> tgt_tokens;
    double log_phi = 0.0;  // unweighted components
    double log_d = 0.0;
    double log_lm = 0.0;
};

struct Hypothesis {
    double score = 0.0;        // weighted accumulated score
    std::uint64_t coverage = 0;
    int last_end = 0;
    LmHistory history;
    std::vector<Token> target;
    std::vector<DerivationStep> derivation;
    double future_cost = 0.0;  // filled at pruning time
};

struct DecodeResult {
    std::vector<Token> target;
    double score = 0.0;  // includes the end-of-sentence LM transition
    std::vector<DerivationStep> derivation;
    double eos_log_lm = 0.0;  // unweighted end transition component
};

namespace detail {

inline std::vector<std::pair<int, int>> coverage_runs(std::uint64_t cov, int n) {
    std::vector<std::pair<int, int>> runs;
    int start = 0;
    for (int p = 1; p <= n; ++p) {
        if (!((cov >> (p - 1)) & 1ull)) {
            if (start == 0) start = p;
        } else if (start != 0) {
            runs.push_back({start, p - 1});
            start = 0;
        }
    }
    if (start != 0) runs.push_back({start, n});
    return runs;
}

inline std::string join_tokens(const std::vector<Token>& toks) {
    std::string out;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i) out += ' ';
        out += toks[i];
    }
    return out;
}

}  // namespace detail

// Stack decoding over coverage-count stacks with beam pruning by
// score + future cost, recombination on (coverage, lm history, last end),
// ties broken toward the lexicographically smaller target.
inline DecodeResult decode(const std::vector<Token>& src, const PhraseTable& table,
                           const NGramModel& lm, const DecoderConfig& cfg = {}) {
    const int n = static_cast<int>(src.size());
    if (n == 0) return {};
    if (n > 64) throw FormatError("source sentence longer than 64 tokens");
    const double log_eta = std::log(cfg.distortion_base);
    const SpanOptions opts = span_options(src, table, cfg);
    const auto fc = future_cost_table(n, opts, lm, cfg);
    auto future_of = [&fc, n](std::uint64_t cov) {
        double v = 0.0;
        for (const auto& run : detail::coverage_runs(cov, n)) v += fc.at(run);
        return v;
    };

    using Key = std::tuple<std::uint64_t, LmHistory, int>;
    std::vector<std::map<Key, Hypothesis>> stacks(static_cast<std::size_t>(n) + 1);
    Hypothesis init;
    init.history = initial_history(lm);
    stacks[0][{0, init.history, 0}] = init;

    for (int k = 0; k < n; ++k) {
        std::vector<const Hypothesis*> hyps;
        hyps.reserve(stacks[static_cast<std::size_t>(k)].size());
        for (auto& [key, h] : stacks[static_cast<std::size_t>(k)]) {
            h.future_cost = future_of(h.coverage);
            hyps.push_back(&h);
        }
        std::sort(hyps.begin(), hyps.end(), [](const Hypothesis* a, const Hypothesis* b) {
            const double pa = a->score + a->future_cost;
            const double pb = b->score + b->future_cost;
            if (pa != pb) return pa > pb;
            return a->target < b->target;
        });
        if (static_cast<int>(hyps.size()) > cfg.beam_size) hyps.resize(cfg.beam_size);
        for (const Hypothesis* h : hyps) {
            for (const auto& [span, options] : opts) {
                const auto& [s, e] = span;
                bool overlaps = false;
                for (int p = s; p <= e; ++p)
                    if ((h->coverage >> (p - 1)) & 1ull) {
                        overlaps = true;
                        break;
                    }
                if (overlaps) continue;
                const int jump = std::abs(s - h->last_end - 1);
                if (cfg.distortion_limit >= 0 && jump > cfg.distortion_limit) continue;
                const double ld = jump == 0 ? 0.0 : jump * log_eta;
                for (const auto& opt : options) {
                    double llm = 0.0;
                    LmHistory hist = h->history;
                    for (const auto& w : opt.target) {
                        llm += ngram_logprob(lm, w, hist);
                        push_history(hist, w, lm.order);
                    }
                    Hypothesis cand;
                    cand.score = h->score + cfg.weight_phi * opt.log_phi +
                                 cfg.weight_distortion * ld + cfg.weight_lm * llm;
                    cand.coverage = h->coverage;
                    for (int p = s; p <= e; ++p) cand.coverage |= 1ull << (p - 1);
                    cand.last_end = e;
                    cand.history = hist;
                    cand.target = h->target;
                    cand.target.insert(cand.target.end(), opt.target.begin(), opt.target.end());
                    cand.derivation = h->derivation;
                    DerivationStep step;
                    step.src_begin = s;
                    step.src_end = e;
                    step.src_tokens.assign(src.begin() + (s - 1), src.begin() + e);
                    step.tgt_tokens = opt.target;
                    step.log_phi = opt.log_phi;
                    step.log_d = ld;
                    step.log_lm = llm;
                    cand.derivation.push_back(std::move(step));
                    const int covered = static_cast<int>(
                        std::popcount(static_cast<std::uint64_t>(cand.coverage)));
                    auto& stack = stacks[static_cast<std::size_t>(covered)];
                    const Key key{cand.coverage, cand.history, cand.last_end};
                    auto it = stack.find(key);
                    if (it == stack.end() || cand.score > it->second.score ||
                        (cand.score == it->second.score && cand.target < it->second.target))
                        stack[key] = std::move(cand);
                }
            }
        }
    }

    const Hypothesis* best = nullptr;
    double best_score = 0.0;
    double best_eos = 0.0;
    for (const auto& [key, h] : stacks[static_cast<std::size_t>(n)]) {
        const double eos = ngram_logprob(lm, kLmEnd, h.history);
        const double fs = h.score + cfg.weight_lm * eos;
        if (best == nullptr || fs > best_score ||
            (fs == best_score && h.target < best->target)) {
            best = &h;
            best_score = fs;
            best_eos = eos;
        }
    }
    if (best == nullptr) {
        const Hypothesis* partial = nullptr;
        int partial_cov = -1;
        for (int k = n; k >= 0; --k) {
            for (const auto& [key, h] : stacks[static_cast<std::size_t>(k)]) {
                if (partial == nullptr || h.score > partial->score) {
                    partial = &h;
                    partial_cov = k;
                }
            }
            if (partial) break;
        }
        throw DecodeFailure("no complete hypothesis (best covers " +
                                std::to_string(partial_cov) + "/" + std::to_string(n) +
                                " source tokens)",
                            partial ? detail::join_tokens(partial->target) : "");
    }
    DecodeResult result;
    result.target = best->target;
    result.score = best_score;
    result.derivation = best->derivation;
    result.eos_log_lm = best_eos;
    return result;
}

// Exact argmax by exhaustive search over segmentations, orders, and phrase
// choices; refuses sources longer than 7 tokens.
inline DecodeResult exhaustive_decode(const std::vector<Token>& src, const PhraseTable& table,
                                      const NGramModel& lm, const DecoderConfig& cfg = {}) {
    const int n = static_cast<int>(src.size());
    if (n > 7) throw RefuseOracle("exhaustive search refuses sources longer than 7 tokens");
    if (n == 0) return {};
    const double log_eta = std::log(cfg.distortion_base);
    const SpanOptions opts = span_options(src, table, cfg);

    bool found = false;
    DecodeResult best;
    std::vector<DerivationStep> steps;

    auto consider = [&](double fs, const std::vector<Token>& tgt, double eos) {
        if (!found || fs > best.score || (fs == best.score && tgt < best.target)) {
            found = true;
            best.score = fs;
            best.target = tgt;
            best.derivation = steps;
            best.eos_log_lm = eos;
        }
    };

    std::vector<Token> tgt;
    auto rec = [&](auto&& self, std::uint64_t cov, int last_end, const LmHistory& hist,
                   double score) -> void {
        if (cov == (n == 64 ? ~0ull : (1ull << n) - 1)) {
            const double eos = ngram_logprob(lm, kLmEnd, hist);
            consider(score + cfg.weight_lm * eos, tgt, eos);
            return;
        }
        for (const auto& [span, options] : opts) {
            const auto& [s, e] = span;
            bool overlaps = false;
            for (int p = s; p <= e; ++p)
                if ((cov >> (p - 1)) & 1ull) {
                    overlaps = true;
                    break;
                }
            if (overlaps) continue;
            const int jump = std::abs(s - last_end - 1);
            if (cfg.distortion_limit >= 0 && jump > cfg.distortion_limit) continue;
            const double ld = jump == 0 ? 0.0 : jump * log_eta;
            std::uint64_t ncov = cov;
            for (int p = s; p <= e; ++p) ncov |= 1ull << (p - 1);
            for (const auto& opt : options) {
                double llm = 0.0;
                LmHistory nhist = hist;
                for (const auto& w : opt.target) {
                    llm += ngram_logprob(lm, w, nhist);
                    push_history(nhist, w, lm.order);
                }
                DerivationStep step;
                step.src_begin = s;
                step.src_end = e;
                step.src_tokens.assign(src.begin() + (s - 1), src.begin() + e);
                step.tgt_tokens = opt.target;
                step.log_phi = opt.log_phi;
                step.log_d = ld;
                step.log_lm = llm;
                steps.push_back(std::move(step));
                const std::size_t tgt_size = tgt.size();
                tgt.insert(tgt.end(), opt.target.begin(), opt.target.end());
                self(self, ncov, e, nhist,
                     score + cfg.weight_phi * opt.log_phi + cfg.weight_distortion * ld +
                         cfg.weight_lm * llm);
                tgt.resize(tgt_size);
                steps.pop_back();
            }
        }
    };
    rec(rec, 0, 0, initial_history(lm), 0.0);
    if (!found)
        throw DecodeFailure("no complete hypothesis (exhaustive search)", "");
    return best;
}

// One line per derivation step: [s,e] fbar ||| ebar ||| logphi logd loglm.
inline std::string format_derivation(const std::vector<DerivationStep>& steps) {
    std::string out;
    char buf[128];
    for (const auto& st : steps) {
        out += "[" + std::to_string(st.src_begin) + "," + std::to_string(st.src_end) + "] ";
        out += detail::join_tokens(st.src_tokens);
        out += " ||| ";
        out += detail::join_tokens(st.tgt_tokens);
        std::snprintf(buf, sizeof(buf), " ||| %.6f %.6f %.6f", st.log_phi, st.log_d, st.log_lm);
        out += buf;
        out += '\n';
    }
    return out;
}

}  // namespace gloss

#endif
