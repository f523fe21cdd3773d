#ifndef GLOSS_NGRAM_LM_HPP
#define GLOSS_NGRAM_LM_HPP

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gloss/corpus.hpp"
#include "gloss/errors.hpp"

namespace gloss {

inline const std::string kLmStart = "<s>";
inline const std::string kLmEnd = "</s>";

// Last n-1 tokens of the target stream, start-padded.
using LmHistory = std::vector<Token>;

struct NGramModel {
    int order = 3;
    double backoff_factor = 0.4;
    double unk_logprob = std::log(1e-7);
    // All k-grams, k <= order, over sentences padded with (order-1) start
    // markers and one end marker.
    std::map<std::vector<Token>, long long> counts;
    long long unigram_total = 0;
    // Per word, the best (highest) conditional log-MLE over every stored
    // n-gram ending in that word; admissible context-free score estimate.
    std::map<Token, double> best_conditional;
};

inline LmHistory initial_history(const NGramModel& lm) {
    return LmHistory(static_cast<std::size_t>(lm.order - 1), kLmStart);
}

inline void push_history(LmHistory& hist, const Token& w, int order) {
    hist.push_back(w);
    if (static_cast<int>(hist.size()) > order - 1)
        hist.erase(hist.begin(), hist.end() - (order - 1));
}

inline void rebuild_best_conditional(NGramModel& lm) {
    lm.unigram_total = 0;
    for (const auto& [gram, c] : lm.counts)
        if (gram.size() == 1) lm.unigram_total += c;
    lm.best_conditional.clear();
    for (const auto& [gram, c] : lm.counts) {
        const Token& w = gram.back();
        long long denom;
        if (gram.size() > 1) {
            std::vector<Token> prefix(gram.begin(), gram.end() - 1);
            denom = lm.counts.at(prefix);
        } else {
            denom = lm.unigram_total;
        }
        const double v = std::log(static_cast<double>(c) / denom);
        auto it = lm.best_conditional.find(w);
        if (it == lm.best_conditional.end() || v > it->second) lm.best_conditional[w] = v;
    }
}

inline NGramModel train_ngram(const std::vector<Sentence>& sentences, int n,
                              double backoff_factor = 0.4) {
    NGramModel lm;
    lm.order = n;
    lm.backoff_factor = backoff_factor;
    for (const auto& s : sentences) {
        std::vector<Token> padded(static_cast<std::size_t>(n - 1), kLmStart);
        padded.insert(padded.end(), s.begin(), s.end());
        padded.push_back(kLmEnd);
        for (int k = 1; k <= n; ++k)
            for (std::size_t i = 0; i + k <= padded.size(); ++i)
                ++lm.counts[std::vector<Token>(padded.begin() + i, padded.begin() + i + k)];
    }
    rebuild_best_conditional(lm);
    return lm;
}

// Stupid-backoff score: highest-order counted n-gram wins at its MLE, each
// order dropped multiplies by the backoff factor, unseen unigram hits the
// fixed floor.
inline double ngram_logprob(const NGramModel& lm, const Token& w, const LmHistory& hist) {
    double factor = 1.0;
    for (int k = lm.order; k >= 1; --k) {
        std::vector<Token> gram;
        if (k > 1) {
            const std::size_t take = static_cast<std::size_t>(k - 1);
            if (hist.size() < take) {
                factor *= lm.backoff_factor;
                continue;
            }
            gram.assign(hist.end() - take, hist.end());
        }
        gram.push_back(w);
        auto it = lm.counts.find(gram);
        if (it != lm.counts.end() && it->second > 0) {
            long long denom;
            if (k > 1) {
                std::vector<Token> prefix(gram.begin(), gram.end() - 1);
                denom = lm.counts.at(prefix);
            } else {
                denom = lm.unigram_total;
            }
            return std::log(factor * it->second / denom);
        }
        factor *= lm.backoff_factor;
    }
    return lm.unk_logprob;
}

// Total log-probability of the sentence including the end transition, plus
// perplexity exp(-total / (length + 1)).
inline std::pair<double, double> sentence_logprob(const NGramModel& lm, const Sentence& s) {
    if (s.empty()) throw EmptySentence("cannot score an empty sentence");
    LmHistory hist = initial_history(lm);
    double ll = 0.0;
    for (const auto& w : s) {
        ll += ngram_logprob(lm, w, hist);
        push_history(hist, w, lm.order);
    }
    ll += ngram_logprob(lm, kLmEnd, hist);
    const double ppl = std::exp(-ll / static_cast<double>(s.size() + 1));
    return {ll, ppl};
}

// Context-free admissible estimate used by decoder future costs.
inline double word_estimate(const NGramModel& lm, const Token& w) {
    auto it = lm.best_conditional.find(w);
    return it == lm.best_conditional.end() ? lm.unk_logprob : it->second;
}

}  // namespace gloss

#endif
