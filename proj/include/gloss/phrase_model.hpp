#ifndef GLOSS_PHRASE_MODEL_HPP
#define GLOSS_PHRASE_MODEL_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gloss/corpus.hpp"
#include "gloss/word_align.hpp"

namespace gloss {

// Inclusive 1-based source/target span ranges of one extracted phrase pair.
struct PhrasePair {
    int src_begin = 0, src_end = 0;
    int tgt_begin = 0, tgt_end = 0;
    std::vector<Token> src_tokens;
    std::vector<Token> tgt_tokens;

    bool operator<(const PhrasePair& o) const {
        return std::tie(src_begin, src_end, tgt_begin, tgt_end) <
               std::tie(o.src_begin, o.src_end, o.tgt_begin, o.tgt_end);
    }
};

struct PhraseScores {
    double phi_src_given_tgt = 0.0;  // phi(fbar|ebar)
    double phi_tgt_given_src = 0.0;  // phi(ebar|fbar)
    long long count = 0;
};

struct PhraseTable {
    // (fbar, ebar) -> scores
    std::map<std::pair<std::vector<Token>, std::vector<Token>>, PhraseScores> entries;
    // fbar -> (ebar, scores), sorted descending by phi(ebar|fbar), ties by ebar
    std::map<std::vector<Token>, std::vector<std::pair<std::vector<Token>, PhraseScores>>>
        by_source;
};

// All span rectangles with both lengths <= max_len such that no alignment
// link crosses the rectangle boundary in either direction and the target
// span contains at least one linked word. Unaligned source words adjoining
// the minimal source span are folded in by boundary expansion.
inline std::set<PhrasePair> extract_phrases(const SentencePair& pair, const LinkSet& links,
                                            int max_len) {
    const int lf = static_cast<int>(pair.lf());
    const int le = static_cast<int>(pair.le());
    std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> spans;
    std::set<int> aligned_src;
    for (const auto& [i, j] : links) aligned_src.insert(i);
    for (int j1 = 1; j1 <= le; ++j1) {
        for (int j2 = j1; j2 <= std::min(le, j1 + max_len - 1); ++j2) {
            int i1 = 0, i2 = 0;
            bool any = false;
            for (const auto& [i, j] : links) {
                if (j1 <= j && j <= j2) {
                    if (!any || i < i1) i1 = any ? std::min(i1, i) : i;
                    if (!any || i > i2) i2 = any ? std::max(i2, i) : i;
                    any = true;
                }
            }
            if (!any) continue;
            bool crossing = false;
            for (const auto& [i, j] : links) {
                if (i1 <= i && i <= i2 && !(j1 <= j && j <= j2)) {
                    crossing = true;
                    break;
                }
            }
            if (crossing) continue;
            int s1 = i1;
            for (;;) {
                int s2 = i2;
                for (;;) {
                    if (s2 - s1 + 1 <= max_len) spans.insert({{s1, s2}, {j1, j2}});
                    ++s2;
                    if (s2 > lf || aligned_src.count(s2)) break;
                }
                --s1;
                if (s1 < 1 || aligned_src.count(s1)) break;
            }
        }
    }
    std::set<PhrasePair> out;
    for (const auto& [src, tgt] : spans) {
        PhrasePair pp;
        pp.src_begin = src.first;
        pp.src_end = src.second;
        pp.tgt_begin = tgt.first;
        pp.tgt_end = tgt.second;
        pp.src_tokens.assign(pair.source.begin() + (src.first - 1),
                             pair.source.begin() + src.second);
        pp.tgt_tokens.assign(pair.target.begin() + (tgt.first - 1),
                             pair.target.begin() + tgt.second);
        out.insert(std::move(pp));
    }
    return out;
}

// Relative-frequency estimates over all extracted phrase-pair instances:
// phi(fbar|ebar) = count(fbar, ebar) / count(ebar) and symmetrically.
inline PhraseTable build_phrase_table(const ParallelCorpus& corpus,
                                      const std::vector<LinkSet>& links_per_pair,
                                      int max_len) {
    std::map<std::pair<std::vector<Token>, std::vector<Token>>, long long> joint;
    std::map<std::vector<Token>, long long> src_marginal, tgt_marginal;
    for (std::size_t idx = 0; idx < corpus.pairs.size(); ++idx) {
        for (const auto& pp : extract_phrases(corpus.pairs[idx], links_per_pair[idx], max_len)) {
            ++joint[{pp.src_tokens, pp.tgt_tokens}];
            ++src_marginal[pp.src_tokens];
            ++tgt_marginal[pp.tgt_tokens];
        }
    }
    PhraseTable table;
    for (const auto& [key, c] : joint) {
        PhraseScores sc;
        sc.count = c;
        sc.phi_src_given_tgt = static_cast<double>(c) / tgt_marginal.at(key.second);
        sc.phi_tgt_given_src = static_cast<double>(c) / src_marginal.at(key.first);
        table.entries[key] = sc;
        table.by_source[key.first].push_back({key.second, sc});
    }
    for (auto& [src, options] : table.by_source) {
        std::sort(options.begin(), options.end(), [](const auto& a, const auto& b) {
            if (a.second.phi_tgt_given_src != b.second.phi_tgt_given_src)
                return a.second.phi_tgt_given_src > b.second.phi_tgt_given_src;
            return a.first < b.first;
        });
    }
    return table;
}

// All stored candidates for a source phrase, descending by phi(ebar|fbar);
// empty when the phrase is unseen.
inline const std::vector<std::pair<std::vector<Token>, PhraseScores>>& lookup(
    const std::vector<Token>& src_phrase, const PhraseTable& table) {
    static const std::vector<std::pair<std::vector<Token>, PhraseScores>> empty;
    auto it = table.by_source.find(src_phrase);
    return it == table.by_source.end() ? empty : it->second;
}

}  // namespace gloss

#endif
