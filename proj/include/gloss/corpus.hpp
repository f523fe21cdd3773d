#ifndef GLOSS_CORPUS_HPP
#define GLOSS_CORPUS_HPP

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gloss/errors.hpp"

namespace gloss {

using Token = std::string;
using Sentence = std::vector<Token>;

// Reserved surface for the empty source word. Source vocabularies hold it at id 0.
inline const std::string kNullSurface = "NULL";

enum class Side { Source, Target };

// Splits on whitespace, detaches leading/trailing ?!., as separate tokens,
// leaves internal punctuation alone ("PICK-up", "DON'T-MIND", "[body-shift-or]"
// stay single tokens). English (source) side is lowercased.
inline Sentence tokenize(const std::string& line, Side side) {
    static const std::string punct = "?!.,";
    Sentence out;
    std::istringstream iss(line);
    std::string chunk;
    while (iss >> chunk) {
        std::string lead, trail;
        while (!chunk.empty() && punct.find(chunk.front()) != std::string::npos) {
            lead.push_back(chunk.front());
            chunk.erase(chunk.begin());
        }
        while (!chunk.empty() && punct.find(chunk.back()) != std::string::npos) {
            trail.push_back(chunk.back());
            chunk.pop_back();
        }
        for (char c : lead) out.emplace_back(1, c);
        if (!chunk.empty()) {
            if (side == Side::Source)
                std::transform(chunk.begin(), chunk.end(), chunk.begin(),
                               [](unsigned char c) { return std::tolower(c); });
            out.push_back(chunk);
        }
        for (auto it = trail.rbegin(); it != trail.rend(); ++it) out.emplace_back(1, *it);
    }
    return out;
}

struct SentencePair {
    Sentence source;  // English, length l_f
    Sentence target;  // ASL gloss, length l_e
    std::size_t id = 0;

    std::size_t lf() const { return source.size(); }
    std::size_t le() const { return target.size(); }
};

// Surface <-> dense id, assigned in first-occurrence order.
// Source-side vocabularies reserve id 0 for the NULL token.
class Vocabulary {
public:
    explicit Vocabulary(bool with_null = false) {
        if (with_null) add(kNullSurface);
    }

    int add(const Token& s) {
        auto it = to_id_.find(s);
        if (it != to_id_.end()) return it->second;
        int id = static_cast<int>(surfaces_.size());
        to_id_.emplace(s, id);
        surfaces_.push_back(s);
        return id;
    }

    int id(const Token& s) const {
        auto it = to_id_.find(s);
        return it == to_id_.end() ? -1 : it->second;
    }

    const Token& surface(int id) const { return surfaces_.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return surfaces_.size(); }
    bool contains(const Token& s) const { return to_id_.count(s) != 0; }

private:
    std::map<Token, int> to_id_;
    std::vector<Token> surfaces_;
};

struct ParallelCorpus {
    std::vector<SentencePair> pairs;
    Vocabulary source_vocab{true};   // id 0 = NULL
    Vocabulary target_vocab{false};
};

// One pair per line: english<TAB>gloss. '#'-prefixed lines and blank lines skipped.
inline ParallelCorpus load_parallel_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open corpus file '" + path + "'");
    ParallelCorpus corpus;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw FormatError("missing tab separator", lineno);
        SentencePair pair;
        pair.source = tokenize(line.substr(0, tab), Side::Source);
        pair.target = tokenize(line.substr(tab + 1), Side::Target);
        if (pair.source.empty()) throw EmptySentence("empty source side", lineno);
        if (pair.target.empty()) throw EmptySentence("empty target side", lineno);
        pair.id = corpus.pairs.size();
        for (const auto& t : pair.source) corpus.source_vocab.add(t);
        for (const auto& t : pair.target) corpus.target_vocab.add(t);
        corpus.pairs.push_back(std::move(pair));
    }
    return corpus;
}

// Builds a corpus from in-memory (english, gloss) line pairs, applying the
// same tokenization as the file loader.
inline ParallelCorpus corpus_from_lines(
    const std::vector<std::pair<std::string, std::string>>& rows) {
    ParallelCorpus corpus;
    for (const auto& [src_line, tgt_line] : rows) {
        SentencePair pair;
        pair.source = tokenize(src_line, Side::Source);
        pair.target = tokenize(tgt_line, Side::Target);
        pair.id = corpus.pairs.size();
        for (const auto& t : pair.source) corpus.source_vocab.add(t);
        for (const auto& t : pair.target) corpus.target_vocab.add(t);
        corpus.pairs.push_back(std::move(pair));
    }
    return corpus;
}

// Round-trip partner of load_parallel_corpus for a single pair.
inline std::string format_pair_line(const SentencePair& pair) {
    std::string out;
    for (std::size_t i = 0; i < pair.source.size(); ++i) {
        if (i) out += ' ';
        out += pair.source[i];
    }
    out += '\t';
    for (std::size_t j = 0; j < pair.target.size(); ++j) {
        if (j) out += ' ';
        out += pair.target[j];
    }
    return out;
}

// Swaps source and target on every pair; vocabularies rebuilt accordingly.
// Used to train the reverse alignment direction.
inline ParallelCorpus reverse_corpus(const ParallelCorpus& corpus) {
    ParallelCorpus out;
    for (const auto& pair : corpus.pairs) {
        SentencePair rev;
        rev.source = pair.target;
        rev.target = pair.source;
        rev.id = pair.id;
        for (const auto& t : rev.source) out.source_vocab.add(t);
        for (const auto& t : rev.target) out.target_vocab.add(t);
        out.pairs.push_back(std::move(rev));
    }
    return out;
}

struct CorpusStats {
    std::size_t sentence_count = 0;
    std::size_t source_token_count = 0;
    std::size_t target_token_count = 0;
    std::size_t source_type_count = 0;  // distinct source tokens, NULL excluded
    std::size_t target_type_count = 0;
    // Distinct k-grams over the target side, k = 1..3. Each order k counts over
    // sentences padded with (k-1) start markers and 1 end marker, matching the
    // n-gram model's padding for a model of that order.
    std::map<int, std::size_t> ngram_type_counts;
};

inline CorpusStats corpus_stats(const ParallelCorpus& corpus) {
    CorpusStats st;
    st.sentence_count = corpus.pairs.size();
    std::map<int, std::set<std::vector<Token>>> types;
    for (const auto& pair : corpus.pairs) {
        st.source_token_count += pair.lf();
        st.target_token_count += pair.le();
        for (int k = 1; k <= 3; ++k) {
            std::vector<Token> padded(static_cast<std::size_t>(k - 1), "<s>");
            padded.insert(padded.end(), pair.target.begin(), pair.target.end());
            padded.push_back("</s>");
            for (std::size_t i = 0; i + k <= padded.size(); ++i)
                types[k].insert(std::vector<Token>(padded.begin() + i, padded.begin() + i + k));
        }
    }
    for (int k = 1; k <= 3; ++k) st.ngram_type_counts[k] = types[k].size();
    std::size_t src_size = corpus.source_vocab.size();
    if (corpus.source_vocab.contains(kNullSurface)) --src_size;
    st.source_type_count = src_size;
    st.target_type_count = corpus.target_vocab.size();
    return st;
}

}  // namespace gloss

#endif
