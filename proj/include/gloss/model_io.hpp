#ifndef GLOSS_MODEL_IO_HPP
#define GLOSS_MODEL_IO_HPP

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gloss/errors.hpp"
#include "gloss/ngram_lm.hpp"
#include "gloss/phrase_model.hpp"
#include "gloss/word_align.hpp"

namespace gloss {

inline std::string format_double_17g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ------------------------------------------------------------ alignment model

// Versioned plain-text table format. Record kinds:
//   t <f-surface> <e-surface> <prob>     lexical probability t(e|f)
//   a <i> <j> <l_e> <l_f> <prob>         position prior a(i|j,l_e,l_f)
//   n <phi> <f-surface> <prob>           fertility n(phi|f)
//   d <j> <i> <l_e> <l_f> <prob>         reverse distortion d(j|i,l_e,l_f)
//   p0 <prob>                            empty-word survival probability
// The "NULL" surface is reserved for the empty source word.
struct AlignmentModelFile {
    std::string model_class;  // "model1", "model2", or "model3"
    int iterations = 0;
    std::optional<double> alpha;
    TranslationTable ttable;
    DistortionTable distortion;   // present for model2 and model3
    Model3Params fertility_model; // fully populated for model3 only
};

inline void save_alignment_model(const std::string& path, const AlignmentModelFile& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write model file '" + path + "'");
    out << "glossalign 1 class " << m.model_class << " iters " << m.iterations << " alpha "
        << (m.alpha ? format_double_17g(*m.alpha) : std::string("off")) << " nullcols "
        << (m.distortion.includes_null ? 1 : 0) << "\n";
    const TranslationTable& tt =
        m.model_class == "model3" ? m.fertility_model.ttable : m.ttable;
    for (const auto& [key, v] : tt.t)
        out << "t " << key.first << ' ' << key.second << ' ' << format_double_17g(v) << "\n";
    if (m.model_class == "model2" || m.model_class == "model3") {
        for (const auto& [shape, rows] : m.distortion.shapes) {
            const auto& [le, lf] = shape;
            for (std::size_t j0 = 0; j0 < rows.size(); ++j0)
                for (std::size_t c = 0; c < rows[j0].size(); ++c) {
                    const int i = m.distortion.includes_null ? static_cast<int>(c)
                                                             : static_cast<int>(c) + 1;
                    out << "a " << i << ' ' << j0 + 1 << ' ' << le << ' ' << lf << ' '
                        << format_double_17g(rows[j0][c]) << "\n";
                }
        }
    }
    if (m.model_class == "model3") {
        for (const auto& [f, row] : m.fertility_model.fertility)
            for (std::size_t phi = 0; phi < row.size(); ++phi)
                out << "n " << phi << ' ' << f << ' ' << format_double_17g(row[phi]) << "\n";
        for (const auto& [key, row] : m.fertility_model.rev_distortion) {
            const auto& [i, le, lf] = key;
            for (std::size_t j0 = 0; j0 < row.size(); ++j0)
                out << "d " << j0 + 1 << ' ' << i << ' ' << le << ' ' << lf << ' '
                    << format_double_17g(row[j0]) << "\n";
        }
        out << "p0 " << format_double_17g(m.fertility_model.null_p0) << "\n";
    }
}

inline AlignmentModelFile load_alignment_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open model file '" + path + "'");
    AlignmentModelFile m;
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw FormatError("empty model file '" + path + "'");
    ++lineno;
    {
        std::istringstream h(line);
        std::string magic, kw;
        int version = 0;
        std::string alpha_text;
        int nullcols = 0;
        h >> magic >> version;
        if (magic != "glossalign" || version != 1)
            throw FormatError("bad model header", lineno);
        while (h >> kw) {
            if (kw == "class") h >> m.model_class;
            else if (kw == "iters") h >> m.iterations;
            else if (kw == "alpha") h >> alpha_text;
            else if (kw == "nullcols") h >> nullcols;
            else throw FormatError("unknown header field '" + kw + "'", lineno);
        }
        if (alpha_text != "off" && !alpha_text.empty()) m.alpha = std::stod(alpha_text);
        m.distortion.includes_null = nullcols != 0;
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream rec(line);
        std::string kind;
        rec >> kind;
        if (kind == "t") {
            std::string f, e, pv;
            rec >> f >> e >> pv;
            if (pv.empty()) throw FormatError("bad t record", lineno);
            m.ttable.set(e, f, std::stod(pv));
        } else if (kind == "a") {
            int i, j, le, lf;
            std::string pv;
            rec >> i >> j >> le >> lf >> pv;
            if (pv.empty() || !rec) throw FormatError("bad a record", lineno);
            auto& rows = m.distortion.shape(le, lf);
            const int col = m.distortion.includes_null ? i : i - 1;
            rows[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(col)] =
                std::stod(pv);
        } else if (kind == "n") {
            int phi;
            std::string f, pv;
            rec >> phi >> f >> pv;
            if (pv.empty()) throw FormatError("bad n record", lineno);
            auto it = m.fertility_model.fertility.find(f);
            if (it == m.fertility_model.fertility.end()) {
                std::array<double, kMaxFertility + 1> row{};
                it = m.fertility_model.fertility.emplace(f, row).first;
            }
            it->second[static_cast<std::size_t>(phi)] = std::stod(pv);
        } else if (kind == "d") {
            int j, i, le, lf;
            std::string pv;
            rec >> j >> i >> le >> lf >> pv;
            if (pv.empty() || !rec) throw FormatError("bad d record", lineno);
            auto key = std::make_tuple(i, le, lf);
            auto it = m.fertility_model.rev_distortion.find(key);
            if (it == m.fertility_model.rev_distortion.end())
                it = m.fertility_model.rev_distortion
                         .emplace(key, std::vector<double>(static_cast<std::size_t>(le), 0.0))
                         .first;
            it->second[static_cast<std::size_t>(j - 1)] = std::stod(pv);
        } else if (kind == "p0") {
            std::string pv;
            rec >> pv;
            if (pv.empty()) throw FormatError("bad p0 record", lineno);
            m.fertility_model.null_p0 = std::stod(pv);
            m.fertility_model.null_p1 = 1.0 - m.fertility_model.null_p0;
        } else {
            throw FormatError("unknown record kind '" + kind + "'", lineno);
        }
    }
    if (m.model_class == "model3") m.fertility_model.ttable = m.ttable;
    return m;
}

// ------------------------------------------------------------ language model

// Header "ngram <n> <backoff>", then one "<count> <token...>" line per stored
// k-gram, sorted lexicographically by token sequence.
inline void save_ngram_model(const std::string& path, const NGramModel& lm) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write model file '" + path + "'");
    out << "ngram " << lm.order << ' ' << format_double_17g(lm.backoff_factor) << "\n";
    for (const auto& [gram, c] : lm.counts) {
        out << c;
        for (const auto& w : gram) out << ' ' << w;
        out << "\n";
    }
}

inline NGramModel load_ngram_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open model file '" + path + "'");
    NGramModel lm;
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw FormatError("empty model file '" + path + "'");
    ++lineno;
    {
        std::istringstream h(line);
        std::string magic;
        h >> magic >> lm.order >> lm.backoff_factor;
        if (magic != "ngram" || !h) throw FormatError("bad model header", lineno);
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream rec(line);
        long long c;
        rec >> c;
        if (!rec) throw FormatError("bad count record", lineno);
        std::vector<Token> gram;
        Token w;
        while (rec >> w) gram.push_back(w);
        if (gram.empty() || static_cast<int>(gram.size()) > lm.order)
            throw FormatError("bad n-gram record", lineno);
        lm.counts[gram] = c;
    }
    rebuild_best_conditional(lm);
    return lm;
}

// ------------------------------------------------------------ phrase table

// One entry per line: fbar ||| ebar ||| phi(fbar|ebar) phi(ebar|fbar) count.
inline void save_phrase_table(const std::string& path, const PhraseTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write phrase table '" + path + "'");
    for (const auto& [key, sc] : table.entries) {
        const auto& [src, tgt] = key;
        for (std::size_t i = 0; i < src.size(); ++i) out << (i ? " " : "") << src[i];
        out << " ||| ";
        for (std::size_t i = 0; i < tgt.size(); ++i) out << (i ? " " : "") << tgt[i];
        out << " ||| " << format_double_17g(sc.phi_src_given_tgt) << ' '
            << format_double_17g(sc.phi_tgt_given_src) << ' ' << sc.count << "\n";
    }
}

inline PhraseTable load_phrase_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open phrase table '" + path + "'");
    PhraseTable table;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string sep = " ||| ";
        const auto p1 = line.find(sep);
        const auto p2 = p1 == std::string::npos ? p1 : line.find(sep, p1 + sep.size());
        if (p1 == std::string::npos || p2 == std::string::npos)
            throw FormatError("bad phrase record", lineno);
        auto split = [](const std::string& s) {
            std::vector<Token> out;
            std::istringstream iss(s);
            Token w;
            while (iss >> w) out.push_back(w);
            return out;
        };
        const auto src = split(line.substr(0, p1));
        const auto tgt = split(line.substr(p1 + sep.size(), p2 - p1 - sep.size()));
        std::istringstream nums(line.substr(p2 + sep.size()));
        PhraseScores sc;
        nums >> sc.phi_src_given_tgt >> sc.phi_tgt_given_src >> sc.count;
        if (!nums || src.empty() || tgt.empty())
            throw FormatError("bad phrase record", lineno);
        table.entries[{src, tgt}] = sc;
        table.by_source[src].push_back({tgt, sc});
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

}  // namespace gloss

#endif
