#ifndef GLOSS_WORD_ALIGN_HPP
#define GLOSS_WORD_ALIGN_HPP

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gloss/corpus.hpp"
#include "gloss/errors.hpp"
#include "gloss/string_metrics.hpp"

namespace gloss {

// ---------------------------------------------------------------- types

// Lexical translation probabilities t(e|f). Keys are (source f, target e)
// so each conditional row t(.|f) is a contiguous key range.
struct TranslationTable {
    std::map<std::pair<Token, Token>, double> t;
    double epsilon = 1.0;

    double prob(const Token& e, const Token& f) const {
        auto it = t.find({f, e});
        return it == t.end() ? 0.0 : it->second;
    }
    void set(const Token& e, const Token& f, double v) { t[{f, e}] = v; }
    bool has_source(const Token& f) const {
        auto it = t.lower_bound({f, Token()});
        return it != t.end() && it->first.first == f;
    }
};

// One source position per target position j (1-based); 0 marks the empty word.
using AlignmentFunction = std::vector<int>;

// Position priors a(i | j, l_e, l_f), stored per sentence-shape as a matrix
// with rows j = 1..l_e. Column c maps to source position c+1, or to the empty
// word at c = 0 when includes_null is set.
struct DistortionTable {
    std::map<std::pair<int, int>, std::vector<std::vector<double>>> shapes;
    bool includes_null = false;

    int columns(int lf) const { return lf + (includes_null ? 1 : 0); }

    // Get-or-create a uniform matrix for shape (l_e, l_f).
    std::vector<std::vector<double>>& shape(int le, int lf) {
        auto it = shapes.find({le, lf});
        if (it == shapes.end()) {
            int cols = columns(lf);
            std::vector<std::vector<double>> m(
                static_cast<std::size_t>(le),
                std::vector<double>(static_cast<std::size_t>(cols), 1.0 / cols));
            it = shapes.emplace(std::make_pair(le, lf), std::move(m)).first;
        }
        return it->second;
    }

    // Read-only probability; unseen shapes behave as uniform.
    double prob(int i, int j, int le, int lf) const {
        int col = includes_null ? i : i - 1;
        auto it = shapes.find({le, lf});
        if (it == shapes.end()) return 1.0 / columns(lf);
        return it->second[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(col)];
    }
};

constexpr int kMaxFertility = 5;

// Fertility-based alignment model parameters.
struct Model3Params {
    TranslationTable ttable;  // includes rows conditioned on the empty word
    std::map<Token, std::array<double, kMaxFertility + 1>> fertility;  // n(phi|f)
    double null_p0 = 0.9;
    double null_p1 = 0.1;
    // Reverse distortion d(j | i, l_e, l_f): row over j = 1..l_e per key.
    std::map<std::tuple<int, int, int>, std::vector<double>> rev_distortion;

    double distortion_prob(int j, int i, int le, int lf) const {
        auto it = rev_distortion.find({i, le, lf});
        if (it == rev_distortion.end()) return 1.0 / le;
        return it->second[static_cast<std::size_t>(j - 1)];
    }
};

struct EmOptions {
    int iterations = 1;
    std::optional<double> blend_alpha;  // empty = blending off
    JaroWinklerConfig jw;
    bool include_null = false;  // empty source word participates in Model 1 sums
};

// ---------------------------------------------------------------- init

// Uniform t(e|f) = 1/|target vocab| over the co-occurrence support.
inline TranslationTable uniform_translation_table(const ParallelCorpus& corpus,
                                                  bool include_null = false) {
    TranslationTable tt;
    if (corpus.target_vocab.size() == 0) return tt;
    const double u = 1.0 / static_cast<double>(corpus.target_vocab.size());
    for (const auto& pair : corpus.pairs)
        for (const auto& f : pair.source)
            for (const auto& e : pair.target) tt.set(e, f, u);
    if (include_null)
        for (std::size_t w = 0; w < corpus.target_vocab.size(); ++w)
            tt.set(corpus.target_vocab.surface(static_cast<int>(w)), kNullSurface, u);
    return tt;
}

inline std::vector<Token> effective_sources(const SentencePair& pair, bool include_null) {
    std::vector<Token> out;
    if (include_null) out.push_back(kNullSurface);
    out.insert(out.end(), pair.source.begin(), pair.source.end());
    return out;
}

// Floors every entry at floor_value and renormalizes each conditional row
// t(.|f) to sum 1; keeps later iterations away from hard zeros.
inline void floor_and_renormalize(TranslationTable& tt, double floor_value = 1e-12) {
    auto it = tt.t.begin();
    while (it != tt.t.end()) {
        auto row_begin = it;
        const Token f = it->first.first;
        double sum = 0.0;
        while (it != tt.t.end() && it->first.first == f) {
            it->second = std::max(it->second, floor_value);
            sum += it->second;
            ++it;
        }
        if (sum > 0.0)
            for (auto jt = row_begin; jt != it; ++jt) jt->second /= sum;
    }
}

inline void floor_and_renormalize_row(std::vector<double>& row, double floor_value = 1e-12) {
    double sum = 0.0;
    for (double& v : row) {
        v = std::max(v, floor_value);
        sum += v;
    }
    if (sum > 0.0)
        for (double& v : row) v /= sum;
}

// ---------------------------------------------------------------- weights

// alpha * t(e|f) + (1-alpha) * d_w(e, f); the empty word gets d_w = 0.
// With blending off this is exactly t(e|f).
inline double blended_link_weight(const Token& e, const Token& f,
                                  const TranslationTable& tt, const EmOptions& opts) {
    const double tv = tt.prob(e, f);
    if (!opts.blend_alpha) return tv;
    const double a = *opts.blend_alpha;
    const double dw = (f == kNullSurface) ? 0.0 : jaro_winkler_folded(e, f, opts.jw);
    return a * tv + (1.0 - a) * dw;
}

// ---------------------------------------------------------------- model 1

// p(e|f) = epsilon / L^{l_e} * prod_j sum_i t(e_j|f_i),
// L = l_f (+1 with the empty word included).
inline double model1_sentence_prob(const SentencePair& pair, const TranslationTable& tt,
                                   const EmOptions& opts = {}) {
    const auto sources = effective_sources(pair, opts.include_null);
    const double L = static_cast<double>(sources.size());
    double prod = tt.epsilon;
    for (const auto& e : pair.target) {
        double sum = 0.0;
        for (const auto& f : sources) sum += tt.prob(e, f);
        prod *= sum / L;
    }
    return prod;
}

// Per-link posteriors delta[j][i] = w(e_j, f_i) / sum_i' w(e_j, f_i'),
// i indexing the effective source list. Throws DegenerateRow when some
// target word has zero weight against every source position.
inline std::vector<std::vector<double>> model1_link_posteriors(
    const SentencePair& pair, const TranslationTable& tt, const EmOptions& opts = {}) {
    const auto sources = effective_sources(pair, opts.include_null);
    std::vector<std::vector<double>> delta;
    delta.reserve(pair.target.size());
    for (const auto& e : pair.target) {
        std::vector<double> ws;
        ws.reserve(sources.size());
        double sum = 0.0;
        for (const auto& f : sources) {
            double w = blended_link_weight(e, f, tt, opts);
            ws.push_back(w);
            sum += w;
        }
        if (sum <= 0.0) throw DegenerateRow(e);
        for (double& w : ws) w /= sum;
        delta.push_back(std::move(ws));
    }
    return delta;
}

// One EM iteration. Returns the updated table and the pre-update corpus
// log-likelihood sum_pairs log p(e|f) (from t alone, even when the E-step
// posterior is blended).
inline std::pair<TranslationTable, double> model1_em_iteration(
    const ParallelCorpus& corpus, const TranslationTable& tt, const EmOptions& opts = {}) {
    std::map<std::pair<Token, Token>, double> counts;  // (f, e)
    std::map<Token, double> totals;
    double ll = 0.0;
    for (const auto& pair : corpus.pairs) {
        const auto sources = effective_sources(pair, opts.include_null);
        const double L = static_cast<double>(sources.size());
        const auto delta = model1_link_posteriors(pair, tt, opts);
        for (std::size_t j = 0; j < pair.target.size(); ++j) {
            const Token& e = pair.target[j];
            double psum = 0.0;
            for (const auto& f : sources) psum += tt.prob(e, f);
            ll += std::log(psum) - std::log(L);
            for (std::size_t i = 0; i < sources.size(); ++i) {
                counts[{sources[i], e}] += delta[j][i];
                totals[sources[i]] += delta[j][i];
            }
        }
    }
    TranslationTable out = tt;
    for (auto& [key, v] : out.t) {
        const double tot = totals.count(key.first) ? totals.at(key.first) : 0.0;
        if (tot > 0.0) {
            auto it = counts.find(key);
            v = it == counts.end() ? 0.0 : it->second / tot;
        } else {
            v = 0.0;
        }
    }
    floor_and_renormalize(out);
    return {out, ll};
}

// ---------------------------------------------------------------- model 2

namespace detail {

// Shared E-step for the position-aware model: posterior
// delta(i|j) proportional to w(e_j, f_i) * a(i|j, l_e, l_f).
struct M2Counts {
    std::map<std::pair<Token, Token>, double> t_counts;  // (f, e)
    std::map<Token, double> t_totals;
    std::map<std::pair<int, int>, std::vector<std::vector<double>>> a_counts;
};

inline M2Counts model2_estep(const ParallelCorpus& corpus, const TranslationTable& tt,
                             DistortionTable& dt, const EmOptions& opts,
                             bool want_t, bool want_a) {
    M2Counts out;
    for (const auto& pair : corpus.pairs) {
        const auto sources = effective_sources(pair, dt.includes_null);
        const int le = static_cast<int>(pair.le());
        const int lf = static_cast<int>(pair.lf());
        auto& A = dt.shape(le, lf);
        if (want_a && !out.a_counts.count({le, lf}))
            out.a_counts[{le, lf}] = std::vector<std::vector<double>>(
                static_cast<std::size_t>(le),
                std::vector<double>(A[0].size(), 0.0));
        for (std::size_t j = 0; j < pair.target.size(); ++j) {
            const Token& e = pair.target[j];
            std::vector<double> ws(sources.size(), 0.0);
            double sum = 0.0;
            for (std::size_t i = 0; i < sources.size(); ++i) {
                ws[i] = blended_link_weight(e, sources[i], tt, opts) * A[j][i];
                sum += ws[i];
            }
            if (sum <= 0.0) throw DegenerateRow(e);
            for (std::size_t i = 0; i < sources.size(); ++i) {
                const double d = ws[i] / sum;
                if (want_t) {
                    out.t_counts[{sources[i], e}] += d;
                    out.t_totals[sources[i]] += d;
                }
                if (want_a) out.a_counts[{le, lf}][j][i] += d;
            }
        }
    }
    return out;
}

}  // namespace detail

// Pre-update log-likelihood of the position-aware model:
// sum_pairs [log epsilon + sum_j log sum_i t(e_j|f_i) a(i|j, l_e, l_f)].
inline double model2_log_likelihood(const ParallelCorpus& corpus, const TranslationTable& tt,
                                    DistortionTable& dt, const EmOptions& opts = {}) {
    double ll = 0.0;
    (void)opts;
    for (const auto& pair : corpus.pairs) {
        const auto sources = effective_sources(pair, dt.includes_null);
        const int le = static_cast<int>(pair.le());
        const int lf = static_cast<int>(pair.lf());
        auto& A = dt.shape(le, lf);
        ll += std::log(tt.epsilon);
        for (std::size_t j = 0; j < pair.target.size(); ++j) {
            double sum = 0.0;
            for (std::size_t i = 0; i < sources.size(); ++i)
                sum += tt.prob(pair.target[j], sources[i]) * A[j][i];
            ll += std::log(sum);
        }
    }
    return ll;
}

// One EM iteration, sequential variant: the lexical table is re-estimated
// under the current position priors, then the priors are re-estimated under
// the new lexical table. Returns (new tt, new dt, pre-update log-likelihood).
inline std::tuple<TranslationTable, DistortionTable, double> model2_em_iteration(
    const ParallelCorpus& corpus, const TranslationTable& tt, const DistortionTable& dt,
    const EmOptions& opts = {}) {
    DistortionTable cur = dt;
    const double ll = model2_log_likelihood(corpus, tt, cur, opts);

    auto tc = detail::model2_estep(corpus, tt, cur, opts, true, false);
    TranslationTable t2 = tt;
    for (auto& [key, v] : t2.t) {
        const double tot = tc.t_totals.count(key.first) ? tc.t_totals.at(key.first) : 0.0;
        if (tot > 0.0) {
            auto it = tc.t_counts.find(key);
            v = it == tc.t_counts.end() ? 0.0 : it->second / tot;
        } else {
            v = 0.0;
        }
    }
    floor_and_renormalize(t2);

    auto ac = detail::model2_estep(corpus, t2, cur, opts, false, true);
    DistortionTable d2 = cur;
    for (auto& [shape, m] : ac.a_counts) {
        auto& rows = d2.shapes[shape];
        for (std::size_t j = 0; j < m.size(); ++j) {
            rows[j] = m[j];
            floor_and_renormalize_row(rows[j]);
        }
    }
    return {std::move(t2), std::move(d2), ll};
}

// ---------------------------------------------------------------- model 3

inline double binomial_coefficient(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int x = 1; x <= k; ++x) r = r * (n - k + x) / x;
    return r;
}

inline double factorial_of(int n) {
    double r = 1.0;
    for (int x = 2; x <= n; ++x) r *= x;
    return r;
}

// Parameters seeded from a trained lexical table: empty-word rows uniform over
// the target vocabulary, fertility uniform, position tables uniform on demand.
inline Model3Params init_model3(const ParallelCorpus& corpus, const TranslationTable& tt,
                                double p0 = 0.9) {
    Model3Params p;
    p.ttable = tt;
    p.null_p0 = p0;
    p.null_p1 = 1.0 - p0;
    if (corpus.target_vocab.size() > 0) {
        const double u = 1.0 / static_cast<double>(corpus.target_vocab.size());
        for (std::size_t w = 0; w < corpus.target_vocab.size(); ++w)
            p.ttable.set(corpus.target_vocab.surface(static_cast<int>(w)), kNullSurface, u);
    }
    std::array<double, kMaxFertility + 1> uniform_fert;
    uniform_fert.fill(1.0 / (kMaxFertility + 1));
    std::set<Token> src_vocab;
    for (const auto& pair : corpus.pairs)
        for (const auto& f : pair.source) src_vocab.insert(f);
    for (const auto& f : src_vocab) p.fertility[f] = uniform_fert;
    return p;
}

// p(e, a | f) = C(l_e - phi0, phi0) p1^phi0 p0^(l_e - 2 phi0)
//              * prod_i n(phi_i|f_i) phi_i!
//              * prod_j t(e_j|f_a(j)) * prod_{a(j) != 0} d(j|a(j), l_e, l_f).
// Returns 0 when 2*phi0 > l_e or any fertility exceeds the cap.
inline double model3_alignment_prob(const SentencePair& pair, const AlignmentFunction& a,
                                    const Model3Params& p) {
    const int le = static_cast<int>(pair.le());
    const int lf = static_cast<int>(pair.lf());
    std::vector<int> phi(static_cast<std::size_t>(lf) + 1, 0);
    for (int i : a) ++phi[static_cast<std::size_t>(i)];
    const int phi0 = phi[0];
    if (le - 2 * phi0 < 0) return 0.0;
    double pr = binomial_coefficient(le - phi0, phi0) * std::pow(p.null_p1, phi0) *
                std::pow(p.null_p0, le - 2 * phi0);
    for (int i = 1; i <= lf; ++i) {
        if (phi[static_cast<std::size_t>(i)] > kMaxFertility) return 0.0;
        auto it = p.fertility.find(pair.source[static_cast<std::size_t>(i - 1)]);
        const double n_phi =
            it == p.fertility.end() ? 0.0 : it->second[static_cast<std::size_t>(phi[i])];
        pr *= n_phi * factorial_of(phi[static_cast<std::size_t>(i)]);
    }
    for (int j = 1; j <= le; ++j) {
        const int i = a[static_cast<std::size_t>(j - 1)];
        const Token& src = i == 0 ? kNullSurface : pair.source[static_cast<std::size_t>(i - 1)];
        pr *= p.ttable.prob(pair.target[static_cast<std::size_t>(j - 1)], src);
        if (i != 0) pr *= p.distortion_prob(j, i, le, lf);
    }
    return pr;
}

// The start point, all single-link moves, and all swaps, deduplicated.
inline std::vector<AlignmentFunction> model3_neighborhood(const AlignmentFunction& a, int lf) {
    std::set<AlignmentFunction> seen{a};
    std::vector<AlignmentFunction> out{a};
    for (std::size_t j = 0; j < a.size(); ++j) {
        for (int i = 0; i <= lf; ++i) {
            if (i == a[j]) continue;
            AlignmentFunction b = a;
            b[j] = i;
            if (seen.insert(b).second) out.push_back(std::move(b));
        }
    }
    for (std::size_t j1 = 0; j1 < a.size(); ++j1) {
        for (std::size_t j2 = j1 + 1; j2 < a.size(); ++j2) {
            if (a[j1] == a[j2]) continue;
            AlignmentFunction b = a;
            std::swap(b[j1], b[j2]);
            if (seen.insert(b).second) out.push_back(std::move(b));
        }
    }
    return out;
}

// Steepest-ascent hill climbing over moves and swaps.
inline std::pair<AlignmentFunction, double> model3_hillclimb(const SentencePair& pair,
                                                             const AlignmentFunction& seed,
                                                             const Model3Params& p) {
    AlignmentFunction cur = seed;
    double cur_p = model3_alignment_prob(pair, cur, p);
    for (;;) {
        const AlignmentFunction* best = nullptr;
        double best_p = cur_p;
        auto hood = model3_neighborhood(cur, static_cast<int>(pair.lf()));
        for (const auto& b : hood) {
            const double pb = model3_alignment_prob(pair, b, p);
            if (pb > best_p) {
                best = &b;
                best_p = pb;
            }
        }
        if (best == nullptr) return {cur, cur_p};
        cur = *best;
        cur_p = best_p;
    }
}

// One approximate EM iteration: per pair, hill-climb from its seed alignment
// (the position-model Viterbi point), then collect fractional counts over the
// climbed alignment's neighborhood weighted by alignment probability.
// Returns the log-likelihood proxy sum_pairs log p(best alignment).
inline double model3_em_iteration(const ParallelCorpus& corpus, Model3Params& p,
                                  const std::vector<AlignmentFunction>& seeds) {
    std::map<std::pair<Token, Token>, double> tc;  // (f, e)
    std::map<Token, double> tt_totals;
    std::map<Token, std::array<double, kMaxFertility + 1>> nc;
    std::map<std::tuple<int, int, int>, std::vector<double>> dc;
    double c0 = 0.0, c1 = 0.0;
    double ll = 0.0;
    for (std::size_t idx = 0; idx < corpus.pairs.size(); ++idx) {
        const auto& pair = corpus.pairs[idx];
        const int le = static_cast<int>(pair.le());
        const int lf = static_cast<int>(pair.lf());
        auto [best, best_p] = model3_hillclimb(pair, seeds[idx], p);
        if (best_p > 0.0) ll += std::log(best_p);
        auto hood = model3_neighborhood(best, lf);
        std::vector<double> probs;
        probs.reserve(hood.size());
        double z = 0.0;
        for (const auto& b : hood) {
            probs.push_back(model3_alignment_prob(pair, b, p));
            z += probs.back();
        }
        if (z <= 0.0) continue;
        for (std::size_t h = 0; h < hood.size(); ++h) {
            if (probs[h] <= 0.0) continue;
            const double w = probs[h] / z;
            const auto& b = hood[h];
            std::vector<int> phi(static_cast<std::size_t>(lf) + 1, 0);
            for (int i : b) ++phi[static_cast<std::size_t>(i)];
            for (int j = 1; j <= le; ++j) {
                const int i = b[static_cast<std::size_t>(j - 1)];
                const Token& src =
                    i == 0 ? kNullSurface : pair.source[static_cast<std::size_t>(i - 1)];
                tc[{src, pair.target[static_cast<std::size_t>(j - 1)]}] += w;
                tt_totals[src] += w;
                if (i != 0) {
                    auto key = std::make_tuple(i, le, lf);
                    auto it = dc.find(key);
                    if (it == dc.end())
                        it = dc.emplace(key, std::vector<double>(static_cast<std::size_t>(le), 0.0))
                                 .first;
                    it->second[static_cast<std::size_t>(j - 1)] += w;
                }
            }
            for (int i = 1; i <= lf; ++i) {
                auto& row = nc[pair.source[static_cast<std::size_t>(i - 1)]];
                row[static_cast<std::size_t>(phi[static_cast<std::size_t>(i)])] += w;
            }
            c1 += w * phi[0];
            c0 += w * (le - 2 * phi[0]);
        }
    }
    for (auto& [key, v] : p.ttable.t) {
        auto tot = tt_totals.find(key.first);
        if (tot != tt_totals.end() && tot->second > 0.0) {
            auto it = tc.find(key);
            v = it == tc.end() ? 0.0 : it->second / tot->second;
        }
    }
    floor_and_renormalize(p.ttable);
    for (auto& [f, row] : p.fertility) {
        auto it = nc.find(f);
        if (it != nc.end()) {
            double s = 0.0;
            for (double v : it->second) s += v;
            if (s > 0.0)
                for (std::size_t k = 0; k < row.size(); ++k) row[k] = it->second[k] / s;
        }
        double sum = 0.0;
        for (double& v : row) {
            v = std::max(v, 1e-12);
            sum += v;
        }
        for (double& v : row) v /= sum;
    }
    for (auto& [key, row] : dc) {
        double s = 0.0;
        for (double v : row) s += v;
        if (s > 0.0) {
            auto& dst = p.rev_distortion[key];
            dst = row;
            for (double& v : dst) v /= s;
            floor_and_renormalize_row(dst);
        }
    }
    if (c0 + c1 > 0.0) {
        p.null_p1 = c1 / (c0 + c1);
        p.null_p0 = 1.0 - p.null_p1;
    }
    return ll;
}

// ---------------------------------------------------------------- viterbi

// Per-position argmax over source positions 1..l_f (the empty word is not a
// Viterbi candidate here). Ties prefer the diagonal i = j when it is among
// the maxima, otherwise the smallest i. Score is the sentence probability
// restricted to the chosen alignment, from t alone.
inline std::pair<AlignmentFunction, double> viterbi_alignment(const SentencePair& pair,
                                                              const TranslationTable& tt,
                                                              const EmOptions& opts = {}) {
    AlignmentFunction a;
    const int lf = static_cast<int>(pair.lf());
    double score = tt.epsilon;
    for (std::size_t j0 = 0; j0 < pair.target.size(); ++j0) {
        const int j = static_cast<int>(j0) + 1;
        const Token& e = pair.target[j0];
        double best = -1.0;
        std::vector<int> ties;
        for (int i = 1; i <= lf; ++i) {
            double w = blended_link_weight(e, pair.source[static_cast<std::size_t>(i - 1)], tt,
                                           opts);
            if (w > best) {
                best = w;
                ties.assign(1, i);
            } else if (w == best) {
                ties.push_back(i);
            }
        }
        int pick = ties.front();
        for (int i : ties)
            if (i == j) pick = j;
        a.push_back(pick);
        score *= tt.prob(e, pair.source[static_cast<std::size_t>(pick - 1)]) / lf;
    }
    return {a, score};
}

inline std::pair<AlignmentFunction, double> viterbi_alignment(const SentencePair& pair,
                                                              const TranslationTable& tt,
                                                              DistortionTable& dt,
                                                              const EmOptions& opts = {}) {
    AlignmentFunction a;
    const int le = static_cast<int>(pair.le());
    const int lf = static_cast<int>(pair.lf());
    auto& A = dt.shape(le, lf);
    const int base = dt.includes_null ? 1 : 0;
    double score = tt.epsilon;
    for (std::size_t j0 = 0; j0 < pair.target.size(); ++j0) {
        const int j = static_cast<int>(j0) + 1;
        const Token& e = pair.target[j0];
        double best = -1.0;
        std::vector<int> ties;
        for (int i = 1; i <= lf; ++i) {
            double w = blended_link_weight(e, pair.source[static_cast<std::size_t>(i - 1)], tt,
                                           opts) *
                       A[j0][static_cast<std::size_t>(base + i - 1)];
            if (w > best) {
                best = w;
                ties.assign(1, i);
            } else if (w == best) {
                ties.push_back(i);
            }
        }
        int pick = ties.front();
        for (int i : ties)
            if (i == j) pick = j;
        a.push_back(pick);
        score *= tt.prob(e, pair.source[static_cast<std::size_t>(pick - 1)]) *
                 A[j0][static_cast<std::size_t>(base + pick - 1)];
    }
    return {a, score};
}

// Fertility-model Viterbi: hill-climb from the given seed alignment.
inline std::pair<AlignmentFunction, double> viterbi_alignment(const SentencePair& pair,
                                                              const Model3Params& p,
                                                              const AlignmentFunction& seed) {
    return model3_hillclimb(pair, seed, p);
}

// ---------------------------------------------------------------- likelihood

// sum over pairs of log p(e|f). Pairs scoring zero contribute -infinity and
// their ids are appended to zero_pairs when provided.
inline double corpus_log_likelihood(const ParallelCorpus& corpus, const TranslationTable& tt,
                                    const EmOptions& opts = {},
                                    std::vector<std::size_t>* zero_pairs = nullptr) {
    double ll = 0.0;
    for (const auto& pair : corpus.pairs) {
        const double p = model1_sentence_prob(pair, tt, opts);
        if (p <= 0.0 && zero_pairs) zero_pairs->push_back(pair.id);
        ll += std::log(p);
    }
    return ll;
}

inline double corpus_log_likelihood(const ParallelCorpus& corpus, const TranslationTable& tt,
                                    DistortionTable& dt, const EmOptions& opts = {}) {
    return model2_log_likelihood(corpus, tt, dt, opts);
}

// Fertility-model proxy: sum of log p(best alignment) over hill-climbed points.
inline double corpus_log_likelihood(const ParallelCorpus& corpus, const Model3Params& p,
                                    const std::vector<AlignmentFunction>& seeds,
                                    std::vector<std::size_t>* zero_pairs = nullptr) {
    double ll = 0.0;
    for (std::size_t idx = 0; idx < corpus.pairs.size(); ++idx) {
        auto [a, pa] = model3_hillclimb(corpus.pairs[idx], seeds[idx], p);
        if (pa <= 0.0 && zero_pairs) zero_pairs->push_back(corpus.pairs[idx].id);
        ll += std::log(pa);
    }
    return ll;
}

// ---------------------------------------------------------------- symmetrization

// Links are (i, j) = (source position, target position), both 1-based.
using LinkSet = std::set<std::pair<int, int>>;

enum class SymmetrizeMode { GrowDiagFinal, GrowDiagFinalAnd };

// Target-indexed alignment function to a link set; empty-word links dropped.
inline LinkSet links_from_alignment(const AlignmentFunction& a) {
    LinkSet out;
    for (std::size_t j0 = 0; j0 < a.size(); ++j0)
        if (a[j0] != 0) out.insert({a[j0], static_cast<int>(j0) + 1});
    return out;
}

// Intersection grown toward the union through the 8-neighborhood, then a
// final pass adopting union links for uncovered words. The And variant adopts
// a final link only when BOTH of its endpoints are still uncovered, which
// blocks low-quality links from crowding onto already-aligned words.
inline LinkSet grow_diag_final(const LinkSet& fwd, const LinkSet& rev, int lf, int le,
                               SymmetrizeMode mode = SymmetrizeMode::GrowDiagFinal) {
    (void)lf;
    (void)le;
    LinkSet uni;
    LinkSet A;
    for (const auto& l : fwd) {
        uni.insert(l);
        if (rev.count(l)) A.insert(l);
    }
    for (const auto& l : rev) uni.insert(l);

    auto src_covered = [&A](int i) {
        for (const auto& l : A)
            if (l.first == i) return true;
        return false;
    };
    auto tgt_covered = [&A](int j) {
        for (const auto& l : A)
            if (l.second == j) return true;
        return false;
    };

    static const int neigh[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                    {0, 1},   {1, -1}, {1, 0},  {1, 1}};
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::pair<int, int>> snapshot(A.begin(), A.end());
        for (const auto& [i, j] : snapshot) {
            for (const auto& d : neigh) {
                const std::pair<int, int> p{i + d[0], j + d[1]};
                if (uni.count(p) && !A.count(p)) {
                    if (!src_covered(p.first) || !tgt_covered(p.second)) {
                        A.insert(p);
                        changed = true;
                    }
                }
            }
        }
    }
    std::vector<std::pair<int, int>> rest;
    for (const auto& l : uni)
        if (!A.count(l)) rest.push_back(l);
    for (const auto& p : rest) {
        const bool ia = src_covered(p.first);
        const bool ja = tgt_covered(p.second);
        if (mode == SymmetrizeMode::GrowDiagFinalAnd) {
            if (!ia && !ja) A.insert(p);
        } else {
            if (!ia || !ja) A.insert(p);
        }
    }
    return A;
}

// a_fwd: trained source->target, one source position per target position.
// a_rev: trained on the swapped corpus, one target position per source position.
inline LinkSet symmetrize(const AlignmentFunction& a_fwd, const AlignmentFunction& a_rev,
                          SymmetrizeMode mode = SymmetrizeMode::GrowDiagFinal) {
    const int le = static_cast<int>(a_fwd.size());
    const int lf = static_cast<int>(a_rev.size());
    LinkSet fwd = links_from_alignment(a_fwd);
    LinkSet rev;
    for (std::size_t i0 = 0; i0 < a_rev.size(); ++i0)
        if (a_rev[i0] != 0) rev.insert({static_cast<int>(i0) + 1, a_rev[i0]});
    return grow_diag_final(fwd, rev, lf, le, mode);
}

// ---------------------------------------------------------------- reports

inline std::string format_double_7g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.7g", v);
    return buf;
}

// Single alignment line: the target sentence, the empty-word bucket with all
// unlinked target positions, then each source token with the ascending target
// positions linked to it.
inline std::string format_alignment_line(const SentencePair& pair, const LinkSet& links) {
    std::string out;
    for (std::size_t j = 0; j < pair.target.size(); ++j) {
        if (j) out += ' ';
        out += pair.target[j];
    }
    std::set<int> linked_targets;
    for (const auto& [i, j] : links) linked_targets.insert(j);
    auto bucket = [](const std::vector<int>& positions) {
        std::string s = "({ ";
        for (int p : positions) s += std::to_string(p) + ' ';
        s += "})";
        return s;
    };
    std::vector<int> null_positions;
    for (int j = 1; j <= static_cast<int>(pair.le()); ++j)
        if (!linked_targets.count(j)) null_positions.push_back(j);
    out += ' ';
    out += kNullSurface;
    out += ' ';
    out += bucket(null_positions);
    for (int i = 1; i <= static_cast<int>(pair.lf()); ++i) {
        std::vector<int> positions;
        for (const auto& [li, lj] : links)
            if (li == i) positions.push_back(lj);
        out += ' ';
        out += pair.source[static_cast<std::size_t>(i - 1)];
        out += ' ';
        out += bucket(positions);
    }
    return out;
}

// Two-line block: a header with pair number, lengths and model score, then
// the alignment line.
inline std::string format_giza_alignment(const SentencePair& pair, const LinkSet& links,
                                         double score) {
    std::string out = "# Sentence pair (" + std::to_string(pair.id + 1) + ") Source : " +
                      std::to_string(pair.lf()) + " Target : " + std::to_string(pair.le()) +
                      " Score : " + format_double_7g(score) + "\n";
    out += format_alignment_line(pair, links);
    out += '\n';
    return out;
}

// Fixed-width grid, rows = source (English) words, columns = target (gloss)
// words, '*' marking linked cells.
inline std::string render_alignment_matrix(const SentencePair& pair, const LinkSet& links) {
    std::size_t label_w = 0;
    for (const auto& f : pair.source) label_w = std::max(label_w, f.size());
    std::vector<std::size_t> col_w;
    for (const auto& e : pair.target) col_w.push_back(std::max<std::size_t>(e.size(), 1));
    auto pad = [](const std::string& s, std::size_t w) {
        std::string out = s;
        out.append(w > s.size() ? w - s.size() : 0, ' ');
        return out;
    };
    std::string out = pad("", label_w);
    for (std::size_t j = 0; j < pair.target.size(); ++j) {
        out += ' ';
        out += pad(pair.target[j], col_w[j]);
    }
    out += '\n';
    for (std::size_t i0 = 0; i0 < pair.source.size(); ++i0) {
        out += pad(pair.source[i0], label_w);
        for (std::size_t j0 = 0; j0 < pair.target.size(); ++j0) {
            const bool hit =
                links.count({static_cast<int>(i0) + 1, static_cast<int>(j0) + 1}) != 0;
            out += ' ';
            out += pad(hit ? "*" : ".", col_w[j0]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace gloss

#endif
