#ifndef GLOSS_STRING_METRICS_HPP
#define GLOSS_STRING_METRICS_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

namespace gloss {

struct JaroWinklerConfig {
    double prefix_scale = 0.1;  // p, capped at 0.25 by convention
    int max_prefix = 4;         // l_max
};

struct MatchStats {
    int m = 0;  // matching characters
    int t = 0;  // transpositions (out-of-order matched pairs / 2, floored)
};

// Decodes UTF-8 into Unicode scalar values. Invalid bytes pass through
// as their own scalars so comparisons stay total on arbitrary input.
inline std::vector<std::uint32_t> utf8_codepoints(const std::string& s) {
    std::vector<std::uint32_t> out;
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        std::uint32_t cp = c;
        std::size_t extra = 0;
        if (c >= 0xF0) extra = 3, cp = c & 0x07u;
        else if (c >= 0xE0) extra = 2, cp = c & 0x0Fu;
        else if (c >= 0xC0) extra = 1, cp = c & 0x1Fu;
        if (extra > 0 && i + extra < s.size()) {
            bool ok = true;
            std::uint32_t acc = cp;
            for (std::size_t k = 1; k <= extra; ++k) {
                unsigned char cc = static_cast<unsigned char>(s[i + k]);
                if ((cc & 0xC0u) != 0x80u) { ok = false; break; }
                acc = (acc << 6) | (cc & 0x3Fu);
            }
            if (ok) {
                out.push_back(acc);
                i += extra + 1;
                continue;
            }
        }
        out.push_back(c);
        ++i;
    }
    return out;
}

// ASCII lowercase fold; non-ASCII scalars pass through unchanged.
inline std::string fold_case(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

// Greedy first-unused match inside the standard window max(|s|,|t|)/2 - 1.
inline MatchStats jaro_match_stats(const std::vector<std::uint32_t>& a,
                                   const std::vector<std::uint32_t>& b) {
    MatchStats st;
    const int la = static_cast<int>(a.size());
    const int lb = static_cast<int>(b.size());
    if (la == 0 || lb == 0) return st;
    const int window = std::max(std::max(la, lb) / 2 - 1, 0);
    std::vector<bool> ma(a.size(), false), mb(b.size(), false);
    for (int i = 0; i < la; ++i) {
        const int lo = std::max(0, i - window);
        const int hi = std::min(lb - 1, i + window);
        for (int j = lo; j <= hi; ++j) {
            if (!mb[j] && a[i] == b[j]) {
                ma[i] = mb[j] = true;
                ++st.m;
                break;
            }
        }
    }
    if (st.m == 0) return st;
    std::vector<std::uint32_t> sa, sb;
    for (int i = 0; i < la; ++i)
        if (ma[i]) sa.push_back(a[i]);
    for (int j = 0; j < lb; ++j)
        if (mb[j]) sb.push_back(b[j]);
    int out_of_order = 0;
    for (std::size_t k = 0; k < sa.size(); ++k)
        if (sa[k] != sb[k]) ++out_of_order;
    st.t = out_of_order / 2;
    return st;
}

// d_j = (m/|s1| + m/|s2| + (m-t)/m) / 3. Both empty -> 1; one empty or m=0 -> 0.
inline double jaro(const std::string& s1, const std::string& s2) {
    const auto a = utf8_codepoints(s1);
    const auto b = utf8_codepoints(s2);
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    const MatchStats st = jaro_match_stats(a, b);
    if (st.m == 0) return 0.0;
    const double m = st.m;
    return (m / a.size() + m / b.size() + (m - st.t) / m) / 3.0;
}

// d_w = d_j + l * p * (1 - d_j), l = common prefix length capped at max_prefix.
inline double jaro_winkler(const std::string& s1, const std::string& s2,
                           const JaroWinklerConfig& cfg = {}) {
    const double d = jaro(s1, s2);
    const auto a = utf8_codepoints(s1);
    const auto b = utf8_codepoints(s2);
    int l = 0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t k = 0; k < n; ++k) {
        if (a[k] == b[k] && l < cfg.max_prefix) ++l;
        else break;
    }
    return d + l * cfg.prefix_scale * (1.0 - d);
}

// Case-insensitive Jaro-Winkler, the form used to bias alignment: gloss
// tokens are conventionally uppercase, English tokens lowercase.
inline double jaro_winkler_folded(const std::string& s1, const std::string& s2,
                                  const JaroWinklerConfig& cfg = {}) {
    return jaro_winkler(fold_case(s1), fold_case(s2), cfg);
}

}  // namespace gloss

#endif
