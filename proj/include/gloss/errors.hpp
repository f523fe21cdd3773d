#ifndef GLOSS_ERRORS_HPP
#define GLOSS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gloss {

// Exit codes used by the CLI driver.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitDecode = 3,
};

// Malformed input file (missing tab, bad record, unparseable number).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg, long line = -1)
        : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

// A sentence side became empty after tokenization.
class EmptySentence : public std::runtime_error {
public:
    explicit EmptySentence(const std::string& msg, long line = -1)
        : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

// A target word had all-zero link weights in an E-step.
class DegenerateRow : public std::runtime_error {
public:
    explicit DegenerateRow(const std::string& word)
        : std::runtime_error("degenerate E-step row for target word '" + word + "'"),
          word_(word) {}
    const std::string& word() const { return word_; }

private:
    std::string word_;
};

// The decoder could not complete any hypothesis.
class DecodeFailure : public std::runtime_error {
public:
    DecodeFailure(const std::string& msg, std::string best_partial)
        : std::runtime_error(msg), best_partial_(std::move(best_partial)) {}
    const std::string& best_partial() const { return best_partial_; }

private:
    std::string best_partial_;
};

// The exhaustive oracle refuses inputs beyond its factorial budget.
class RefuseOracle : public std::runtime_error {
public:
    explicit RefuseOracle(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gloss

#endif
