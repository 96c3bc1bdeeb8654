#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eventsem {

// Bad or inconsistent user input (files, flags, queries). CLI exit code 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A broken internal invariant. CLI exit code 2.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// No token of a text resolved in the embedding vocabulary.
class AllTokensOov : public InputError {
public:
    explicit AllTokensOov(std::vector<std::string> tokens)
        : InputError(make_message(tokens)), tokens_(std::move(tokens)) {}

    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

private:
    static std::string make_message(const std::vector<std::string>& tokens) {
        std::string msg = "no token is in the embedding vocabulary";
        if (tokens.empty()) return msg + " (empty token list)";
        msg += ":";
        for (const auto& t : tokens) msg += " " + t;
        return msg;
    }

    std::vector<std::string> tokens_;
};

// A similarity that cannot be evaluated, e.g. a sum-pooled vector whose
// components cancel to zero. Distinct from a legal similarity of 0.
class UnscorableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace eventsem
