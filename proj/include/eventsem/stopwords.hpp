#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_set>

#include "eventsem/errors.hpp"

namespace eventsem {

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

class StopWordList {
public:
    StopWordList() = default;

    template <class Range>
    explicit StopWordList(const Range& words) {
        for (const auto& w : words) insert(w);
    }

    StopWordList(std::initializer_list<std::string_view> words) {
        for (auto w : words) insert(w);
    }

    void insert(std::string_view word) {
        if (!word.empty()) words_.insert(ascii_lower(word));
    }

    bool contains(std::string_view token) const { return words_.count(ascii_lower(token)) != 0; }
    std::size_t size() const noexcept { return words_.size(); }

    // Common English function words.
    static StopWordList english() {
        static constexpr std::string_view kWords[] = {
            "a", "about", "above", "after", "again", "against", "all", "am", "an", "and",
            "any", "are", "as", "at", "be", "because", "been", "before", "being", "below",
            "between", "both", "but", "by", "can", "could", "did", "do", "does", "doing",
            "down", "during", "each", "either", "else", "ever", "every", "few", "for", "from",
            "further", "had", "has", "have", "having", "he", "her", "here", "hers", "herself",
            "him", "himself", "his", "how", "however", "i", "if", "in", "into", "is",
            "it", "its", "itself", "just", "least", "less", "may", "me", "might", "more",
            "most", "much", "must", "my", "myself", "neither", "no", "nor", "not", "now",
            "of", "off", "often", "on", "once", "only", "or", "other", "ought", "our",
            "ours", "ourselves", "out", "over", "own", "per", "perhaps", "quite", "rather", "same",
            "shall", "she", "should", "since", "so", "some", "such", "than", "that", "the",
            "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this", "those",
            "though", "through", "thus", "to", "too", "under", "until", "up", "upon", "us",
            "very", "via", "was", "we", "were", "what", "when", "where", "whether", "which",
            "while", "who", "whom", "whose", "why", "will", "with", "within", "without", "would",
            "yet", "you", "your", "yours", "yourself", "yourselves", "also", "although", "among", "onto",
        };
        return StopWordList(kWords);
    }

    // One token per line; blank lines and surrounding whitespace ignored.
    static StopWordList from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open stop-word file: " + path);
        StopWordList list;
        std::string line;
        while (std::getline(in, line)) {
            const auto first = line.find_first_not_of(" \t\r\n");
            if (first == std::string::npos) continue;
            const auto last = line.find_last_not_of(" \t\r\n");
            list.insert(std::string_view(line).substr(first, last - first + 1));
        }
        return list;
    }

private:
    std::unordered_set<std::string> words_;
};

}  // namespace eventsem
