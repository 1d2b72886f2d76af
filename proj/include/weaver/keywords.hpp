#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "weaver/errors.hpp"

// Keyword extraction: sentence splitting, tokenization, rule/lexicon POS
// tagging, noun-phrase chunking, and suffix normalization. Everything here is
// a pure function over an immutable Lexicon, so per-task extraction can run
// in parallel without locks.
namespace weaver::keywords {

class LexiconError : public Error {
public:
    explicit LexiconError(const std::string& message) : Error("LexiconMissing", message) {}
};

enum class Tag { N, V, ADJ, DET, PREP, PRON, CONJ, NUM, OTHER };

std::string_view tag_name(Tag t);
std::optional<Tag> tag_from_name(std::string_view name);

struct Token {
    std::string surface;
    std::string normalized;  // lowercased + suffix-stripped, see normalize()
    Tag tag = Tag::OTHER;
    std::size_t offset = 0;  // byte index of surface within its sentence
};

struct KeywordSet {
    std::set<std::string> verbs;        // normalized verb stems
    std::set<std::string> nounPhrases;  // space-joined normalized word stems
    std::set<std::string> headNouns;    // normalized head noun per phrase

    bool empty() const { return verbs.empty() && nounPhrases.empty(); }
    // Sorted union of verbs and noun phrases joined with '|'; stable key for
    // the composition memo.
    std::string canonical_key() const;

    bool operator==(const KeywordSet&) const = default;
};

class Lexicon {
public:
    // File format: word<TAB>TAG per line, lowercase; '#' comments and blank
    // lines allowed. Throws LexiconError on I/O or format problems.
    static Lexicon load_file(const std::string& path);
    static Lexicon from_text(std::string_view text);

    std::optional<Tag> lookup(std::string_view lowerWord) const;
    std::size_t size() const { return entries_.size(); }

private:
    std::unordered_map<std::string, Tag> entries_;
};

// Chunk rule compiled over the tag alphabet. The pattern grammar supports
// tag atoms (N, V, ADJ, ...), alternation '|', grouping '()', and the
// postfix operators '*', '+', '?'. Whitespace between atoms is ignored.
class ChunkPattern {
public:
    static ChunkPattern compile(std::string_view pattern);  // throws Error("BadChunkPattern")

    // Length of the longest match of the pattern against tags[from..), or 0
    // when no non-empty prefix matches.
    std::size_t longest_match(const std::vector<Tag>& tags, std::size_t from) const;

    const std::string& source() const { return source_; }

    struct Nfa;  // defined in keywords.cpp

private:
    std::string source_;
    std::shared_ptr<const Nfa> nfa_;
};

// Splits on '.', '?', '!' and newline. A '.' does not end a sentence after a
// single letter, after a known abbreviation (mr, dr, etc, ...), or between
// digits. Runs of .?! stay attached to their sentence; newlines are dropped.
std::vector<std::string> split_sentences(std::string_view text);

// Splits on whitespace and punctuation, drops punctuation, keeps hyphenated
// words whole. Tokens come back untagged with byte offsets into `sentence`.
std::vector<Token> tokenize(std::string_view sentence);

// ASCII lowercase, then strip the suffixes -ing, -ed, -es, -s, -ly (first
// match per round, only while the remaining stem keeps length >= 3),
// repeated until nothing strips. The repetition makes normalize idempotent.
std::string normalize(std::string_view word);

// Tags in place. Rule order per token: lexicon (surface, then normalized,
// then normalized+"e" to recover e-final stems), all-digits -> NUM, suffix
// rules (-tion/-ment/-ness/-ity -> N, -ize/-ify/-ate -> V, -ous/-ful/-able
// -> ADJ; checked on surface then normalized, suffix must be a proper
// suffix), then position: sentence-initial unknown -> V, otherwise -> N.
void pos_tag(std::vector<Token>& tokens, const Lexicon& lex);

struct Phrase {
    std::string text;  // space-joined normalized stems of the span
    std::string head;  // normalized head noun (last N-tagged token of span)

    bool operator==(const Phrase&) const = default;
};

// Leftmost-longest scan of the chunk pattern over the tag sequence. Spans
// never overlap; tokens that cannot start a match are skipped.
std::vector<Phrase> chunk_noun_phrases(const std::vector<Token>& tagged, const ChunkPattern& pattern);

// Per-occurrence results (duplicates preserved) for frequency counting.
struct Occurrences {
    std::vector<std::string> verbs;
    std::vector<Phrase> phrases;
};

Occurrences extract_occurrences(std::string_view text, const Lexicon& lex, const ChunkPattern& pattern);

// Deduplicated keyword set: V-tagged stems (minus be/have/do forms) plus
// chunked noun phrases with their head nouns.
KeywordSet extract_keywords(std::string_view text, const Lexicon& lex, const ChunkPattern& pattern);

}  // namespace weaver::keywords
