#include "weaver/keywords.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

namespace weaver::keywords {
namespace {

bool is_word_char(unsigned char c) {
    // Hyphen stays inside tokens (e-ticket); non-ASCII bytes are treated as
    // letters so UTF-8 words survive whole.
    return std::isalnum(c) || c == '-' || c >= 0x80;
}

char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
    return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

const std::set<std::string>& abbreviations() {
    static const std::set<std::string> abbrevs = {
        "mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr", "vs",
        "etc", "inc", "ltd", "co", "corp", "dept", "fig", "al", "approx",
    };
    return abbrevs;
}

// Word made of ASCII letters immediately before position `i` (exclusive).
std::string letters_before(std::string_view text, std::size_t i) {
    std::size_t b = i;
    while (b > 0 && std::isalpha(static_cast<unsigned char>(text[b - 1]))) --b;
    return to_lower(text.substr(b, i - b));
}

void push_trimmed(std::vector<std::string>& out, std::string_view text, std::size_t begin, std::size_t end) {
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    if (end > begin) out.emplace_back(text.substr(begin, end - begin));
}

}  // namespace

std::string_view tag_name(Tag t) {
    switch (t) {
        case Tag::N: return "N";
        case Tag::V: return "V";
        case Tag::ADJ: return "ADJ";
        case Tag::DET: return "DET";
        case Tag::PREP: return "PREP";
        case Tag::PRON: return "PRON";
        case Tag::CONJ: return "CONJ";
        case Tag::NUM: return "NUM";
        case Tag::OTHER: return "OTHER";
    }
    return "OTHER";
}

std::optional<Tag> tag_from_name(std::string_view name) {
    static const std::array<Tag, 9> all = {Tag::N,    Tag::V,    Tag::ADJ,  Tag::DET, Tag::PREP,
                                           Tag::PRON, Tag::CONJ, Tag::NUM, Tag::OTHER};
    for (Tag t : all)
        if (tag_name(t) == name) return t;
    return std::nullopt;
}

std::string KeywordSet::canonical_key() const {
    std::set<std::string> all;
    all.insert(verbs.begin(), verbs.end());
    all.insert(nounPhrases.begin(), nounPhrases.end());
    std::string key;
    for (const auto& w : all) {
        if (!key.empty()) key += '|';
        key += w;
    }
    return key;
}

Lexicon Lexicon::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LexiconError("cannot open lexicon file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

Lexicon Lexicon::from_text(std::string_view text) {
    Lexicon lex;
    std::size_t lineNo = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line[0] == '#') continue;

        std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos)
            throw LexiconError("lexicon line " + std::to_string(lineNo) + ": expected word<TAB>TAG");
        std::string word(line.substr(0, tab));
        std::string_view tagStr = line.substr(tab + 1);
        auto tag = tag_from_name(tagStr);
        if (word.empty() || !tag)
            throw LexiconError("lexicon line " + std::to_string(lineNo) + ": bad entry '" + std::string(line) + "'");
        lex.entries_[word] = *tag;  // later entries win; duplicates are harmless
    }
    return lex;
}

std::optional<Tag> Lexicon::lookup(std::string_view lowerWord) const {
    auto it = entries_.find(std::string(lowerWord));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            push_trimmed(out, text, start, i);
            start = ++i;
            continue;
        }
        if (c != '.' && c != '?' && c != '!') {
            ++i;
            continue;
        }
        if (c == '.') {
            bool digitAround = i > 0 && i + 1 < text.size() &&
                               std::isdigit(static_cast<unsigned char>(text[i - 1])) &&
                               std::isdigit(static_cast<unsigned char>(text[i + 1]));
            std::string word = letters_before(text, i);
            bool abbrev = word.size() == 1 || abbreviations().count(word) > 0;
            if (digitAround || abbrev) {
                ++i;
                continue;
            }
        }
        // Sentence boundary: attach the whole .?! run to this sentence.
        std::size_t end = i + 1;
        while (end < text.size() && (text[end] == '.' || text[end] == '?' || text[end] == '!')) ++end;
        push_trimmed(out, text, start, end);
        start = i = end;
    }
    push_trimmed(out, text, start, text.size());
    return out;
}

std::vector<Token> tokenize(std::string_view sentence) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < sentence.size()) {
        if (!is_word_char(static_cast<unsigned char>(sentence[i]))) {
            ++i;
            continue;
        }
        std::size_t b = i;
        while (i < sentence.size() && is_word_char(static_cast<unsigned char>(sentence[i]))) ++i;
        std::size_t e = i;
        // A hyphen only counts inside a word, not at its edges.
        while (b < e && sentence[b] == '-') ++b;
        while (e > b && sentence[e - 1] == '-') --e;
        if (e == b) continue;
        Token t;
        t.surface = std::string(sentence.substr(b, e - b));
        t.normalized = normalize(t.surface);
        t.offset = b;
        out.push_back(std::move(t));
    }
    return out;
}

std::string normalize(std::string_view word) {
    std::string w = to_lower(word);
    constexpr std::array<std::string_view, 5> suffixes = {"ing", "ed", "es", "s", "ly"};
    bool stripped = true;
    while (stripped) {
        stripped = false;
        for (std::string_view suf : suffixes) {
            if (ends_with(w, suf) && w.size() - suf.size() >= 3) {
                w.resize(w.size() - suf.size());
                stripped = true;
                break;
            }
        }
    }
    return w;
}

void pos_tag(std::vector<Token>& tokens, const Lexicon& lex) {
    for (std::size_t idx = 0; idx < tokens.size(); ++idx) {
        Token& t = tokens[idx];
        std::string lower = to_lower(t.surface);

        if (auto hit = lex.lookup(lower)) {
            t.tag = *hit;
            continue;
        }
        if (auto hit = lex.lookup(t.normalized)) {
            t.tag = *hit;
            continue;
        }
        // Suffix stripping loses a final 'e' (arrives -> arriv); probe the
        // restored form before falling through to the rules.
        if (auto hit = lex.lookup(t.normalized + "e")) {
            t.tag = *hit;
            continue;
        }

        bool allDigits = !lower.empty() &&
                         std::all_of(lower.begin(), lower.end(),
                                     [](unsigned char c) { return std::isdigit(c); });
        if (allDigits) {
            t.tag = Tag::NUM;
            continue;
        }

        auto suffix_tag = [](std::string_view w) -> std::optional<Tag> {
            struct Rule { std::string_view suffix; Tag tag; };
            constexpr std::array<Rule, 10> rules = {{
                {"tion", Tag::N}, {"ment", Tag::N}, {"ness", Tag::N}, {"ity", Tag::N},
                {"ize", Tag::V}, {"ify", Tag::V}, {"ate", Tag::V},
                {"ous", Tag::ADJ}, {"ful", Tag::ADJ}, {"able", Tag::ADJ},
            }};
            for (const Rule& r : rules)
                if (w.size() > r.suffix.size() && ends_with(w, r.suffix)) return r.tag;
            return std::nullopt;
        };
        if (auto hit = suffix_tag(lower)) {
            t.tag = *hit;
            continue;
        }
        if (auto hit = suffix_tag(t.normalized)) {
            t.tag = *hit;
            continue;
        }

        t.tag = idx == 0 ? Tag::V : Tag::N;
    }
}

// --- chunk pattern NFA ---

// Thompson construction over the 9-tag alphabet. States are indices into a
// transition table; epsilon edges are followed with a closure step.
struct ChunkPattern::Nfa {
    struct State {
        std::vector<std::pair<Tag, int>> edges;  // consuming transitions
        std::vector<int> eps;
    };
    std::vector<State> states;
    int start = 0;
    int accept = 0;
};

namespace {

struct Fragment {
    int start;
    int accept;
};

class PatternParser {
public:
    PatternParser(std::string_view src, ChunkPattern::Nfa& nfa) : src_(src), nfa_(nfa) {}

    Fragment parse() {
        Fragment f = alternation();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected character");
        return f;
    }

private:
    int new_state() {
        nfa_.states.emplace_back();
        return static_cast<int>(nfa_.states.size()) - 1;
    }

    [[noreturn]] void fail(const std::string& why) {
        throw Error("BadChunkPattern",
                    "chunk pattern '" + std::string(src_) + "': " + why + " at position " + std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos_ < src_.size() && src_[pos_] == c;
    }

    Fragment alternation() {
        Fragment lhs = concatenation();
        while (peek_is('|')) {
            ++pos_;
            Fragment rhs = concatenation();
            int s = new_state(), a = new_state();
            nfa_.states[s].eps = {lhs.start, rhs.start};
            nfa_.states[lhs.accept].eps.push_back(a);
            nfa_.states[rhs.accept].eps.push_back(a);
            lhs = {s, a};
        }
        return lhs;
    }

    Fragment concatenation() {
        skip_ws();
        if (pos_ == src_.size() || src_[pos_] == '|' || src_[pos_] == ')') fail("empty alternative");
        Fragment lhs = repetition();
        while (true) {
            skip_ws();
            if (pos_ == src_.size() || src_[pos_] == '|' || src_[pos_] == ')') break;
            Fragment rhs = repetition();
            nfa_.states[lhs.accept].eps.push_back(rhs.start);
            lhs = {lhs.start, rhs.accept};
        }
        return lhs;
    }

    Fragment repetition() {
        Fragment f = atom();
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c != '*' && c != '+' && c != '?') break;
            ++pos_;
            int s = new_state(), a = new_state();
            nfa_.states[s].eps.push_back(f.start);
            nfa_.states[f.accept].eps.push_back(a);
            if (c == '*' || c == '?') nfa_.states[s].eps.push_back(a);
            if (c == '*' || c == '+') nfa_.states[f.accept].eps.push_back(f.start);
            f = {s, a};
        }
        return f;
    }

    Fragment atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("expected tag or group");
        if (src_[pos_] == '(') {
            ++pos_;
            Fragment f = alternation();
            if (!peek_is(')')) fail("missing ')'");
            ++pos_;
            return f;
        }
        std::size_t b = pos_;
        while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ == b) fail("expected tag or group");
        std::string_view name = src_.substr(b, pos_ - b);
        auto tag = tag_from_name(name);
        if (!tag) fail("unknown tag '" + std::string(name) + "'");
        int s = new_state(), a = new_state();
        nfa_.states[s].edges.emplace_back(*tag, a);
        return {s, a};
    }

    std::string_view src_;
    ChunkPattern::Nfa& nfa_;
    std::size_t pos_ = 0;
};

void eps_closure(const ChunkPattern::Nfa& nfa, std::vector<char>& inSet, std::vector<int>& stack) {
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (int t : nfa.states[s].eps) {
            if (!inSet[t]) {
                inSet[t] = 1;
                stack.push_back(t);
            }
        }
    }
}

}  // namespace

ChunkPattern ChunkPattern::compile(std::string_view pattern) {
    ChunkPattern p;
    p.source_ = std::string(pattern);
    auto nfa = std::make_shared<Nfa>();
    PatternParser parser(pattern, *nfa);
    Fragment f = parser.parse();
    nfa->start = f.start;
    nfa->accept = f.accept;
    p.nfa_ = std::move(nfa);
    return p;
}

std::size_t ChunkPattern::longest_match(const std::vector<Tag>& tags, std::size_t from) const {
    const Nfa& nfa = *nfa_;
    std::vector<char> current(nfa.states.size(), 0), next(nfa.states.size(), 0);
    std::vector<int> stack;

    current[nfa.start] = 1;
    stack.push_back(nfa.start);
    eps_closure(nfa, current, stack);

    std::size_t best = 0;  // empty matches are not chunks
    for (std::size_t i = from; i < tags.size(); ++i) {
        std::fill(next.begin(), next.end(), 0);
        bool any = false;
        for (std::size_t s = 0; s < current.size(); ++s) {
            if (!current[s]) continue;
            for (const auto& [tag, to] : nfa.states[s].edges) {
                if (tag == tags[i] && !next[to]) {
                    next[to] = 1;
                    stack.push_back(static_cast<int>(to));
                    any = true;
                }
            }
        }
        if (!any) break;
        eps_closure(nfa, next, stack);
        current.swap(next);
        if (current[nfa.accept]) best = i - from + 1;
    }
    return best;
}

std::vector<Phrase> chunk_noun_phrases(const std::vector<Token>& tagged, const ChunkPattern& pattern) {
    std::vector<Tag> tags;
    tags.reserve(tagged.size());
    for (const Token& t : tagged) tags.push_back(t.tag);

    std::vector<Phrase> out;
    std::size_t i = 0;
    while (i < tagged.size()) {
        std::size_t len = pattern.longest_match(tags, i);
        if (len == 0) {
            ++i;
            continue;
        }
        Phrase p;
        for (std::size_t j = i; j < i + len; ++j) {
            if (!p.text.empty()) p.text += ' ';
            p.text += tagged[j].normalized;
            if (tagged[j].tag == Tag::N) p.head = tagged[j].normalized;
        }
        if (p.head.empty()) p.head = tagged[i + len - 1].normalized;
        out.push_back(std::move(p));
        i += len;
    }
    return out;
}

namespace {

const std::set<std::string>& stopword_verb_stems() {
    // Normalized forms of be/have/do inflections; computed once so the
    // filter stays in the same space as extracted verb stems.
    static const std::set<std::string> stems = [] {
        std::set<std::string> s;
        for (std::string_view w : {"be", "is", "are", "was", "were", "been", "being", "am",
                                   "have", "has", "had", "having",
                                   "do", "does", "did", "doing", "done"})
            s.insert(normalize(w));
        return s;
    }();
    return stems;
}

}  // namespace

Occurrences extract_occurrences(std::string_view text, const Lexicon& lex, const ChunkPattern& pattern) {
    Occurrences out;
    for (const std::string& sentence : split_sentences(text)) {
        std::vector<Token> tokens = tokenize(sentence);
        pos_tag(tokens, lex);
        for (const Token& t : tokens) {
            if (t.tag == Tag::V && stopword_verb_stems().count(t.normalized) == 0)
                out.verbs.push_back(t.normalized);
        }
        for (Phrase& p : chunk_noun_phrases(tokens, pattern)) out.phrases.push_back(std::move(p));
    }
    return out;
}

KeywordSet extract_keywords(std::string_view text, const Lexicon& lex, const ChunkPattern& pattern) {
    Occurrences occ = extract_occurrences(text, lex, pattern);
    KeywordSet k;
    for (auto& v : occ.verbs) k.verbs.insert(std::move(v));
    for (auto& p : occ.phrases) {
        k.nounPhrases.insert(std::move(p.text));
        k.headNouns.insert(std::move(p.head));
    }
    return k;
}

}  // namespace weaver::keywords
