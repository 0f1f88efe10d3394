#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace rankexpl {

/// Reserved out-of-vocabulary marker. Contains '<', which the tokenizer
/// treats as a separator, so no tokenized text can ever produce it.
inline const std::string& oov_token() {
    static const std::string tok = "<oov>";
    return tok;
}

inline const std::unordered_set<std::string>& default_stopwords() {
    static const std::unordered_set<std::string> words = {
        "a",    "an",   "and",   "are",  "as",    "at",   "be",   "but",
        "by",   "for",  "if",    "in",   "into",  "is",   "it",   "no",
        "not",  "of",   "on",    "or",   "such",  "that", "the",  "their",
        "then", "there", "these", "they", "this",  "to",   "was",  "will",
        "with"};
    return words;
}

namespace detail {

/// Porter's stemming algorithm (1980), including the bli/logi amendments of
/// the reference implementation. Expects a lowercase ASCII word.
class porter_stemmer {
  public:
    static std::string stem(std::string word) {
        if (word.size() <= 2) return word;
        porter_stemmer p(std::move(word));
        p.step1ab();
        p.step1c();
        p.step2();
        p.step3();
        p.step4();
        p.step5();
        return std::move(p.b_);
    }

  private:
    explicit porter_stemmer(std::string w)
        : b_(std::move(w)), k_(static_cast<int>(b_.size()) - 1) {}

    bool cons(int i) const {
        switch (b_[static_cast<std::size_t>(i)]) {
            case 'a': case 'e': case 'i': case 'o': case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !cons(i - 1);
            default:
                return true;
        }
    }

    // Measure of b_[0..j_]: the m in [C](VC)^m[V].
    int m() const {
        int n = 0;
        int i = 0;
        for (;;) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        for (;;) {
            for (;;) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            for (;;) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool double_cons(int i) const {
        return i >= 1 && b_[static_cast<std::size_t>(i)] == b_[static_cast<std::size_t>(i - 1)] &&
               cons(i);
    }

    // consonant-vowel-consonant ending at i, final consonant not w/x/y
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        char ch = b_[static_cast<std::size_t>(i)];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(std::string_view s) {
        int len = static_cast<int>(s.size());
        if (len > k_ + 1) return false;
        if (b_.compare(b_.size() - s.size(), s.size(), s) != 0) return false;
        j_ = k_ - len;
        return true;
    }

    void set_to(std::string_view s) {
        b_.erase(static_cast<std::size_t>(j_ + 1));
        b_.append(s);
        k_ = j_ + static_cast<int>(s.size());
    }

    void replace_if_stem(std::string_view s) {
        if (m() > 0) set_to(s);
    }

    void chop(int n) {
        k_ -= n;
        b_.resize(static_cast<std::size_t>(k_ + 1));
    }

    void step1ab() {
        if (b_[static_cast<std::size_t>(k_)] == 's') {
            if (ends("sses"))
                chop(2);
            else if (ends("ies"))
                set_to("i");
            else if (b_[static_cast<std::size_t>(k_ - 1)] != 's')
                chop(1);
        }
        if (ends("eed")) {
            if (m() > 0) chop(1);
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            b_.resize(static_cast<std::size_t>(k_ + 1));
            if (ends("at"))
                set_to("ate");
            else if (ends("bl"))
                set_to("ble");
            else if (ends("iz"))
                set_to("ize");
            else if (double_cons(k_)) {
                char ch = b_[static_cast<std::size_t>(k_)];
                if (ch != 'l' && ch != 's' && ch != 'z') chop(1);
            } else if (m() == 1 && cvc(k_)) {
                j_ = k_;
                set_to("e");
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[static_cast<std::size_t>(k_)] = 'i';
    }

    void step2() {
        if (k_ < 1) return;
        switch (b_[static_cast<std::size_t>(k_ - 1)]) {
            case 'a':
                if (ends("ational")) { replace_if_stem("ate"); break; }
                if (ends("tional")) { replace_if_stem("tion"); break; }
                break;
            case 'c':
                if (ends("enci")) { replace_if_stem("ence"); break; }
                if (ends("anci")) { replace_if_stem("ance"); break; }
                break;
            case 'e':
                if (ends("izer")) { replace_if_stem("ize"); break; }
                break;
            case 'l':
                if (ends("bli")) { replace_if_stem("ble"); break; }
                if (ends("alli")) { replace_if_stem("al"); break; }
                if (ends("entli")) { replace_if_stem("ent"); break; }
                if (ends("eli")) { replace_if_stem("e"); break; }
                if (ends("ousli")) { replace_if_stem("ous"); break; }
                break;
            case 'o':
                if (ends("ization")) { replace_if_stem("ize"); break; }
                if (ends("ation")) { replace_if_stem("ate"); break; }
                if (ends("ator")) { replace_if_stem("ate"); break; }
                break;
            case 's':
                if (ends("alism")) { replace_if_stem("al"); break; }
                if (ends("iveness")) { replace_if_stem("ive"); break; }
                if (ends("fulness")) { replace_if_stem("ful"); break; }
                if (ends("ousness")) { replace_if_stem("ous"); break; }
                break;
            case 't':
                if (ends("aliti")) { replace_if_stem("al"); break; }
                if (ends("iviti")) { replace_if_stem("ive"); break; }
                if (ends("biliti")) { replace_if_stem("ble"); break; }
                break;
            case 'g':
                if (ends("logi")) { replace_if_stem("log"); break; }
                break;
        }
    }

    void step3() {
        switch (b_[static_cast<std::size_t>(k_)]) {
            case 'e':
                if (ends("icate")) { replace_if_stem("ic"); break; }
                if (ends("ative")) { replace_if_stem(""); break; }
                if (ends("alize")) { replace_if_stem("al"); break; }
                break;
            case 'i':
                if (ends("iciti")) { replace_if_stem("ic"); break; }
                break;
            case 'l':
                if (ends("ical")) { replace_if_stem("ic"); break; }
                if (ends("ful")) { replace_if_stem(""); break; }
                break;
            case 's':
                if (ends("ness")) { replace_if_stem(""); break; }
                break;
        }
    }

    void step4() {
        if (k_ < 1) return;
        switch (b_[static_cast<std::size_t>(k_ - 1)]) {
            case 'a':
                if (ends("al")) break;
                return;
            case 'c':
                if (ends("ance")) break;
                if (ends("ence")) break;
                return;
            case 'e':
                if (ends("er")) break;
                return;
            case 'i':
                if (ends("ic")) break;
                return;
            case 'l':
                if (ends("able")) break;
                if (ends("ible")) break;
                return;
            case 'n':
                if (ends("ant")) break;
                if (ends("ement")) break;
                if (ends("ment")) break;
                if (ends("ent")) break;
                return;
            case 'o':
                if (ends("ion") && j_ >= 0 &&
                    (b_[static_cast<std::size_t>(j_)] == 's' ||
                     b_[static_cast<std::size_t>(j_)] == 't'))
                    break;
                if (ends("ou")) break;
                return;
            case 's':
                if (ends("ism")) break;
                return;
            case 't':
                if (ends("ate")) break;
                if (ends("iti")) break;
                return;
            case 'u':
                if (ends("ous")) break;
                return;
            case 'v':
                if (ends("ive")) break;
                return;
            case 'z':
                if (ends("ize")) break;
                return;
            default:
                return;
        }
        if (m() > 1) {
            k_ = j_;
            b_.resize(static_cast<std::size_t>(k_ + 1));
        }
    }

    void step5() {
        j_ = k_;
        if (b_[static_cast<std::size_t>(k_)] == 'e') {
            int a = m();
            if (a > 1 || (a == 1 && !cvc(k_ - 1))) chop(1);
        }
        if (b_[static_cast<std::size_t>(k_)] == 'l' && double_cons(k_) && m() > 1) chop(1);
    }

    std::string b_;
    int k_ = 0;
    int j_ = 0;
};

}  // namespace detail

inline std::string porter_stem(std::string word) {
    return detail::porter_stemmer::stem(std::move(word));
}

/// Lowercases, splits on every non-alphanumeric byte, drops tokens shorter
/// than two characters and stopwords, then optionally stems. Alphanumeric
/// means [0-9A-Za-z]; anything else (including non-ASCII bytes) separates.
class tokenizer {
  public:
    tokenizer() : stopwords_(default_stopwords()) {}
    explicit tokenizer(std::unordered_set<std::string> stopwords, bool stem = false)
        : stopwords_(std::move(stopwords)), stem_(stem) {}

    void set_stemming(bool on) { stem_ = on; }
    bool stemming() const { return stem_; }
    const std::unordered_set<std::string>& stopwords() const { return stopwords_; }

    std::vector<std::string> tokenize(std::string_view text) const {
        std::vector<std::string> out;
        std::string cur;
        auto flush = [&] {
            if (cur.size() >= 2 && stopwords_.find(cur) == stopwords_.end())
                out.push_back(stem_ ? porter_stem(std::move(cur)) : std::move(cur));
            cur.clear();
        };
        for (char ch : text) {
            if (is_alnum(ch))
                cur.push_back(to_lower(ch));
            else
                flush();
        }
        flush();
        return out;
    }

    bool is_stopword(const std::string& w) const {
        return stopwords_.find(w) != stopwords_.end();
    }

  private:
    static bool is_alnum(char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    }
    static char to_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

    std::unordered_set<std::string> stopwords_;
    bool stem_ = false;
};

}  // namespace rankexpl
