#include "taxominer/porter.hpp"

#include <cctype>

// Adapted from the public-domain reference implementation of the Porter
// stemming algorithm (M. F. Porter, 1980).

namespace taxominer {

namespace {

struct PorterState {
    std::string b;  // the word, modified in place
    int k = 0;      // index of last character
    int j = 0;      // general offset set by ends()

    bool cons(int i) const {
        switch (b[i]) {
            case 'a': case 'e': case 'i': case 'o': case 'u':
                return false;
            case 'y':
                return (i == 0) ? true : !cons(i - 1);
            default:
                return true;
        }
    }

    // Number of consonant-vowel sequences in b[0..j].
    int m() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > j) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowelinstem() const {
        for (int i = 0; i <= j; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool doublec(int i) const {
        if (i < 1) return false;
        if (b[i] != b[i - 1]) return false;
        return cons(i);
    }

    // consonant-vowel-consonant at i, with final consonant not w, x or y.
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        char ch = b[i];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends_with(std::string_view s) {
        int len = static_cast<int>(s.size());
        if (len > k + 1) return false;
        if (b.compare(k - len + 1, len, s) != 0) return false;
        j = k - len;
        return true;
    }

    void setto(std::string_view s) {
        b.replace(j + 1, b.size() - (j + 1), s);
        k = j + static_cast<int>(s.size());
        b.resize(k + 1);
    }

    void r(std::string_view s) {
        if (m() > 0) setto(s);
    }

    // plurals and -ed / -ing
    void step1ab() {
        if (b[k] == 's') {
            if (ends_with("sses")) k -= 2;
            else if (ends_with("ies")) setto("i");
            else if (b[k - 1] != 's') --k;
        }
        if (ends_with("eed")) {
            if (m() > 0) --k;
        } else if ((ends_with("ed") || ends_with("ing")) && vowelinstem()) {
            k = j;
            if (ends_with("at")) setto("ate");
            else if (ends_with("bl")) setto("ble");
            else if (ends_with("iz")) setto("ize");
            else if (doublec(k)) {
                --k;
                char ch = b[k];
                if (ch == 'l' || ch == 's' || ch == 'z') ++k;
            } else if (m() == 1 && cvc(k)) {
                j = k;
                setto("e");
            }
        }
        b.resize(k + 1);
    }

    void step1c() {
        if (ends_with("y") && vowelinstem()) b[k] = 'i';
    }

    void step2() {
        switch (b[k - 1]) {
            case 'a':
                if (ends_with("ational")) { r("ate"); break; }
                if (ends_with("tional")) { r("tion"); break; }
                break;
            case 'c':
                if (ends_with("enci")) { r("ence"); break; }
                if (ends_with("anci")) { r("ance"); break; }
                break;
            case 'e':
                if (ends_with("izer")) { r("ize"); break; }
                break;
            case 'l':
                if (ends_with("bli")) { r("ble"); break; }
                if (ends_with("alli")) { r("al"); break; }
                if (ends_with("entli")) { r("ent"); break; }
                if (ends_with("eli")) { r("e"); break; }
                if (ends_with("ousli")) { r("ous"); break; }
                break;
            case 'o':
                if (ends_with("ization")) { r("ize"); break; }
                if (ends_with("ation")) { r("ate"); break; }
                if (ends_with("ator")) { r("ate"); break; }
                break;
            case 's':
                if (ends_with("alism")) { r("al"); break; }
                if (ends_with("iveness")) { r("ive"); break; }
                if (ends_with("fulness")) { r("ful"); break; }
                if (ends_with("ousness")) { r("ous"); break; }
                break;
            case 't':
                if (ends_with("aliti")) { r("al"); break; }
                if (ends_with("iviti")) { r("ive"); break; }
                if (ends_with("biliti")) { r("ble"); break; }
                break;
            case 'g':
                if (ends_with("logi")) { r("log"); break; }
                break;
        }
    }

    void step3() {
        switch (b[k]) {
            case 'e':
                if (ends_with("icate")) { r("ic"); break; }
                if (ends_with("ative")) { r(""); break; }
                if (ends_with("alize")) { r("al"); break; }
                break;
            case 'i':
                if (ends_with("iciti")) { r("ic"); break; }
                break;
            case 'l':
                if (ends_with("ical")) { r("ic"); break; }
                if (ends_with("ful")) { r(""); break; }
                break;
            case 's':
                if (ends_with("ness")) { r(""); break; }
                break;
        }
    }

    void step4() {
        switch (b[k - 1]) {
            case 'a': if (ends_with("al")) break; return;
            case 'c': if (ends_with("ance")) break;
                      if (ends_with("ence")) break; return;
            case 'e': if (ends_with("er")) break; return;
            case 'i': if (ends_with("ic")) break; return;
            case 'l': if (ends_with("able")) break;
                      if (ends_with("ible")) break; return;
            case 'n': if (ends_with("ant")) break;
                      if (ends_with("ement")) break;
                      if (ends_with("ment")) break;
                      if (ends_with("ent")) break; return;
            case 'o': if (ends_with("ion") && j >= 0 &&
                          (b[j] == 's' || b[j] == 't')) break;
                      if (ends_with("ou")) break; return;
            case 's': if (ends_with("ism")) break; return;
            case 't': if (ends_with("ate")) break;
                      if (ends_with("iti")) break; return;
            case 'u': if (ends_with("ous")) break; return;
            case 'v': if (ends_with("ive")) break; return;
            case 'z': if (ends_with("ize")) break; return;
            default: return;
        }
        if (m() > 1) {
            k = j;
            b.resize(k + 1);
        }
    }

    void step5() {
        j = k;
        if (b[k] == 'e') {
            int a = m();
            if (a > 1 || (a == 1 && !cvc(k - 1))) --k;
        }
        if (b[k] == 'l' && doublec(k) && m() > 1) --k;
        b.resize(k + 1);
    }
};

}  // namespace

std::string PorterStemmer::stem(std::string_view token) const {
    if (token.size() <= 2) return std::string(token);
    for (unsigned char c : token)
        if (!std::isalpha(c)) return std::string(token);

    PorterState s;
    s.b.assign(token);
    s.k = static_cast<int>(s.b.size()) - 1;
    s.step1ab();
    if (s.k > 0) {
        s.step1c();
        s.step2();
        s.step3();
        s.step4();
        s.step5();
    }
    return s.b;
}

const Stemmer& default_stemmer() {
    static PorterStemmer instance;
    return instance;
}

}  // namespace taxominer
