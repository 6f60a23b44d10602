#include "biloc/algebra.hpp"

#include <algorithm>
#include <sstream>

namespace biloc {

namespace {

Monomial sort_canonical(std::vector<uint16_t>& bits) {
    std::stable_sort(bits.begin(), bits.end(),
                     [](uint16_t a, uint16_t b) { return (a >> 9) < (b >> 9); });
    return Monomial::from_canonical(bits);
}

}  // namespace

Monomial canonicalize(std::span<const Letter> word) {
    std::vector<uint16_t> bits;
    bits.reserve(word.size());
    for (Letter l : word) bits.push_back(l.bits());
    return sort_canonical(bits);
}

bool letter_in_scenario(const Scenario& sc, int n_copies, Letter l) {
    const int pi = static_cast<int>(l.party());
    return l.copy() >= 1 && l.copy() <= n_copies && l.setting() < sc.settings[static_cast<size_t>(pi)] &&
           l.outcome() < sc.outcomes[static_cast<size_t>(pi)];
}

Monomial canonicalize(const Scenario& sc, int n_copies, std::span<const Letter> word) {
    for (Letter l : word) {
        if (!letter_in_scenario(sc, n_copies, l)) {
            throw InputError("letter " + std::string(1, party_char(l.party())) + "(" +
                             std::to_string(l.copy()) + ")[" + std::to_string(l.outcome()) + "|" +
                             std::to_string(l.setting()) + "] out of scenario range");
        }
    }
    return canonicalize(word);
}

Monomial multiply(const Monomial& m1, const Monomial& m2) {
    std::vector<uint16_t> bits;
    bits.reserve(static_cast<size_t>(m1.size() + m2.size()));
    for (int i = 0; i < m1.size(); ++i) bits.push_back(m1.letter(i).bits());
    for (int i = 0; i < m2.size(); ++i) bits.push_back(m2.letter(i).bits());
    return sort_canonical(bits);
}

Monomial adjoint(const Monomial& m) {
    std::vector<uint16_t> bits;
    bits.reserve(static_cast<size_t>(m.size()));
    for (int i = m.size() - 1; i >= 0; --i) bits.push_back(m.letter(i).bits());
    return sort_canonical(bits);
}

std::string to_string(const Monomial& m) {
    if (m.is_identity()) return "1";
    std::string out;
    for (int i = 0; i < m.size(); ++i) {
        if (i > 0) out += '.';
        Letter l = m.letter(i);
        out += party_char(l.party());
        out += '(';
        out += std::to_string(l.copy());
        out += ")[";
        out += std::to_string(l.outcome());
        out += '|';
        out += std::to_string(l.setting());
        out += ']';
    }
    return out;
}

namespace {

int parse_int(std::string_view text, size_t& pos) {
    size_t start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == start) throw InputError("monomial parse: expected integer at offset " +
                                       std::to_string(start));
    int v = 0;
    for (size_t i = start; i < pos; ++i) v = v * 10 + (text[i] - '0');
    return v;
}

void expect(std::string_view text, size_t& pos, char c) {
    if (pos >= text.size() || text[pos] != c) {
        throw InputError(std::string("monomial parse: expected '") + c + "' at offset " +
                         std::to_string(pos));
    }
    ++pos;
}

}  // namespace

Monomial parse_monomial(const Scenario& sc, int n_copies, std::string_view text) {
    if (text == "1") return Monomial();
    std::vector<Letter> word;
    size_t pos = 0;
    while (true) {
        if (pos >= text.size()) throw InputError("monomial parse: unexpected end of input");
        char pc = text[pos];
        Party party;
        if (pc == 'A') party = Party::A;
        else if (pc == 'B') party = Party::B;
        else if (pc == 'C') party = Party::C;
        else throw InputError("monomial parse: expected party letter at offset " +
                              std::to_string(pos));
        ++pos;
        expect(text, pos, '(');
        int copy = parse_int(text, pos);
        expect(text, pos, ')');
        expect(text, pos, '[');
        int outcome = parse_int(text, pos);
        expect(text, pos, '|');
        int setting = parse_int(text, pos);
        expect(text, pos, ']');
        word.emplace_back(party, setting, outcome, copy);
        if (pos == text.size()) break;
        expect(text, pos, '.');
    }
    return canonicalize(sc, n_copies, word);
}

uint64_t scenario_tag(const Scenario& sc, int n_copies) {
    uint64_t t = static_cast<uint64_t>(n_copies);
    for (int i = 0; i < 3; ++i) {
        t = t * 37 + static_cast<uint64_t>(sc.settings[static_cast<size_t>(i)]);
        t = t * 37 + static_cast<uint64_t>(sc.outcomes[static_cast<size_t>(i)]);
    }
    return t;
}

void Polynomial::add(const Monomial& m, double coeff, double drop_tol) {
    auto it = terms.find(m);
    if (it == terms.end()) {
        if (coeff != 0.0) terms.emplace(m, coeff);
        return;
    }
    it->second += coeff;
    if (std::abs(it->second) <= drop_tol) terms.erase(it);
}

Polynomial poly_combine(std::span<const std::pair<double, const Polynomial*>> parts) {
    Polynomial out;
    for (const auto& [coeff, poly] : parts) {
        if (out.tag == 0) out.tag = poly->tag;
        if (poly->tag != 0 && out.tag != 0 && poly->tag != out.tag) {
            throw InputError("poly_combine: scenario mismatch between operands");
        }
        for (const auto& [m, c] : poly->terms) out.add(m, coeff * c);
    }
    std::erase_if(out.terms, [](const auto& kv) { return kv.second == 0.0; });
    return out;
}

Eigen::MatrixXd evaluate_word(std::span<const Letter> word, const LetterMatrixAssignment& assign,
                              int dim) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(dim, dim);
    for (Letter l : word) {
        const Eigen::MatrixXd& m = assign(l);
        if (m.rows() != dim || m.cols() != dim) {
            throw InputError("evaluate_word: assignment dimension mismatch");
        }
        acc = acc * m;
    }
    return acc;
}

Eigen::MatrixXd evaluate_on_matrices(const Monomial& m, const LetterMatrixAssignment& assign,
                                     int dim) {
    auto word = m.letters();
    return evaluate_word(word, assign, dim);
}

}  // namespace biloc
