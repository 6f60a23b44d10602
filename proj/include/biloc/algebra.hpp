#ifndef BILOC_ALGEBRA_HPP
#define BILOC_ALGEBRA_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "biloc/common.hpp"
#include "biloc/scenario.hpp"

namespace biloc {

enum class Party : uint8_t { A = 0, B = 1, C = 2 };

inline char party_char(Party p) { return p == Party::A ? 'A' : (p == Party::B ? 'B' : 'C'); }

// One POVM-element generator of the n-copy algebra: party, measurement
// setting, outcome, and copy index (1-based). Packed into 16 bits so words
// stay trivially comparable and hashable. Two letters commute exactly when
// their (party, copy) class keys differ.
class Letter {
public:
    Letter() : bits_(0) {}
    Letter(Party party, int setting, int outcome, int copy) {
        if (copy < 1 || copy > kMaxCopy || setting < 0 || setting > kMaxSetting ||
            outcome < 0 || outcome > kMaxOutcome) {
            throw InputError("letter field out of representable range");
        }
        bits_ = static_cast<uint16_t>((static_cast<int>(party) << 13) | (copy << 9) |
                                      (setting << 5) | outcome);
    }

    Party party() const { return static_cast<Party>(bits_ >> 13); }
    int copy() const { return (bits_ >> 9) & 0xF; }
    int setting() const { return (bits_ >> 5) & 0xF; }
    int outcome() const { return bits_ & 0x1F; }

    // (party, copy): letters in distinct classes commute.
    uint16_t class_key() const { return static_cast<uint16_t>(bits_ >> 9); }
    uint16_t bits() const { return bits_; }
    static Letter from_bits(uint16_t b) {
        Letter l;
        l.bits_ = b;
        return l;
    }

    friend bool operator==(Letter a, Letter b) { return a.bits_ == b.bits_; }
    friend auto operator<=>(Letter a, Letter b) { return a.bits_ <=> b.bits_; }

    static constexpr int kMaxCopy = 15;
    static constexpr int kMaxSetting = 15;
    static constexpr int kMaxOutcome = 31;

private:
    uint16_t bits_;
};

// A canonical word in the generators; the empty word is the identity.
// Canonical form: letters stably sorted by (party, copy) under A<B<C then
// copy ascending, preserving relative order inside each class block. This
// encodes the cross-party and cross-copy commutation relations and nothing
// else; no rewriting via completeness or projectivity happens here.
class Monomial {
public:
    static constexpr int kMaxLen = 12;

    Monomial() = default;

    int size() const { return len_; }
    bool is_identity() const { return len_ == 0; }
    Letter letter(int i) const { return Letter::from_bits(a_[static_cast<size_t>(i)]); }

    std::vector<Letter> letters() const {
        std::vector<Letter> out;
        out.reserve(len_);
        for (int i = 0; i < len_; ++i) out.push_back(letter(i));
        return out;
    }

    // Graded order: by length, then by packed letter sequence. This is the
    // fast internal order; index sets are ordered separately by display form.
    friend bool operator<(const Monomial& x, const Monomial& y) {
        if (x.len_ != y.len_) return x.len_ < y.len_;
        for (int i = 0; i < x.len_; ++i) {
            if (x.a_[static_cast<size_t>(i)] != y.a_[static_cast<size_t>(i)])
                return x.a_[static_cast<size_t>(i)] < y.a_[static_cast<size_t>(i)];
        }
        return false;
    }
    friend bool operator==(const Monomial& x, const Monomial& y) {
        if (x.len_ != y.len_) return false;
        for (int i = 0; i < x.len_; ++i) {
            if (x.a_[static_cast<size_t>(i)] != y.a_[static_cast<size_t>(i)]) return false;
        }
        return true;
    }
    friend bool operator!=(const Monomial& x, const Monomial& y) { return !(x == y); }

    size_t hash() const {
        uint64_t h = 1469598103934665603ull ^ static_cast<uint64_t>(len_);
        for (int i = 0; i < len_; ++i) {
            h ^= a_[static_cast<size_t>(i)];
            h *= 1099511628211ull;
        }
        return static_cast<size_t>(h);
    }

    // Raw constructor for already-canonical letter sequences.
    static Monomial from_canonical(std::span<const uint16_t> bits) {
        if (bits.size() > kMaxLen) throw SizeCapError("monomial exceeds supported word length");
        Monomial m;
        m.len_ = static_cast<uint8_t>(bits.size());
        for (size_t i = 0; i < bits.size(); ++i) m.a_[i] = bits[i];
        return m;
    }

private:
    uint8_t len_ = 0;
    std::array<uint16_t, kMaxLen> a_{};
};

struct MonomialHash {
    size_t operator()(const Monomial& m) const { return m.hash(); }
};

// Stable sort by commuting class; no scenario validation (hot path).
Monomial canonicalize(std::span<const Letter> word);

// Validating variant: every letter must fit the scenario and copy <= n.
Monomial canonicalize(const Scenario& sc, int n_copies, std::span<const Letter> word);

bool letter_in_scenario(const Scenario& sc, int n_copies, Letter l);

// Free product followed by canonicalization; the identity is neutral.
Monomial multiply(const Monomial& m1, const Monomial& m2);

// Word reversal then canonicalization (generators are Hermitian).
Monomial adjoint(const Monomial& m);

// Display grammar: letters as P(copy)[outcome|setting] joined by '.', the
// identity as "1", e.g. A(1)[0|0].B(1)[1|0]. parse_monomial inverts it.
std::string to_string(const Monomial& m);
Monomial parse_monomial(const Scenario& sc, int n_copies, std::string_view text);

// Real-coefficient polynomial with canonical monomial keys. The tag guards
// against mixing operands built for different scenarios or copy counts.
struct Polynomial {
    uint64_t tag = 0;  // scenario_tag(sc, n) of the builder, 0 = untagged
    std::map<Monomial, double> terms;

    void add(const Monomial& m, double coeff, double drop_tol = 0.0);
};

uint64_t scenario_tag(const Scenario& sc, int n_copies);

// Linear combination sum_i coeff_i * poly_i; zero terms dropped.
Polynomial poly_combine(std::span<const std::pair<double, const Polynomial*>> parts);

// Ordered matrix product of a letter sequence under an explicit assignment,
// identity word -> identity matrix. All assigned matrices must share dim.
using LetterMatrixAssignment = std::function<const Eigen::MatrixXd&(Letter)>;
Eigen::MatrixXd evaluate_word(std::span<const Letter> word, const LetterMatrixAssignment& assign,
                              int dim);
Eigen::MatrixXd evaluate_on_matrices(const Monomial& m, const LetterMatrixAssignment& assign,
                                     int dim);

}  // namespace biloc

#endif
