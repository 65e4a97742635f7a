#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace delicate::digits {

// Positional expansion, least-significant digit first. `digits` never has a
// trailing (most-significant) zero except for the single-digit zero itself.
struct DigitString {
    uint32_t base = 10;
    std::vector<uint32_t> digits;

    mpz_class value() const;
    size_t length() const { return digits.size(); }
};

DigitString to_digits(const mpz_class& n, uint32_t base);
DigitString to_digits(uint64_t n, uint32_t base);
mpz_class from_digits(const DigitString& ds);

// All values obtained by replacing exactly one digit of p with a different
// digit of the base, the leading digit with 0 included (the value just gets
// shorter). Output order: position ascending (LSB first), replacement digit
// ascending; always len * (base - 1) entries, none equal to p.
std::vector<mpz_class> single_digit_variants(const mpz_class& p, uint32_t base);
std::vector<uint64_t> single_digit_variants(uint64_t p, uint32_t base);

// Appending up to T digits at either end of p's base-a expansion.
//   end:     p * a^t + r            for 1 <= t <= T, 0 <= r < a^t
//   prepend: p + v * a^len(p)       for 1 <= v < a^T
// An end-append is the map m -> k*m + s with k = a^t, s = r; a prepend is
// m -> m + j*a^i with j*a^i = v*a^len(p). Both land inside the |k*m + j*a^i + s|
// family once K is taken large enough; the functions here stay independent of
// any particular K.
std::vector<mpz_class> end_append_variants(const mpz_class& p, uint32_t base, uint32_t T);
std::vector<mpz_class> prepend_variants(const mpz_class& p, uint32_t base, uint32_t T);
// Union of the two, sorted, duplicates removed.
std::vector<mpz_class> append_variants(const mpz_class& p, uint32_t base, uint32_t T);

// One parameter tuple of the perturbation family.
struct Perturbation {
    uint32_t a = 1;
    uint32_t i = 0;
    int32_t j = 1;     // 1 <= |j| <= K
    uint32_t k = 1;
    int64_t s = 0;

    // |k*m + j*a^i + s|
    mpz_class value_of(const mpz_class& m) const;

    bool operator==(const Perturbation&) const = default;
};

// The full box: a in [1,K], i in [0,i_max], 1 <= |j| <= K, k in [1,K],
// s in S. i_max = floor(K * ln N). Enumeration is lexicographic in
// (a, i, j, k, s) with j running -K..-1 then 1..K and s in ascending order.
class PerturbationBox {
  public:
    PerturbationBox(uint32_t K, uint64_t N, std::vector<int64_t> S);

    uint32_t K() const { return K_; }
    uint64_t N() const { return N_; }
    uint32_t i_max() const { return i_max_; }
    const std::vector<int64_t>& S() const { return S_; }

    uint64_t tuple_count() const;
    Perturbation tuple_at(uint64_t index) const;

    template <typename Fn>
    void for_each(Fn&& fn) const {
        uint64_t total = tuple_count();
        for (uint64_t t = 0; t < total; ++t)
            if (!fn(tuple_at(t))) return;
    }

  private:
    uint32_t K_;
    uint64_t N_;
    uint32_t i_max_;
    std::vector<int64_t> S_;
};

}   // namespace delicate::digits
