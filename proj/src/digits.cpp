#include "delicate/digits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace delicate::digits {

namespace {

void require_base(uint32_t base) {
    if (base < 2) throw std::invalid_argument("digits: base must be >= 2");
}

}   // namespace

mpz_class DigitString::value() const {
    mpz_class v = 0;
    for (size_t t = digits.size(); t-- > 0;) {
        v *= base;
        v += digits[t];
    }
    return v;
}

DigitString to_digits(const mpz_class& n, uint32_t base) {
    require_base(base);
    if (n < 0) throw std::invalid_argument("to_digits: n must be nonnegative");
    DigitString ds;
    ds.base = base;
    if (n == 0) {
        ds.digits = {0};
        return ds;
    }
    mpz_class rest = n;
    while (rest > 0) {
        ds.digits.push_back(mpz_fdiv_ui(rest.get_mpz_t(), base));
        mpz_fdiv_q_ui(rest.get_mpz_t(), rest.get_mpz_t(), base);
    }
    return ds;
}

DigitString to_digits(uint64_t n, uint32_t base) {
    require_base(base);
    DigitString ds;
    ds.base = base;
    if (n == 0) {
        ds.digits = {0};
        return ds;
    }
    while (n > 0) {
        ds.digits.push_back(static_cast<uint32_t>(n % base));
        n /= base;
    }
    return ds;
}

mpz_class from_digits(const DigitString& ds) {
    require_base(ds.base);
    for (uint32_t d : ds.digits)
        if (d >= ds.base) throw std::invalid_argument("from_digits: digit out of range");
    return ds.value();
}

std::vector<mpz_class> single_digit_variants(const mpz_class& p, uint32_t base) {
    require_base(base);
    if (p < 1) throw std::invalid_argument("single_digit_variants: p must be >= 1");
    DigitString ds = to_digits(p, base);
    std::vector<mpz_class> out;
    out.reserve(ds.length() * (base - 1));
    mpz_class power = 1;
    for (size_t t = 0; t < ds.length(); ++t) {
        uint32_t old = ds.digits[t];
        for (uint32_t d = 0; d < base; ++d) {
            if (d == old) continue;
            mpz_class v = p + (mpz_class(d) - old) * power;
            out.push_back(v);
        }
        power *= base;
    }
    return out;
}

std::vector<uint64_t> single_digit_variants(uint64_t p, uint32_t base) {
    require_base(base);
    if (p < 1) throw std::invalid_argument("single_digit_variants: p must be >= 1");
    if (p > UINT64_MAX / base)
        throw std::overflow_error("single_digit_variants: variants may overflow 64 bits");
    uint32_t digits[64];
    size_t len = 0;
    for (uint64_t n = p; n > 0; n /= base) digits[len++] = static_cast<uint32_t>(n % base);
    std::vector<uint64_t> out;
    out.reserve(len * (base - 1));
    uint64_t power = 1;
    for (size_t t = 0; t < len; ++t) {
        uint64_t old = digits[t] * power;
        for (uint32_t d = 0; d < base; ++d) {
            if (d == digits[t]) continue;
            out.push_back(p - old + d * power);
        }
        power *= base;
    }
    return out;
}

std::vector<mpz_class> end_append_variants(const mpz_class& p, uint32_t base, uint32_t T) {
    require_base(base);
    if (p < 1 || T < 1) throw std::invalid_argument("end_append_variants: need p >= 1, T >= 1");
    std::vector<mpz_class> out;
    mpz_class block = 1;   // base^t
    for (uint32_t t = 1; t <= T; ++t) {
        block *= base;
        mpz_class lead = p * block;
        for (mpz_class r = 0; r < block; ++r) out.push_back(lead + r);
    }
    return out;
}

std::vector<mpz_class> prepend_variants(const mpz_class& p, uint32_t base, uint32_t T) {
    require_base(base);
    if (p < 1 || T < 1) throw std::invalid_argument("prepend_variants: need p >= 1, T >= 1");
    size_t len = to_digits(p, base).length();
    mpz_class shift;
    mpz_ui_pow_ui(shift.get_mpz_t(), base, len);
    mpz_class vmax;
    mpz_ui_pow_ui(vmax.get_mpz_t(), base, T);
    std::vector<mpz_class> out;
    for (mpz_class v = 1; v < vmax; ++v) out.push_back(p + v * shift);
    return out;
}

std::vector<mpz_class> append_variants(const mpz_class& p, uint32_t base, uint32_t T) {
    std::vector<mpz_class> out = end_append_variants(p, base, T);
    std::vector<mpz_class> pre = prepend_variants(p, base, T);
    out.insert(out.end(), pre.begin(), pre.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

mpz_class Perturbation::value_of(const mpz_class& m) const {
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), a, i);
    mpz_class v = k * m + j * pw + s;
    return abs(v);
}

PerturbationBox::PerturbationBox(uint32_t K, uint64_t N, std::vector<int64_t> S)
    : K_(K), N_(N), S_(std::move(S)) {
    if (K < 2) throw std::invalid_argument("PerturbationBox: K must be >= 2");
    if (N < 1) throw std::invalid_argument("PerturbationBox: N must be >= 1");
    std::sort(S_.begin(), S_.end());
    S_.erase(std::unique(S_.begin(), S_.end()), S_.end());
    if (S_.size() > K) throw std::invalid_argument("PerturbationBox: |S| must be <= K");
    long double bound = static_cast<long double>(K) * static_cast<long double>(N);
    for (int64_t s : S_)
        if (std::abs(static_cast<long double>(s)) > bound)
            throw std::invalid_argument("PerturbationBox: s outside [-KN, KN]");
    i_max_ = static_cast<uint32_t>(std::floor(K * std::log(static_cast<double>(N))));
}

uint64_t PerturbationBox::tuple_count() const {
    return static_cast<uint64_t>(K_) * (i_max_ + 1) * (2 * K_) * K_ * S_.size();
}

Perturbation PerturbationBox::tuple_at(uint64_t index) const {
    if (index >= tuple_count()) throw std::out_of_range("PerturbationBox: tuple index");
    uint64_t ns = S_.size();
    uint64_t s_idx = index % ns;
    index /= ns;
    uint32_t k = static_cast<uint32_t>(index % K_) + 1;
    index /= K_;
    uint64_t j_idx = index % (2 * K_);
    index /= 2 * K_;
    uint32_t i = static_cast<uint32_t>(index % (i_max_ + 1));
    index /= i_max_ + 1;
    uint32_t a = static_cast<uint32_t>(index) + 1;

    Perturbation t;
    t.a = a;
    t.i = i;
    // j_idx 0..K-1 -> -K..-1, K..2K-1 -> 1..K
    t.j = j_idx < K_ ? static_cast<int32_t>(j_idx) - static_cast<int32_t>(K_)
                     : static_cast<int32_t>(j_idx - K_) + 1;
    t.k = k;
    t.s = S_[s_idx];
    return t;
}

}   // namespace delicate::digits
