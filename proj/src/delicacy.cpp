#include "delicate/delicacy.hpp"

#include "delicate/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace delicate::delicacy {

const char* to_string(Mode m) {
    switch (m) {
        case Mode::digit_change: return "digit-change";
        case Mode::tao_box: return "tao-box";
        case Mode::theorem2_box: return "theorem2-box";
    }
    return "?";
}

Mode mode_from_string(const std::string& s) {
    if (s == "digit-change") return Mode::digit_change;
    if (s == "tao-box") return Mode::tao_box;
    if (s == "theorem2-box") return Mode::theorem2_box;
    throw std::invalid_argument("unknown mode: " + s);
}

const char* to_string(ValueStatus s) {
    switch (s) {
        case ValueStatus::prime: return "prime";
        case ValueStatus::probable_prime: return "probable_prime";
        case ValueStatus::unit_or_zero: return "unit_or_zero";
    }
    return "?";
}

namespace {

struct DigitChangeScan {
    bool pass = true;
    bool saw_le1 = false;
    uint64_t tested = 0;
    uint64_t le1 = 0;
    bool have_witness = false;
    uint64_t witness_value = 0;
    uint32_t witness_pos = 0;
    int32_t witness_j = 0;
};

// Full scan of all single-digit variants of p; tracks the least prime one.
DigitChangeScan scan_digit_variants(uint64_t p, uint32_t base) {
    DigitChangeScan r;
    uint32_t digit[64];
    size_t len = 0;
    for (uint64_t n = p; n > 0; n /= base) digit[len++] = static_cast<uint32_t>(n % base);
    uint64_t power = 1;
    for (size_t t = 0; t < len; ++t) {
        uint64_t stripped = p - digit[t] * power;
        for (uint32_t d = 0; d < base; ++d) {
            if (d == digit[t]) continue;
            uint64_t v = stripped + d * power;
            ++r.tested;
            if (v <= 1) {
                r.saw_le1 = true;
                ++r.le1;
                continue;
            }
            if (arith::is_prime_u64(v)) {
                r.pass = false;
                if (!r.have_witness || v < r.witness_value) {
                    r.have_witness = true;
                    r.witness_value = v;
                    r.witness_pos = static_cast<uint32_t>(t);
                    r.witness_j = static_cast<int32_t>(d) - static_cast<int32_t>(digit[t]);
                }
            }
        }
        power *= base;
    }
    return r;
}

DelicacyReport report_from_scan(uint64_t p, uint32_t base, const DigitChangeScan& s) {
    DelicacyReport rep;
    rep.p = p;
    rep.mode = Mode::digit_change;
    rep.pass = s.pass;
    rep.tested = s.tested;
    rep.excluded_le1 = s.le1;
    rep.p_status = arith::Primality::prime;
    if (!s.pass) {
        Witness w;
        w.tuple = {base, s.witness_pos, s.witness_j, 1, 0};
        w.value = s.witness_value;
        w.status = ValueStatus::prime;
        rep.witness = w;
    }
    return rep;
}

// Shared read-only evaluation context for box predicates: power tables per
// base a, with a 64-bit mirror while a^i still fits.
class BoxEval {
  public:
    BoxEval(const digits::PerturbationBox& box, Mode mode) : box_(box), mode_(mode) {
        if (mode == Mode::digit_change)
            throw std::invalid_argument("is_widely_delicate: digit-change is not a box mode");
        uint32_t K = box.K();
        pow_.resize(K + 1);
        pow64_.resize(K + 1);
        fit64_.assign(K + 1, 0);
        for (uint32_t a = 1; a <= K; ++a) {
            pow_[a].resize(box.i_max() + 1);
            uint64_t p64 = 1;
            bool fits = true;
            for (uint32_t i = 0; i <= box.i_max(); ++i) {
                mpz_ui_pow_ui(pow_[a][i].get_mpz_t(), a, i);
                if (fits && i > 0) {
                    if (p64 > (uint64_t(1) << 62) / a) fits = false;
                    else p64 *= a;
                }
                if (fits) {
                    pow64_[a].push_back(p64);
                    fit64_[a] = i;
                }
            }
        }
    }

    // m assumed prime by the caller. fits/mu give the 64-bit mirror of m.
    DelicacyReport eval(const mpz_class& m, bool fits, uint64_t mu) const {
        DelicacyReport rep;
        rep.p = m;
        rep.mode = mode_;
        const uint32_t K = box_.K();
        const auto& S = box_.S();
        for (uint32_t a = 1; a <= K; ++a) {
            for (uint32_t i = 0; i <= box_.i_max(); ++i) {
                for (uint32_t j_idx = 0; j_idx < 2 * K; ++j_idx) {
                    int32_t j = j_idx < K ? static_cast<int32_t>(j_idx) - static_cast<int32_t>(K)
                                          : static_cast<int32_t>(j_idx - K) + 1;
                    for (uint32_t k = 1; k <= K; ++k) {
                        for (int64_t s : S) {
                            ++rep.tested;
                            if (check_tuple(rep, m, fits, mu, a, i, j, k, s)) continue;
                            rep.pass = false;
                            return rep;
                        }
                    }
                }
            }
        }
        rep.pass = true;
        return rep;
    }

  private:
    // true = tuple acceptable; false = failure (witness filled in).
    bool check_tuple(DelicacyReport& rep, const mpz_class& m, bool fits, uint64_t mu,
                     uint32_t a, uint32_t i, int32_t j, uint32_t k, int64_t s) const {
        mpz_class vz;
        uint64_t vu = 0;
        bool small = false;
        if (fits && i <= fit64_[a]) {
            __int128 v = static_cast<__int128>(k) * mu;
            v += static_cast<__int128>(j) * static_cast<__int128>(pow64_[a][i]);
            v += s;
            if (v < 0) v = -v;
            if (v <= static_cast<__int128>(UINT64_MAX)) {
                small = true;
                vu = static_cast<uint64_t>(v);
            } else {
                vz = build_value(m, a, i, j, k, s);
            }
        } else {
            vz = build_value(m, a, i, j, k, s);
        }

        bool is_p = small ? (fits && vu == mu) : (vz == m);
        if (is_p) {
            ++rep.equal_p;
            if (mode_ == Mode::theorem2_box) return true;
            fill_witness(rep, a, i, j, k, s, m,
                         rep.p_status == arith::Primality::probable_prime
                             ? ValueStatus::probable_prime
                             : ValueStatus::prime);
            return false;
        }
        bool le1 = small ? vu <= 1 : vz <= 1;
        if (le1) {
            ++rep.excluded_le1;
            fill_witness(rep, a, i, j, k, s, small ? mpz_class(vu) : vz,
                         ValueStatus::unit_or_zero);
            return false;
        }
        if (small) {
            if (!arith::is_prime_u64(vu)) return true;
            fill_witness(rep, a, i, j, k, s, mpz_class(vu), ValueStatus::prime);
            return false;
        }
        arith::Primality st = arith::classify_prime(vz);
        if (st == arith::Primality::composite) return true;
        if (st == arith::Primality::probable_prime) rep.used_probable = true;
        fill_witness(rep, a, i, j, k, s, vz,
                     st == arith::Primality::prime ? ValueStatus::prime
                                                   : ValueStatus::probable_prime);
        return false;
    }

    mpz_class build_value(const mpz_class& m, uint32_t a, uint32_t i, int32_t j, uint32_t k,
                          int64_t s) const {
        mpz_class v = k * m;
        v += j * pow_[a][i];
        v += s;
        return abs(v);
    }

    static void fill_witness(DelicacyReport& rep, uint32_t a, uint32_t i, int32_t j, uint32_t k,
                             int64_t s, const mpz_class& value, ValueStatus st) {
        Witness w;
        w.tuple = {a, i, j, k, s};
        w.value = value;
        w.status = st;
        rep.witness = w;
    }

    const digits::PerturbationBox& box_;
    Mode mode_;
    std::vector<std::vector<mpz_class>> pow_;
    std::vector<std::vector<uint64_t>> pow64_;
    std::vector<uint32_t> fit64_;
};

}   // namespace

DelicacyReport is_digitally_delicate(uint64_t p, uint32_t base) {
    if (base < 2) throw std::invalid_argument("is_digitally_delicate: base must be >= 2");
    if (!arith::is_prime_u64(p))
        throw std::invalid_argument("is_digitally_delicate: p is not prime");
    return report_from_scan(p, base, scan_digit_variants(p, base));
}

DelicacyReport is_digitally_delicate(const mpz_class& p, uint32_t base) {
    if (base < 2) throw std::invalid_argument("is_digitally_delicate: base must be >= 2");
    if (mpz_fits_ulong_p(p.get_mpz_t())) return is_digitally_delicate(p.get_ui(), base);

    arith::Primality ps = arith::classify_prime(p);
    if (ps == arith::Primality::composite)
        throw std::invalid_argument("is_digitally_delicate: p is not prime");
    DelicacyReport rep;
    rep.p = p;
    rep.mode = Mode::digit_change;
    rep.p_status = ps;
    rep.used_probable = ps == arith::Primality::probable_prime;

    digits::DigitString ds = digits::to_digits(p, base);
    mpz_class power = 1;
    mpz_class best;
    bool have_best = false;
    Witness w;
    for (size_t t = 0; t < ds.length(); ++t) {
        uint32_t old = ds.digits[t];
        for (uint32_t d = 0; d < base; ++d) {
            if (d == old) continue;
            mpz_class v = p + (mpz_class(d) - old) * power;
            ++rep.tested;
            if (v <= 1) {
                ++rep.excluded_le1;
                continue;
            }
            arith::Primality st = arith::classify_prime(v);
            if (st == arith::Primality::composite) continue;
            if (st == arith::Primality::probable_prime) rep.used_probable = true;
            if (!have_best || v < best) {
                have_best = true;
                best = v;
                w.tuple = {base, static_cast<uint32_t>(t),
                           static_cast<int32_t>(d) - static_cast<int32_t>(old), 1, 0};
                w.value = v;
                w.status = st == arith::Primality::prime ? ValueStatus::prime
                                                         : ValueStatus::probable_prime;
            }
        }
        power *= base;
    }
    rep.pass = !have_best;
    if (have_best) rep.witness = w;
    return rep;
}

DelicacyReport is_widely_delicate(const mpz_class& p, const digits::PerturbationBox& box,
                                  Mode mode) {
    BoxEval eval(box, mode);
    arith::Primality ps = arith::classify_prime(p);
    if (ps == arith::Primality::composite)
        throw std::invalid_argument("is_widely_delicate: p is not prime");
    bool fits = mpz_fits_ulong_p(p.get_mpz_t());
    DelicacyReport rep = eval.eval(p, fits, fits ? p.get_ui() : 0);
    rep.p_status = ps;
    if (ps == arith::Primality::probable_prime) rep.used_probable = true;
    return rep;
}

namespace {

struct ChunkOut {
    uint64_t tested = 0;
    uint64_t excluded = 0;
    std::vector<uint64_t> passing;
    std::vector<DelicacyReport> reports;
};

}   // namespace

SearchResult search_interval(const SearchParams& params) {
    if (params.hi <= params.lo) throw std::invalid_argument("search_interval: hi <= lo");
    if (params.mode == Mode::digit_change) {
        if (params.base < 2) throw std::invalid_argument("search_interval: base must be >= 2");
    } else if (!params.box) {
        throw std::invalid_argument("search_interval: box modes need a PerturbationBox");
    }

    mpz_class W(1), b(0);
    if (params.cls) {
        W = params.cls->W;
        b = params.cls->b;
        if (W < 1) throw std::invalid_argument("search_interval: W must be >= 1");
        if (b < 0 || b >= W) throw std::invalid_argument("search_interval: need 0 <= b < W");
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), b.get_mpz_t(), W.get_mpz_t());
        if (W > 1 && g != 1)
            throw std::invalid_argument("search_interval: gcd(b, W) = " + g.get_str() + " != 1");
    }
    bool w_small = mpz_fits_ulong_p(W.get_mpz_t()) && W < 64;
    uint64_t w64 = w_small ? W.get_ui() : 0;
    uint64_t b64 = w_small ? b.get_ui() : 0;

    std::optional<BoxEval> box_eval;
    if (params.mode != Mode::digit_change) box_eval.emplace(*params.box, params.mode);

    const uint64_t chunk_len = 1u << 16;
    uint64_t span = params.hi - params.lo;
    uint64_t chunk_count = (span + chunk_len - 1) / chunk_len;
    std::vector<ChunkOut> outs(chunk_count);

    auto consider = [&](uint64_t m, ChunkOut& out) {
        ++out.tested;
        DelicacyReport rep;
        if (params.mode == Mode::digit_change) {
            DigitChangeScan s = scan_digit_variants(m, params.base);
            if (s.saw_le1) ++out.excluded;
            if (s.pass) {
                out.passing.push_back(m);
            }
            if (params.collect_reports) rep = report_from_scan(m, params.base, s);
            else return;
        } else {
            rep = box_eval->eval(mpz_class(m), true, m);
            if (rep.excluded_le1 > 0) ++out.excluded;
            if (rep.pass) out.passing.push_back(m);
            if (!params.collect_reports) return;
        }
        out.reports.push_back(std::move(rep));
    };

    par::run_chunks(chunk_count, params.threads, [&](uint64_t c) {
        uint64_t clo = params.lo + c * chunk_len;
        uint64_t chi = std::min(params.hi, clo + chunk_len);
        ChunkOut& out = outs[c];
        if (!params.cls || w_small) {
            arith::PrimeSieve sieve(clo, chi);
            sieve.for_each_prime([&](uint64_t m) {
                if (w_small && m % w64 != b64) return;
                consider(m, out);
            });
        } else {
            // few candidates per chunk; step through the class directly
            mpz_class first = clo;
            mpz_class rem = (b - first) % W;
            if (rem < 0) rem += W;
            first += rem;
            for (mpz_class m = first; m < chi; m += W) {
                uint64_t mu = m.get_ui();
                if (arith::is_prime_u64(mu)) consider(mu, out);
            }
        }
    });

    SearchResult res;
    res.stats.lo = params.lo;
    res.stats.hi = params.hi;
    res.stats.W = W;
    res.stats.b = b;
    for (auto& out : outs) {
        res.stats.tested += out.tested;
        res.stats.excluded_le1 += out.excluded;
        res.primes.insert(res.primes.end(), out.passing.begin(), out.passing.end());
        for (auto& r : out.reports) res.reports.push_back(std::move(r));
    }
    res.stats.passing = res.primes.size();
    return res;
}

std::vector<DensityRow> density_report(const std::vector<SearchStats>& stats) {
    if (stats.empty()) throw std::invalid_argument("density_report: no search results");
    std::vector<DensityRow> rows;
    rows.reserve(stats.size());
    for (const auto& s : stats) {
        DensityRow r;
        r.N = s.lo;
        r.Q_N = s.tested;
        r.K_N = s.passing;
        r.ratio = s.lo >= 2 && s.passing > 0
                      ? static_cast<double>(s.passing) * std::log(static_cast<double>(s.lo)) /
                            static_cast<double>(s.lo)
                      : 0.0;
        rows.push_back(r);
    }
    return rows;
}

}   // namespace delicate::delicacy
