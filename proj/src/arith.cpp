#include "delicate/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace delicate::arith {

uint64_t powmod(uint64_t base, uint64_t exp, uint64_t mod) {
    if (mod == 1) return 0;
    uint64_t r = 1;
    base %= mod;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, mod);
        base = mulmod(base, base, mod);
        exp >>= 1;
    }
    return r;
}

namespace {

// One Miller-Rabin round. n odd, n > 2, n - 1 = d * 2^s.
bool mr_round(uint64_t n, uint64_t d, int s, uint64_t a) {
    a %= n;
    if (a == 0) return true;
    uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

}   // namespace

bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }

    auto run = [&](std::initializer_list<uint64_t> bases) {
        for (uint64_t a : bases)
            if (!mr_round(n, d, s, a)) return false;
        return true;
    };
    // Verified witness tiers for the 64-bit range.
    if (n < 2047) return run({2});
    if (n < 1373653) return run({2, 3});
    if (n < 9080191) return run({31, 73});
    if (n < 25326001) return run({2, 3, 5});
    if (n < 3215031751ull) return run({2, 3, 5, 7});
    if (n < 4759123141ull) return run({2, 7, 61});
    if (n < 1122004669633ull) return run({2, 13, 23, 1662803});
    if (n < 2152302898747ull) return run({2, 3, 5, 7, 11});
    if (n < 3474749660383ull) return run({2, 3, 5, 7, 11, 13});
    if (n < 341550071728321ull) return run({2, 3, 5, 7, 11, 13, 17});
    return run({2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37});
}

namespace detail {

bool strong_prp_base(const mpz_class& n, unsigned long base) {
    mpz_class nm1 = n - 1;
    mpz_class d = nm1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);

    mpz_class a(base), x;
    a %= n;
    if (a == 0) return true;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == nm1) return true;
    for (unsigned long i = 1; i < s; ++i) {
        x = (x * x) % n;
        if (x == nm1) return true;
    }
    return false;
}

// Strong Lucas test with Selfridge parameters (D = 5, -7, 9, ...; P = 1,
// Q = (1 - D) / 4). n must be odd, > 2, and not a perfect square.
bool strong_lucas_prp(const mpz_class& n) {
    long d_abs = 5;
    int sign = 1;
    mpz_class D;
    for (;;) {
        D = sign * d_abs;
        int j = mpz_jacobi(D.get_mpz_t(), n.get_mpz_t());
        if (j == -1) break;
        if (j == 0 && mpz_cmpabs(D.get_mpz_t(), n.get_mpz_t()) != 0) return false;
        d_abs += 2;
        sign = -sign;
        if (d_abs > 1000)   // unreachable for non-squares
            throw std::runtime_error("lucas: no suitable discriminant found");
    }
    mpz_class Q = (1 - D) / 4;

    // n + 1 = t * 2^s
    mpz_class t = n + 1;
    unsigned long s = mpz_scan1(t.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(t.get_mpz_t(), t.get_mpz_t(), s);

    auto halve = [&](mpz_class& v) {
        if (mpz_odd_p(v.get_mpz_t())) v += n;
        v >>= 1;
    };

    // Compute U_t, V_t, Q^t by the binary Lucas chain (P = 1).
    mpz_class u(1), v(1), qk = Q % n;
    if (qk < 0) qk += n;
    size_t bits = mpz_sizeinbase(t.get_mpz_t(), 2);
    for (size_t i = bits - 1; i-- > 0;) {
        // double: (u, v, qk) -> (u*v, v^2 - 2 qk, qk^2)
        u = (u * v) % n;
        v = (v * v - 2 * qk) % n;
        qk = (qk * qk) % n;
        if (mpz_tstbit(t.get_mpz_t(), i)) {
            // add one: U' = (u + v)/2, V' = (D u + v)/2
            mpz_class nu = u + v;
            mpz_class nv = D * u + v;
            halve(nu);
            halve(nv);
            u = nu % n;
            v = nv % n;
            qk = (qk * Q) % n;
        }
    }
    if (u < 0) u += n;
    if (v < 0) v += n;
    if (qk < 0) qk += n;

    if (u == 0 || v == 0) return true;
    for (unsigned long r = 1; r < s; ++r) {
        v = (v * v - 2 * qk) % n;
        if (v < 0) v += n;
        if (v == 0) return true;
        qk = (qk * qk) % n;
    }
    return false;
}

}   // namespace detail

Primality classify_prime(const mpz_class& n) {
    if (n < 2) return Primality::composite;
    if (mpz_fits_ulong_p(n.get_mpz_t()))
        return is_prime_u64(n.get_ui()) ? Primality::prime : Primality::composite;

    for (unsigned long p : {2ul, 3ul, 5ul, 7ul, 11ul, 13ul, 17ul, 19ul, 23ul,
                            29ul, 31ul, 37ul, 41ul, 43ul, 47ul, 53ul, 59ul, 61ul}) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), p))
            return Primality::composite;
    }
    if (mpz_perfect_square_p(n.get_mpz_t())) return Primality::composite;
    for (unsigned long b : {2ul, 3ul, 5ul, 7ul, 11ul, 13ul, 17ul, 19ul, 23ul, 29ul, 31ul, 37ul})
        if (!detail::strong_prp_base(n, b)) return Primality::composite;
    if (!detail::strong_lucas_prp(n)) return Primality::composite;
    return Primality::probable_prime;
}

const char* to_string(Primality p) {
    switch (p) {
        case Primality::composite: return "composite";
        case Primality::prime: return "prime";
        case Primality::probable_prime: return "probable_prime";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Sieving
// ---------------------------------------------------------------------------

std::vector<uint64_t> primes_below(uint64_t n) {
    std::vector<uint64_t> out;
    if (n <= 2) return out;
    std::vector<uint8_t> comp(n, 0);
    for (uint64_t i = 2; i * i < n; ++i)
        if (!comp[i])
            for (uint64_t j = i * i; j < n; j += i) comp[j] = 1;
    for (uint64_t i = 2; i < n; ++i)
        if (!comp[i]) out.push_back(i);
    return out;
}

PrimeSieve::PrimeSieve(uint64_t lo, uint64_t hi) : lo_(lo), hi_(hi) {
    if (hi <= lo) throw std::invalid_argument("segmented_sieve: hi <= lo");
    uint64_t len = hi - lo;
    bits_.assign((len + 63) / 64, ~0ull);
    // trim tail bits
    if (len % 64) bits_.back() = (~0ull) >> (64 - len % 64);

    auto clear = [&](uint64_t t) { bits_[t >> 6] &= ~(1ull << (t & 63)); };

    for (uint64_t n = lo; n < std::min<uint64_t>(hi, 2); ++n) clear(n - lo);

    uint64_t root = static_cast<uint64_t>(std::sqrt(static_cast<double>(hi)));
    while (root * root > hi) --root;
    while ((root + 1) * (root + 1) <= hi) ++root;

    for (uint64_t p : primes_below(root + 1)) {
        uint64_t start = std::max<uint64_t>(p * p, ((lo + p - 1) / p) * p);
        for (uint64_t m = start; m < hi; m += p) clear(m - lo);
    }
}

uint64_t PrimeSieve::count() const {
    uint64_t c = 0;
    for (uint64_t w : bits_) c += static_cast<uint64_t>(__builtin_popcountll(w));
    return c;
}

PrimeSieve segmented_sieve(uint64_t lo, uint64_t hi) { return PrimeSieve(lo, hi); }

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------

mpz_class Factorization::recompose() const {
    mpz_class r = unresolved;
    for (const auto& f : factors) {
        mpz_class pw;
        mpz_pow_ui(pw.get_mpz_t(), f.prime.get_mpz_t(), f.exponent);
        r *= pw;
    }
    return r;
}

namespace {

const std::vector<uint32_t>& default_trial_primes() {
    static const std::vector<uint32_t> primes = [] {
        std::vector<uint32_t> v;
        for (uint64_t p : primes_below(1'000'000)) v.push_back(static_cast<uint32_t>(p));
        return v;
    }();
    return primes;
}

uint64_t rho_seed_from(const mpz_class& n) {
    uint64_t folded = mpz_fdiv_ui(n.get_mpz_t(), 0xFFFFFFFFFFFFFFC5ull);
    return folded ^ (0x9E3779B97F4A7C15ull + (mpz_sizeinbase(n.get_mpz_t(), 2) << 1));
}

// Brent's cycle-finding rho. Returns a nontrivial factor or nullopt once the
// shared step budget runs out. `steps` counts f-evaluations across restarts.
std::optional<mpz_class> rho_brent(const mpz_class& n, std::mt19937_64& rng,
                                   uint64_t& steps, uint64_t max_steps) {
    if (mpz_even_p(n.get_mpz_t())) return mpz_class(2);
    const uint64_t batch = 128;
    while (steps < max_steps) {
        mpz_class c = 1 + mpz_class(rng() % 0xFFFFFF);
        mpz_class y = 2 + mpz_class(rng() % 0xFFFFFF);
        mpz_class x, ys, q(1), g(1);
        uint64_t r = 1;
        while (g == 1 && steps < max_steps) {
            x = y;
            for (uint64_t i = 0; i < r && steps < max_steps; ++i) {
                y = (y * y + c) % n;
                ++steps;
            }
            uint64_t k = 0;
            while (k < r && g == 1 && steps < max_steps) {
                ys = y;
                uint64_t lim = std::min(batch, r - k);
                for (uint64_t i = 0; i < lim && steps < max_steps; ++i) {
                    y = (y * y + c) % n;
                    ++steps;
                    mpz_class diff = x - y;
                    q = (q * abs(diff)) % n;
                }
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                k += lim;
            }
            r *= 2;
        }
        if (g == n) {
            // backtrack one step at a time
            do {
                ys = (ys * ys + c) % n;
                ++steps;
                mpz_class diff = x - ys;
                mpz_gcd(g.get_mpz_t(), mpz_class(abs(diff)).get_mpz_t(), n.get_mpz_t());
            } while (g == 1 && steps < max_steps);
        }
        if (g != 1 && g != n) return g;
        // cycle degenerated; retry with a new constant
    }
    return std::nullopt;
}

void push_factor(std::vector<FactorEntry>& out, const mpz_class& p, unsigned e, Primality st) {
    for (auto& f : out) {
        if (f.prime == p) {
            f.exponent += e;
            return;
        }
    }
    out.push_back({p, e, st});
}

}   // namespace

Factorization factorize(const mpz_class& n, const FactorEffort& effort) {
    if (n < 1) throw std::invalid_argument("factorize: n must be >= 1");
    Factorization out;
    out.n = n;
    if (n == 1) return out;

    mpz_class rem = n;

    // trial division
    const std::vector<uint32_t>* trial = &default_trial_primes();
    std::vector<uint32_t> custom;
    if (effort.trial_bound > 1'000'000) {
        custom.clear();
        for (uint64_t p : primes_below(effort.trial_bound)) custom.push_back(static_cast<uint32_t>(p));
        trial = &custom;
    }
    for (uint32_t p : *trial) {
        if (p >= effort.trial_bound) break;
        if (mpz_cmp_ui(rem.get_mpz_t(), 1) == 0) break;
        if (mpz_class(p) * p > rem) break;
        if (mpz_divisible_ui_p(rem.get_mpz_t(), p)) {
            unsigned e = 0;
            while (mpz_divisible_ui_p(rem.get_mpz_t(), p)) {
                mpz_divexact_ui(rem.get_mpz_t(), rem.get_mpz_t(), p);
                ++e;
            }
            push_factor(out.factors, mpz_class(p), e, Primality::prime);
        }
    }

    // resolve the remaining cofactor(s)
    uint64_t seed = effort.fresh_randomness
                        ? std::random_device{}() ^ effort.seed ^ rho_seed_from(rem)
                        : rho_seed_from(n) ^ effort.seed;
    std::mt19937_64 rng(seed);
    uint64_t steps = 0;

    std::vector<std::pair<mpz_class, unsigned>> todo;
    if (rem > 1) todo.push_back({rem, 1});
    while (!todo.empty()) {
        auto [m, mult] = todo.back();
        todo.pop_back();
        Primality st = classify_prime(m);
        if (st != Primality::composite) {
            push_factor(out.factors, m, mult, st);
            continue;
        }
        if (mpz_perfect_power_p(m.get_mpz_t())) {
            // find the smallest prime exponent root
            for (unsigned long k = 2;; ++k) {
                mpz_class root;
                if (mpz_root(root.get_mpz_t(), m.get_mpz_t(), k)) {
                    todo.push_back({root, mult * static_cast<unsigned>(k)});
                    break;
                }
            }
            continue;
        }
        auto d = rho_brent(m, rng, steps, effort.rho_steps);
        if (!d) {
            out.unresolved *= m;   // budget exhausted; loud partial result
            continue;
        }
        todo.push_back({*d, mult});
        todo.push_back({mpz_class(m / *d), mult});
    }

    std::sort(out.factors.begin(), out.factors.end(),
              [](const FactorEntry& a, const FactorEntry& b) { return a.prime < b.prime; });
    return out;
}

std::optional<mpz_class> largest_prime_factor(const mpz_class& n, const FactorEffort& effort) {
    if (n < 2) throw std::invalid_argument("largest_prime_factor: n must be >= 2");
    Factorization f = factorize(n, effort);
    if (!f.complete()) return std::nullopt;
    return f.factors.back().prime;
}

unsigned omega(const mpz_class& n, const FactorEffort& effort) {
    if (n < 1) throw std::invalid_argument("omega: n must be >= 1");
    if (n == 1) return 0;
    Factorization f = factorize(n, effort);
    if (!f.complete())
        throw std::runtime_error("omega: factorization incomplete within budget for n = " +
                                 n.get_str());
    return static_cast<unsigned>(f.factors.size());
}

// ---------------------------------------------------------------------------
// Multiplicative order
// ---------------------------------------------------------------------------

namespace {

// Carmichael lambda from a complete machine-word factorization.
uint64_t carmichael_u64(const Factorization& f) {
    uint64_t lam = 1;
    for (const auto& fe : f.factors) {
        uint64_t p = fe.prime.get_ui();
        uint64_t comp;
        if (p == 2) {
            comp = fe.exponent == 1 ? 1 : (fe.exponent == 2 ? 2 : (1ull << (fe.exponent - 2)));
        } else {
            comp = p - 1;
            for (unsigned i = 1; i < fe.exponent; ++i) comp *= p;
        }
        lam = std::lcm(lam, comp);
    }
    return lam;
}

}   // namespace

uint64_t multiplicative_order(uint64_t a, uint64_t d) {
    if (d == 0) throw std::invalid_argument("multiplicative_order: modulus is zero");
    if (d == 1) return 1;
    a %= d;
    uint64_t g = std::gcd(a, d);
    if (g != 1)
        throw std::domain_error("multiplicative_order: gcd(a, d) = " + std::to_string(g) +
                                " != 1");

    if (d <= 1000) {   // brute force
        uint64_t t = 1, acc = a % d;
        while (acc != 1) {
            acc = (acc * a) % d;
            ++t;
        }
        return t;
    }

    Factorization fd = factorize(mpz_class(static_cast<unsigned long>(d)));
    uint64_t ord = carmichael_u64(fd);
    Factorization fl = factorize(mpz_class(static_cast<unsigned long>(ord)));
    for (const auto& fe : fl.factors) {
        uint64_t r = fe.prime.get_ui();
        while (ord % r == 0 && powmod(a, ord / r, d) == 1) ord /= r;
    }
    return ord;
}

mpz_class multiplicative_order(const mpz_class& a, const mpz_class& d,
                               const FactorEffort& effort) {
    if (d == 0) throw std::invalid_argument("multiplicative_order: modulus is zero");
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t());
    if (d > 1 && g != 1)
        throw std::domain_error("multiplicative_order: gcd(a, d) = " + g.get_str() + " != 1");
    if (d == 1) return 1;
    if (mpz_fits_ulong_p(a.get_mpz_t()) && mpz_fits_ulong_p(d.get_mpz_t()))
        return multiplicative_order(a.get_ui(), d.get_ui());

    Factorization fd = factorize(d, effort);
    if (!fd.complete())
        throw std::runtime_error("multiplicative_order: cannot factor modulus within budget");
    mpz_class lam = 1;
    for (const auto& fe : fd.factors) {
        mpz_class comp;
        if (fe.prime == 2) {
            if (fe.exponent == 1) comp = 1;
            else if (fe.exponent == 2) comp = 2;
            else mpz_ui_pow_ui(comp.get_mpz_t(), 2, fe.exponent - 2);
        } else {
            mpz_class pw;
            mpz_pow_ui(pw.get_mpz_t(), fe.prime.get_mpz_t(), fe.exponent - 1);
            comp = pw * (fe.prime - 1);
        }
        mpz_lcm(lam.get_mpz_t(), lam.get_mpz_t(), comp.get_mpz_t());
    }
    Factorization fl = factorize(lam, effort);
    if (!fl.complete())
        throw std::runtime_error("multiplicative_order: cannot factor group exponent within budget");
    mpz_class ord = lam, am = a % d, x;
    for (const auto& fe : fl.factors) {
        for (;;) {
            if (!mpz_divisible_p(ord.get_mpz_t(), fe.prime.get_mpz_t())) break;
            mpz_class cand = ord / fe.prime;
            mpz_powm(x.get_mpz_t(), am.get_mpz_t(), cand.get_mpz_t(), d.get_mpz_t());
            if (x != 1) break;
            ord = cand;
        }
    }
    return ord;
}

// ---------------------------------------------------------------------------
// CRT
// ---------------------------------------------------------------------------

Congruence crt_combine(const std::vector<Congruence>& congruences) {
    mpz_class r(0), m(1);
    for (size_t i = 0; i < congruences.size(); ++i) {
        const auto& c = congruences[i];
        if (c.modulus < 1) throw std::invalid_argument("crt_combine: modulus must be >= 1");
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), m.get_mpz_t(), c.modulus.get_mpz_t());
        if (g != 1) {
            std::ostringstream os;
            os << "crt_combine: moduli not pairwise coprime: gcd(" << m.get_str() << ", "
               << c.modulus.get_str() << ") = " << g.get_str() << " at index " << i;
            throw std::invalid_argument(os.str());
        }
        // x = r (mod m), x = c.residue (mod c.modulus)
        mpz_class inv;
        if (mpz_invert(inv.get_mpz_t(), m.get_mpz_t(), c.modulus.get_mpz_t()) == 0)
            throw std::invalid_argument("crt_combine: modulus inversion failed");
        mpz_class delta = ((c.residue - r) % c.modulus) * inv % c.modulus;
        r += m * delta;
        m *= c.modulus;
        r %= m;
        if (r < 0) r += m;
    }
    return {r, m};
}

}   // namespace delicate::arith
