#include "delicate/analytic.hpp"

#include "delicate/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace delicate::analytic {

namespace {

constexpr double euler_gamma = 0.5772156649;

std::vector<uint32_t> spf_sieve(uint64_t X) {
    std::vector<uint32_t> spf(X + 1, 0);
    for (uint64_t i = 2; i <= X; ++i) {
        if (spf[i] != 0) continue;
        for (uint64_t m = i; m <= X; m += i)
            if (spf[m] == 0) spf[m] = static_cast<uint32_t>(i);
    }
    return spf;
}

struct SpfFactor {
    uint64_t p;
    uint32_t e;
};

void spf_factor(uint64_t n, const std::vector<uint32_t>& spf, std::vector<SpfFactor>& out) {
    out.clear();
    while (n > 1) {
        uint64_t p = spf[n];
        uint32_t e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
    }
}

uint64_t lambda_component(uint64_t p, uint32_t e) {
    if (p == 2) {
        if (e == 1) return 1;
        if (e == 2) return 2;
        return uint64_t(1) << (e - 2);
    }
    uint64_t c = p - 1;
    for (uint32_t i = 1; i < e; ++i) c *= p;
    return c;
}

// ord of A mod n, for n within the spf table.
uint64_t order_u64(uint64_t A, uint64_t n, const std::vector<uint32_t>& spf,
                   std::vector<SpfFactor>& scratch) {
    if (n == 1) return 1;
    uint64_t lam = 1;
    spf_factor(n, spf, scratch);
    for (const auto& f : scratch) lam = std::lcm(lam, lambda_component(f.p, f.e));
    uint64_t ord = lam;
    spf_factor(lam, spf, scratch);
    uint64_t a = A % n;
    for (const auto& f : scratch) {
        for (uint32_t t = 0; t < f.e; ++t) {
            if (ord % f.p != 0) break;
            if (arith::powmod(a, ord / f.p, n) != 1) break;
            ord /= f.p;
        }
    }
    return ord;
}

}   // namespace

SeriesEstimate romanoff_partial_sum(uint64_t A, uint64_t S, uint64_t X, unsigned threads) {
    if (A < 2) throw std::invalid_argument("romanoff_partial_sum: A must be >= 2");
    if (S < 1) throw std::invalid_argument("romanoff_partial_sum: S must be >= 1");
    if (X < 2) throw std::invalid_argument("romanoff_partial_sum: X must be >= 2");

    std::vector<uint32_t> spf = spf_sieve(X);

    const uint64_t chunk_len = 4096;
    uint64_t chunk_count = (X + chunk_len - 1) / chunk_len;
    std::vector<mpf_class> sums(chunk_count, mpf_class(0, series_precision));
    std::vector<mpf_class> blocks(chunk_count, mpf_class(0, series_precision));

    par::run_chunks(chunk_count, threads, [&](uint64_t c) {
        uint64_t lo = 1 + c * chunk_len;
        uint64_t hi = std::min(X, lo + chunk_len - 1);
        std::vector<SpfFactor> scratch;
        std::vector<SpfFactor> nf;
        mpf_class sum(0, series_precision), block(0, series_precision);
        for (uint64_t n = lo; n <= hi; ++n) {
            if (std::gcd(n, A) != 1) continue;
            uint32_t omega = 0;
            if (n > 1) {
                spf_factor(n, spf, nf);
                omega = static_cast<uint32_t>(nf.size());
            }
            uint64_t ell = order_u64(A, n, spf, scratch);
            mpz_class num;
            mpz_ui_pow_ui(num.get_mpz_t(), S, omega);
            mpq_class term(num, mpz_class(n) * ell);
            term.canonicalize();
            mpf_class tf(term, series_precision);
            sum += tf;
            if (2 * n > X) block += tf;
        }
        sums[c] = sum;
        blocks[c] = block;
    });

    SeriesEstimate est;
    std::ostringstream os;
    os << "romanoff(A=" << A << ",S=" << S << ")";
    est.label = os.str();
    est.X = X;
    for (uint64_t c = 0; c < chunk_count; ++c) {
        est.partial_sum += sums[c];
        est.last_block += blocks[c];
    }
    return est;
}

MertensResult mertens_product(uint64_t x) {
    if (x < 2) throw std::invalid_argument("mertens_product: x must be >= 2");
    MertensResult r;
    r.x = x;
    r.product = mpf_class(1, series_precision);
    for (uint64_t p : arith::primes_below(x + 1)) {
        r.product *= p;
        r.product /= p - 1;
    }
    r.reference = std::exp(euler_gamma) * std::log(static_cast<double>(x));
    return r;
}

SquareIdentity square_identity_check(uint64_t p) {
    if (!arith::is_prime_u64(p)) throw std::invalid_argument("square_identity_check: p not prime");
    mpz_class P(static_cast<unsigned long>(p));
    SquareIdentity r;
    r.lhs = mpq_class(P * P, (P - 1) * (P - 1));
    r.lhs.canonicalize();
    mpz_class den = P * P * P - 3 * P + 2;
    mpq_class f1(P + 2, P);
    f1.canonicalize();
    mpq_class f2(den + 3 * P - 2, den);
    f2.canonicalize();
    r.rhs = f1 * f2;
    r.rhs.canonicalize();
    r.equal = r.lhs == r.rhs;
    return r;
}

SmoothSum smooth_squarefree_sum(uint32_t y) {
    if (y < 2) throw std::invalid_argument("smooth_squarefree_sum: y must be >= 2");
    if (y > 30)
        throw std::invalid_argument("smooth_squarefree_sum: y > 30 (enumeration is 2^pi(y))");
    std::vector<uint64_t> ps = arith::primes_below(static_cast<uint64_t>(y) + 1);
    SmoothSum r;
    r.enumerated = 0;
    for (uint64_t mask = 0; mask < (uint64_t(1) << ps.size()); ++mask) {
        uint64_t d = 1;
        for (size_t t = 0; t < ps.size(); ++t)
            if (mask & (uint64_t(1) << t)) d *= ps[t];
        mpq_class term(mpz_class(uint64_t(1) << __builtin_popcountll(mask)), mpz_class(d));
        term.canonicalize();
        r.enumerated += term;
    }
    r.product = 1;
    r.mertens_squared = 1;
    for (uint64_t p : ps) {
        mpq_class f(p + 2, p);
        f.canonicalize();
        r.product *= f;
        r.mertens_squared *= mpq_class(p, p - 1);
    }
    r.mertens_squared *= r.mertens_squared;
    r.equal = r.enumerated == r.product;
    r.bounded = r.product <= r.mertens_squared;
    return r;
}

SmoothBoundScan smooth_product_bound_scan(uint64_t limit) {
    if (limit < 2) throw std::invalid_argument("smooth_product_bound_scan: limit must be >= 2");
    SmoothBoundScan r;
    r.limit = limit;
    r.bounded_throughout = true;
    for (uint64_t p : arith::primes_below(limit + 1)) {
        double pd = static_cast<double>(p);
        r.log_product += std::log1p(2.0 / pd);
        r.log_mertens_sq += -2.0 * std::log1p(-1.0 / pd);
        if (r.log_product > r.log_mertens_sq + 1e-9) r.bounded_throughout = false;
    }
    return r;
}

TailReport truncation_tail_bound(const mpz_class& Z, uint32_t y, uint64_t n_sample,
                                 uint64_t seed) {
    if (y < 3) throw std::invalid_argument("truncation_tail_bound: y must be >= 3");
    if (Z < 2) throw std::invalid_argument("truncation_tail_bound: Z must be >= 2");
    std::mt19937_64 rng(seed);
    mpz_class range = Z - 1;   // values 2..Z
    size_t words = mpz_sizeinbase(Z.get_mpz_t(), 2) / 64 + 2;

    TailReport rep;
    double logy = std::log(static_cast<double>(y));
    for (uint64_t t = 0; t < n_sample; ++t) {
        mpz_class r = 0;
        for (size_t w = 0; w < words; ++w) {
            r <<= 64;
            r += mpz_class(static_cast<unsigned long>(rng()));
        }
        mpz_class v = 2 + r % range;
        arith::Factorization f = arith::factorize(v);
        if (!f.complete()) {
            ++rep.skipped;
            continue;
        }
        double product = 1.0;
        for (const auto& fe : f.factors) {
            if (fe.prime > y) product *= 1.0 + 2.0 / fe.prime.get_d();
        }
        double lv = std::log(v.get_d());
        double bound = std::exp(2.0 * lv / (y * logy));
        double ratio = product / bound;
        ++rep.samples;
        if (product > rep.max_product) rep.max_product = product;
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.worst = {v, product, bound};
        }
        if (product > bound * (1 + 1e-12)) rep.all_ok = false;
    }
    return rep;
}

ResidueClassResult residue_class_of_i(uint64_t d, uint64_t a, int64_t j, int64_t s) {
    if (d < 1) throw std::invalid_argument("residue_class_of_i: d must be >= 1");
    if (a < 1) throw std::invalid_argument("residue_class_of_i: a must be >= 1");
    {
        arith::Factorization f = arith::factorize(mpz_class(static_cast<unsigned long>(d)));
        if (!f.complete())
            throw std::invalid_argument("residue_class_of_i: cannot verify d squarefree");
        for (const auto& fe : f.factors)
            if (fe.exponent > 1)
                throw std::invalid_argument("residue_class_of_i: d is not squarefree");
    }

    auto norm = [&](int64_t v) -> uint64_t {
        int64_t m = v % static_cast<int64_t>(d);
        if (m < 0) m += static_cast<int64_t>(d);
        return static_cast<uint64_t>(m);
    };
    uint64_t j_mod = norm(j);
    uint64_t s_mod = norm(s);
    uint64_t a_mod = a % d;

    ResidueClassResult res;
    res.B_d = d == 1 ? 1 : std::gcd(d, arith::mulmod(j_mod, a_mod, d));
    res.d_prime = d / res.B_d;
    res.ell = arith::multiplicative_order(a, res.d_prime);

    // one full period locates the class; two more confirm it
    uint64_t span = 3 * res.ell;
    uint64_t cur = a_mod;   // a^1 mod d
    std::vector<uint64_t> witnesses;
    for (uint64_t i = 1; i <= span; ++i) {
        uint64_t val = d == 1 ? 0 : (arith::mulmod(j_mod, cur, d) + s_mod) % d;
        bool sol = val == 0;
        if (sol && !res.has_solution && i <= res.ell) {
            res.has_solution = true;
            res.i0 = i % res.ell;
        }
        if (sol) witnesses.push_back(i);
        cur = d == 1 ? 0 : arith::mulmod(cur, a_mod, d);
    }
    // the class must describe the solutions exactly
    for (uint64_t i = 1; i <= span; ++i) {
        bool in_class = res.has_solution && i % res.ell == res.i0;
        bool is_witness = std::binary_search(witnesses.begin(), witnesses.end(), i);
        if (in_class != is_witness) {
            std::ostringstream os;
            os << "residue_class_of_i: solutions of " << d << " | " << j << "*" << a
               << "^i + " << s << " do not form the single class i == " << res.i0 << " (mod "
               << res.ell << ")";
            throw std::runtime_error(os.str());
        }
    }

    if (res.has_solution && d > 1) {
        uint64_t g_s = std::gcd(d, s_mod);
        if (g_s != res.B_d) res.gcd_chain_ok = false;
        uint64_t c = a_mod;
        for (uint64_t i = 1; i <= span && res.gcd_chain_ok; ++i) {
            if (std::binary_search(witnesses.begin(), witnesses.end(), i)) {
                uint64_t g_i = std::gcd(d, arith::mulmod(j_mod, c, d));
                if (g_i != res.B_d) res.gcd_chain_ok = false;
            }
            c = arith::mulmod(c, a_mod, d);
        }
    }
    return res;
}

namespace {

double class_product_factor(const mpz_class& W, int64_t h) {
    double f = 1.0;
    arith::Factorization wf = arith::factorize(W);
    if (!wf.complete())
        throw std::runtime_error("sieve_ratio_experiment: cannot factor W");
    for (const auto& fe : wf.factors) {
        double p = fe.prime.get_d();
        f *= (p / (p - 1.0)) * (p / (p - 1.0));
    }
    mpz_class habs(static_cast<long>(h < 0 ? -h : h));
    arith::Factorization hf = arith::factorize(habs);
    if (!hf.complete())
        throw std::runtime_error("sieve_ratio_experiment: cannot factor h");
    for (const auto& fe : hf.factors) {
        if (mpz_divisible_p(W.get_mpz_t(), fe.prime.get_mpz_t())) continue;
        double p = fe.prime.get_d();
        f *= p / (p - 1.0);
    }
    return f;
}

}   // namespace

std::vector<SieveRatioPoint> sieve_ratio_experiment(const std::vector<uint64_t>& x_grid,
                                                    const mpz_class& W, const mpz_class& b,
                                                    int64_t k, int64_t h, unsigned threads) {
    if (k == 0 || h == 0)
        throw std::invalid_argument("sieve_ratio_experiment: k and h must be nonzero");
    if (W < 1) throw std::invalid_argument("sieve_ratio_experiment: W must be >= 1");
    if (b < 0 || b >= W) throw std::invalid_argument("sieve_ratio_experiment: need 0 <= b < W");
    {
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), b.get_mpz_t(), W.get_mpz_t());
        if (W > 1 && g != 1)
            throw std::invalid_argument("sieve_ratio_experiment: gcd(b, W) != 1");
    }

    bool w_small = mpz_fits_ulong_p(W.get_mpz_t());
    uint64_t w64 = w_small ? W.get_ui() : 0;
    uint64_t b64 = w_small ? b.get_ui() : 0;
    double pf = class_product_factor(W, h);

    std::vector<SieveRatioPoint> out;
    for (uint64_t x : x_grid) {
        if (x < 2) throw std::invalid_argument("sieve_ratio_experiment: x must be >= 2");
        __int128 vmax = static_cast<__int128>(k < 0 ? -k : k) * x +
                        static_cast<__int128>(h < 0 ? -h : h);
        if (vmax >= (static_cast<__int128>(1) << 62))
            throw std::invalid_argument("sieve_ratio_experiment: |k|x + |h| beyond capacity");

        const uint64_t chunk_len = 1u << 20;
        uint64_t chunk_count = (x + chunk_len) / chunk_len;
        std::vector<uint64_t> counts(chunk_count, 0);
        par::run_chunks(chunk_count, threads, [&](uint64_t c) {
            uint64_t clo = c * chunk_len;
            uint64_t chi = std::min(x + 1, clo + chunk_len);
            if (chi <= clo) return;
            arith::PrimeSieve msieve(clo, chi);

            // a secondary sieve covers |k*m + h| when the values stay positive
            // and the window is modest; otherwise individual primality tests
            std::optional<arith::PrimeSieve> vsieve;
            uint64_t vlo = 0;
            if (k > 0) {
                __int128 lo_v = static_cast<__int128>(k) * clo + h;
                __int128 hi_v = static_cast<__int128>(k) * (chi - 1) + h + 1;
                if (lo_v >= 2 && hi_v - lo_v <= (1 << 22)) {
                    vlo = static_cast<uint64_t>(lo_v);
                    vsieve.emplace(vlo, static_cast<uint64_t>(hi_v));
                }
            }
            uint64_t local = 0;
            msieve.for_each_prime([&](uint64_t m) {
                if (w_small) {
                    if (m % w64 != b64) return;
                } else {
                    mpz_class mm(static_cast<unsigned long>(m));
                    if (mm % W != b) return;
                }
                __int128 v = static_cast<__int128>(k) * m + h;
                if (v < 0) v = -v;
                uint64_t vu = static_cast<uint64_t>(v);
                if (vu <= 1) return;
                bool prime = vsieve ? vsieve->is_prime(vu) : arith::is_prime_u64(vu);
                if (prime) ++local;
            });
            counts[c] = local;
        });

        SieveRatioPoint pt;
        pt.x = x;
        pt.W = W;
        pt.b = b;
        pt.k = k;
        pt.h = h;
        for (uint64_t c : counts) pt.count += c;
        double lx = std::log(static_cast<double>(x));
        pt.normalized = static_cast<double>(pt.count) * W.get_d() * lx * lx /
                        static_cast<double>(x);
        pt.product_factor = pf;
        out.push_back(pt);
    }
    return out;
}

}   // namespace delicate::analytic
